# # Reports on disk
#
# Every result type serialises to sorted-key JSON (infinities as "inf")
# and most to a fixed CSV layout; the same objects back the command line.

import json
import math

from tubehomog import Coupled, box_dirichlet_spectrum, classify, homogenized_spectrum, limits_from_law, ScalingLaw
from tubehomog.cli import main
from tubehomog.report import export_report, from_dict

# In[1]:

limits = limits_from_law(ScalingLaw.power(3, 2, 0))
text = export_report(limits).decode()
print(text)
assert from_dict(json.loads(text)) == limits

# In[2]:

spec = homogenized_spectrum(Coupled(V=math.pi), box_dirichlet_spectrum([1, 2], 10), 6)
print(export_report(spec, "csv").decode())

# In[3]:

# Same thing from the shell: tubehomog classify --n 3 --alpha 3/2 --beta 0
main(["classify", "--n", "3", "--alpha", "3/2", "--beta", "0"])

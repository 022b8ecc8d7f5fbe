# # Checking the limits against the eps-problem itself
#
# A finite-difference model of the two sheets with one tube per period cell
# (N = 2, unit square, four grid points per period).  Two runs: tubes of
# fixed length (pencil limit) and short thin tubes (plain Laplacian limit).

import math
import sys
from fractions import Fraction as F

from tubehomog import ScalingLaw, convergence_study

eps_list = [1 / 4, 1 / 8] if "--quick" in sys.argv else [1 / 4, 1 / 8, 1 / 16]

# In[1]:

fixed_length = ScalingLaw.power(2, F(2), 0, d0=0.5, q0=1.0)
rep = convergence_study(fixed_length, eps_list, m=2, window=(0.5 * math.pi ** 2, 1.5 * math.pi ** 2))
print(rep.regime, "predicted:", rep.rows[0].predicted)
for row in rep.rows:
    print(f"eps={row.eps:<7} dim={row.dim:<6} lambda={row.computed[0]:.5f}  rel.err={row.rel_errors[0]:.4f}  "
          f"eigenvalues near pi^2: {row.window_count}  ({row.seconds:.1f} s)")
print(rep.verdicts)

# In[2]:

thin = ScalingLaw.power(2, F(3, 2), 1, d0=0.5, q0=1.0)
rep = convergence_study(thin, eps_list)
for row in rep.rows:
    print(f"eps={row.eps:<7} lambda={row.computed[0]:.5f}  rel.err={row.rel_errors[0]:.4f}  "
          f"sheet symmetry={row.ground_symmetry:.6f}")

# In[3]:

# The error against 2 pi^2 falls but slowly: short tubes still add a mass
# that vanishes only like eps^(alpha + beta - 2), here eps^(1/2).
print(rep.errors().round(4).tolist())

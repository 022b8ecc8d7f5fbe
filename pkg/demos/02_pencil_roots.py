# # Two sheets joined by tubes of finite length
#
# With q > 0 and p > 0 every base eigenvalue mu of the box produces one
# root per interval J_n = ((pi (n-1) / q)^2, (pi n / q)^2) on the "hard"
# branch and at most one more on the "soft" one.

import math

import numpy as np

from tubehomog import PencilParams, box_dirichlet_spectrum, pencil_spectrum, tube_coefficients
from tubehomog.pencil import branch_root

params = PencilParams(p=1.0, q=1.0, omega=2 * math.pi)
base = box_dirichlet_spectrum([1.0, 1.0], 12)

# In[1]:

spec = pencil_spectrum(base, params, n_max=2)
for block in spec.intervals:
    print(f"J_{block.n} = ({block.lower:.3f}, {block.upper:.3f})")
    for r in block.roots[:6]:
        print(f"   {r.value:12.8f}  x{r.multiplicity}  {r.branch:>4}  from mu index {r.sources}")

# In[2]:

# The hard-branch roots climb towards the top of J_1 as mu grows, so pi^2
# is an accumulation point of the limit spectrum.

for mu in (1e2, 1e3, 1e4, 1e6):
    lam = branch_root("tan", 1, mu, params)
    print(f"mu = {mu:8.0e}  lambda = {lam:.8f}  gap to pi^2 = {math.pi ** 2 - lam:.2e}")

# In[3]:

# Energy split of a tube eigenfunction between its ends: rho+- stay above 1/2.

for lam in np.linspace(0.5, 30, 5):
    k = tube_coefficients(lam, params.q)
    print(f"lambda={lam:6.2f}  k1={k.k1:.5f}  k2={k.k2:+.5f}  rho+={k.rho_plus:.4f}  rho-={k.rho_minus:.4f}")

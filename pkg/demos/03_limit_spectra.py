# # What the limit spectrum looks like in each regime
#
# The same box spectrum feeds four different limit problems.

import math

from tubehomog import (Coupled, DecoupledThreshold, Pencil, ScaledLaplacian, box_dirichlet_spectrum,
                       eigenvalue_limit, homogenized_spectrum, threshold_index)

base = box_dirichlet_spectrum([1.0, 1.0], 40)

# In[1]:

for problem in (Pencil(p=0.5, q=1.0, omega=2 * math.pi), DecoupledThreshold(q=0.5),
                ScaledLaplacian(c=1 / (1 + math.pi)), Coupled(V=math.pi)):
    s = homogenized_spectrum(problem, base, 8, n_max=2)
    print(problem)
    print("   ", [f"{v:.4f}x{m}" for v, m in zip(s.values, s.multiplicities)][:8],
          "accumulation:", [f"{a:.3f}" for a in s.accumulation_points])

# In[2]:

# With p = 0 the tubes only contribute thresholds. On a 3 x 3 square the
# first 8 eigenvalues (doubled) sit below pi^2; from m = 9 on every
# eigenvalue of the eps-problem tends to pi^2 itself.

sq3 = box_dirichlet_spectrum([3.0, 3.0], 40)
M = threshold_index(sq3, 1.0)
print("threshold index:", M)
for m in (1, 8, 9, 20):
    print(m, eigenvalue_limit(DecoupledThreshold(q=1.0), sq3, m))

# # Walking the (alpha, beta) plane
#
# Holes of radius d0 * eps^alpha, tubes of length q0 * eps^beta, N = 3.
# Every admissible rational point lands in exactly one region, and each
# region fixes which limit problem governs the spectrum.

from fractions import Fraction as F

from tubehomog import ScalingLaw, classify, limits_from_law, phase_point

# In[1]:

points = [("3/2", 0), (2, 0), ("6/5", 1), ("5/4", "1/2"), (2, 1), (3, 3), (3, 5), (2, "1/2"), (4, 1), (3, 1)]

for alpha, beta in points:
    law = ScalingLaw.power(3, F(alpha), F(beta), d0=0.7, q0=1.3)
    lim = limits_from_law(law)
    print(f"alpha={str(F(alpha)):>4} beta={str(F(beta)):>4}  {phase_point(law):<13} "
          f"p={lim.p:<8.4g} q={lim.q:<4g} r={lim.r:<8.4g} D={lim.D:<6.4g} -> {classify(lim, 3)}")

# In[2]:

# Exact arithmetic matters on the boundaries: alpha = 6/5, beta = 0 sits
# just outside the admissible set, and the failure names the inequality.

law = ScalingLaw.power(3, F(6, 5), 0)
print(law.is_admissible(), law.admissibility_failures())

# In[3]:

# For N = 2 the capacity limit D is infinite for every power law, so the
# capacity-coupled regime needs an exponentially small hole radius.

exp_law = ScalingLaw.exponential(5.0, 1)
print(limits_from_law(exp_law), classify(limits_from_law(exp_law), 2))

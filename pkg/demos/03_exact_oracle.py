# Exact laws on tiny boxes by summing over every configuration.
#
# The counts are integers per number of open bonds, so each probability is an
# exact polynomial in p, evaluated here in rationals.
from fractions import Fraction

from percolab import oracle
from percolab.lattice import BoxSpec

box = BoxSpec(2, 1)
print(f"B_1 in d=2 has {box.num_edges} bonds, {2 ** box.num_edges} configurations\n")

for p in ("1/4", "1/2", "3/4"):
    dist = oracle.enumerate(box, p, oracle.R_ZB_WORLD)
    law = ", ".join(f"P(R={v}) = {q}" for v, q in dist.support)
    print(f"p = {p}: {law}")

# the origin reaches the boundary of B_1 iff one of its four bonds is open
for p in ("3/10", "1/2"):
    q = Fraction(p)
    print(f"one-arm at p = {p}: {oracle.exact_one_arm(box, p)} "
          f"(closed form {1 - (1 - q) ** 4})")

dist = oracle.enumerate(box, "1/2", oracle.DIAM_ORIGIN)
print(f"\norigin cluster diameter at p = 1/2: mean {dist.mean()}, "
      f"P(diam >= 2) = {dist.tail(2)}")

try:
    oracle.enumerate(BoxSpec(2, 2), "1/2", oracle.R_ZB_WORLD)
except oracle.EdgeBudgetExceeded as exc:
    print(f"\nB_2 is refused: {exc}")

"""Basic and cumulative spline kernels as exact piecewise polynomials.

The basic spline on p+1 nodes is the Peano kernel of the divided difference:
[x_0..x_p] f = 1/(p-1)! * int f^(p)(t) B(t) dt. It is nonnegative, lives on
the node range and integrates to 1/p. The cumulative kernel on p nodes drops
from 1 to 0 across the nodes.
"""
import numpy as np

from specshift import Exponential, divided_difference, spline_to_piecewise
from specshift.piecewise import piecewise_integrate

B = spline_to_piecewise([0.0, 1.0, 3.0], "basic")
print("basic spline on (0, 1, 3)")
print("  breakpoints:", B.breakpoints)
print("  pieces (ascending powers of t - left end):")
for k, row in enumerate(B.coefficients):
    print(f"    [{B.breakpoints[k]:g}, {B.breakpoints[k + 1]:g}):", np.round(row, 6))
print("  value at the middle node:", B(1.0), " integral:", B.integral())

# The Peano identity, with the integral done in closed form.
g = Exponential(1.5)
x = [0.0, 1.0, 3.0]
lhs = divided_difference(g, x)
rhs = piecewise_integrate(B, g, 2)          # 1/(p-1)! = 1 for p = 2
print("\nPeano identity for exp(1.5 i x):", lhs, "vs", rhs)

# Repeated nodes: the cumulative kernel on (2, 2, 2) is the indicator of t < 2.
C = spline_to_piecewise([2.0, 2.0, 2.0], "cumulative")
print("\ncumulative kernel on (2, 2, 2) at t = 1.9, 2.0, 2.1:", C(np.array([1.9, 2.0, 2.1])))
C = spline_to_piecewise([0.0, 0.5, 0.5, 2.0], "cumulative")
t = np.linspace(-0.5, 2.5, 7)
print("cumulative kernel on (0, 0.5, 0.5, 2):")
for a, b in zip(t, C(t)):
    print(f"  t = {a:5.2f}  {b:.6f}")

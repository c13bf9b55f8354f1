"""Divided differences, including repeated (confluent) nodes.

A divided difference of order n is the leading coefficient of the
polynomial interpolating f at n+1 nodes. When nodes repeat, the definition
continues by derivatives, so [x, x] f = f'(x).
"""
import numpy as np

from specshift import Polynomial, divided_difference, divided_difference_resolvent, f_z

# The leading coefficient of a monic polynomial is recovered exactly.
p = Polynomial((3.0, -1.0, 0.0, 1.0))     # 3 - x + x^3
print("[0, 1, 2, 5] (3 - x + x^3) =", divided_difference(p, [0, 1, 2, 5]).real)

# Repeated nodes fall back to derivatives.
f = f_z(1j)                                 # x -> 1 / (i - x)
print("[0, 0] f_i =", divided_difference(f, [0, 0]), " f_i'(0) =", f.derivative(0.0, 1))

# Moving two nodes together approaches the confluent value linearly.
exact = divided_difference(f, [0.0, 0.0])
for d in (1e-1, 1e-2, 1e-3, 1e-4):
    err = abs(divided_difference(f, [0.0, d]) - exact)
    print(f"  separation {d:7.0e}: error {err:.3e}")

# For resolvent functions the divided difference has a product form,
# [x_0..x_n] 1/(z - x) = prod 1/(z - x_i). The recursive table subtracts
# nearly equal numbers when nodes cluster and loses digits; the product
# form does not.
z = 0.3 + 0.7j
print("\nclustered nodes: closed form vs recursive table")
for d in (1e-2, 1e-4, 1e-6):
    x = [0.0, d, 2 * d, 3 * d]
    closed = divided_difference_resolvent(z, 1, x)
    table = divided_difference(f_z(z), x, method="recursive")
    print(f"  gap {d:6.0e}: relative gap between them {abs(table - closed) / abs(closed):.2e}")

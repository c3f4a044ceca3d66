"""The explicit one-parameter family and its x1 -> infinity limit.

On a symmetric structure the instanton profile is x = x1 E/(1 + x1 Q)
with quadrature data E, Q built once per structure.  On Bryant-Salamon
data the bounded product A1*x has a closed form, which we check here.
"""

import numpy as np

from g2flow import make_bryant_salamon, theta_x1, theta_zero

bs = make_bryant_salamon()
third = bs.b0 * bs.b0

print("A1*x against the closed form  2*x1*A1^2 / (1 + x1*(B1^2 - 1/3))")
ts = np.geomspace(0.05, 8.0, 7)
for x1 in (0.1, 1.0, 10.0):
    sol = theta_x1(bs, x1)
    errs = []
    for t in ts:
        a1 = bs.A[0](t)
        closed = 2.0 * x1 * a1 * a1 / (1.0 + x1 * (bs.B[0](t) ** 2 - third))
        errs.append(abs(sol.extras["A1x"](t) - closed))
    print("  x1=%-5g  max |diff| = %.2e" % (x1, max(errs)))

# the limit member: A1*x -> 1 at the origin, pole 2/t in the raw profile
lim = theta_zero(bs)
print("\nlimit member A1*x at small t (should approach 1):")
for t in (1.0, 0.1, 0.01, 0.001):
    print("  t=%-6g  A1*x = %.8f" % (t, lim.extras["A1x"](t)))

print("\nraw profile t*x(t) at small t (pole coefficient 2):")
for t in (0.1, 0.01, 0.001):
    print("  t=%-6g  t*x = %.8f" % (t, t * lim.extras["x"](t)))

# members approach the limit member like 1/x1 on a fixed window
print("\nsup |A1x(x1) - A1x(limit)| on [1,5]:")
window = np.linspace(1.0, 5.0, 60)
ref = np.array([lim.extras["A1x"](t) for t in window])
for x1 in (1.0, 10.0, 100.0):
    sol = theta_x1(bs, x1)
    vals = np.array([sol.extras["A1x"](t) for t in window])
    print("  x1=%-5g  %.3e" % (x1, np.abs(vals - ref).max()))

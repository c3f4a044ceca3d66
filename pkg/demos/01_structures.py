"""Build the two reference structures and look at their profiles.

A structure is six warping functions (A_1,A_2,A_3,B_1,B_2,B_3) of the
cone coordinate t, with A_i ~ t/2 at the origin and B_i(0) = b0 > 0.
"""

import numpy as np

from g2flow import coefficient_functions, make_bryant_salamon, \
    make_linear_example

bs = make_bryant_salamon()
lin = make_linear_example(1.0)

print("label            b0          b2          a3       t_max")
for s in (bs, lin):
    print("%-14s %.8f  %10.6f  %8.4f  %8.2f"
          % (s.label, s.b0, s.b2, s.a3[0], s.t_max))

# profile table on a short window
ts = np.linspace(0.0, 4.0, 9)
print("\n  t      A1(bs)   B1(bs)   A1(lin)  B1(lin)")
for t in ts:
    print("%4.1f   %7.4f  %7.4f   %7.4f  %7.4f"
          % (t, bs.A[0](t), bs.B[0](t), lin.A[0](t), lin.B[0](t)))

# the linear example has closed forms: A1 = t/2, B1 = sqrt(b0^2 + t^2/4)
t = 3.0
print("\nlinear example at t=3: B1^2 - (1 + t^2/4) = %.2e"
      % (lin.B[0](t) ** 2 - (1.0 + t * t / 4.0)))

# deflated ODE coefficients F = -1/t + phi, G = 4/t + gamma
cf = coefficient_functions(bs)
print("\nphi1 (t^1 Taylor coefficient of phi_i):   %s" % (cf.phi1,))
print("gamma1 (t^1 Taylor coefficient of gamma_i): %s" % (cf.gamma1,))
print("t*G_1(t) as t->0: %.6f (pole strength 4)"
      % (1e-6 * (4.0 / 1e-6 + cf.gamma[0](1e-6))))

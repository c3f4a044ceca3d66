"""Concentration of the one-parameter family near the origin.

As x1 grows the profile concentrates at t = 0; after rescaling by
delta = sqrt(2*lam/c_fit) it approaches the model bubble
lam*t^2/(1 + lam*t^2) on the unit ball, at rate ~ 1/c_fit.
"""

import numpy as np

from g2flow import bubbling_report, make_bryant_salamon

bs = make_bryant_salamon()

dists, cs = [], []
print(" x1        c_fit        delta       sup distance")
for x1 in (10.0, 100.0, 1000.0, 10000.0):
    rep = bubbling_report(bs, x1, 1.0)
    m = rep.metrics
    print("%6g   %10.4f   %.6f   %.3e"
          % (x1, m["c_fit"], m["delta"], m["sup_distance"]))
    dists.append(m["sup_distance"])
    cs.append(m["c_fit"])

slope = np.polyfit(np.log(cs), np.log(dists), 1)[0]
print("\nlog-log slope of distance vs c_fit: %.4f (rate ~ -1)" % slope)

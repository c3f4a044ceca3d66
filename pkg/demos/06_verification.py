"""Run the standard report battery on both reference structures.

Each report is a named pass/fail verdict over a dictionary of metrics:
exact curvature oracles, gate spectra, ODE residuals, small-t parity
patterns, invariant-region containment, bubbling and convergence rates,
and the curvature limit at the boundary.
"""

from g2flow import default_battery, make_bryant_salamon, make_linear_example

for s in (make_bryant_salamon(), make_linear_example(1.0)):
    print("== %s ==" % s.label)
    for rep in default_battery(s):
        print("  %-28s %s" % (rep.name, "pass" if rep.passed else "FAIL"))
        if not rep.passed:
            for key, val in rep.metrics.items():
                print("      %s = %.6g" % (key, val))
    print()

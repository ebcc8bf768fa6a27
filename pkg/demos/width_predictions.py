"""
Predicted widths
================

g0 against the matching-based variance pipeline, and the proven lower bounds, on a
handful of n.
"""
from chromvar import g0_prediction, variance_pipeline

for e in (6, 9, 12, 20):
    pr = g0_prediction(10.0 ** e)
    c = pr.components
    print(f"n=1e{e}: case {pr.case_tag:>4}  x={c['x']:.3g}  g0={pr.g0:.4g}  "
          f"w_n={pr.w_n:.4g}  w~={pr.w_tilde:.4g}  nstar={pr.nstar_bound:.4g}")

# pipeline vs g0 for forced x at n = 1e9
for x in (0.001, 1.0, 100.0):
    pl = variance_pipeline(1e9, x=x)
    print(f"x={x:<6} y={pl.y:.4g} dy/dx={pl.dy_dx:.4g} B={pl.benefit:.4g} ratio={pl.ratio_to_g0:.3f}")

"""
The exponent of mu_alpha and the width exponent lambda
=======================================================

rho_hat is the exponent with mu_alpha(n) = n^rho_hat.  It tracks the
fractional part of alpha0(n) and drops each time alpha0 crosses an integer.
"""
import numpy as np

from chromvar import ScalePoint, asymptotic_record

# n from 1e6 to 1e8: alpha climbs by about one every three rows
exps = np.linspace(6, 8, 40)
print(f"{'log10 n':>8} {'alpha0':>9} {'alpha':>5} {'rho_hat':>8} {'lambda':>7}")
for e in exps:
    r = asymptotic_record(ScalePoint.pow10(e))
    print(f"{e:8.2f} {r.alpha0:9.4f} {r.alpha:5d} {r.rho_hat:8.4f} {r.lam:7.4f}")

# far out the correction terms fade and rho_hat meets the fractional part
for e in (100, 1000, 4000):
    r = asymptotic_record(ScalePoint.pow10(e))
    print(f"1e{e}: rho_hat - frac(alpha0) = {r.rho_hat - r.boundary_gap:+.5f}")

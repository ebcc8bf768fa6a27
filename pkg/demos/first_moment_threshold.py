"""
Bounded colourings and the first moment threshold
==================================================

Exact expectations for tiny n, then the relaxed threshold k*(n) where the
per-colour log-expectation changes sign.
"""
from chromvar import exact_E, k_t_exact, solve_k_star, k_star_closed_form, ScalePoint

# E[number of unordered t-bounded k-colourings of G(n, 1/2)], as fractions
for n, k, t in [(4, 2, 2), (4, 3, 2), (6, 3, 2), (7, 4, 3)]:
    print(f"E(n={n}, k={k}, t={t}) = {exact_E(n, k, t).value}")

# the least k with E >= 1
print("k_t(n):", {(n, t): k_t_exact(n, t) for n in (4, 6, 8) for t in (2, 3)})

# relaxed threshold, real-valued and then log-only
for n in (10**6, 10**12, 10**30):
    r = solve_k_star(n)
    print(f"n=1e{len(str(n)) - 1}: n/k* = {r.n_over_k:.4f}, closed form {k_star_closed_form(n):.4f}, "
          f"dk*/dn = {r.derivative:.6f}")
s = ScalePoint.pow10(500)
r = solve_k_star(s)
print(f"n=1e500: log k* = {r.log_k:.3f}, n/k* = {r.rho:.3f}")

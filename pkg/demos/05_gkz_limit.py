"""From hypergeometric series to the infinite-ring flux.

The PBCA partition sum is a GKZ-type series F1 in lam = 1/(1-alpha), and the
flux is (alpha/L) F0/F1.  We audit the differential and contiguous relations,
then watch the finite-size flux at half filling approach the limit obtained
from the admissible root of the g1 quadratic.
"""
from pbca_lab.flux import flux_pbca
from pbca_lab.gkz import g1_roots, gkz_check_identities, gkz_limit

worst = max(gkz_check_identities(L, m, lam).max_residual()
            for L in range(3, 41) for m in range(1, L) for lam in (1.5, 5.0))
print(f"largest identity residual for L <= 40: {worst:.1e}")

alpha = 0.8
lam = 1 / (1 - alpha)
print("\nboth roots of the g1 quadratic at rho=0.5 give fluxes",
      [round(alpha * 0.5 * lam * g, 7) for g in g1_roots(0.5, alpha)])
limit = gkz_limit(0.5, alpha).flux
print(f"only the smaller one is a valid flux: {limit:.7f}")

print("\n   L    finite-size flux   excess over limit")
for L in (10, 50, 100, 200, 400, 1000):
    q = flux_pbca(L, L // 2, alpha).flux
    print(f"{L:>5d}   {q:.7f}          {q - limit:.2e}")

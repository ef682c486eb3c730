"""Why everything happens in the eigenbasis of A.

G = (1 + mu*sig)(I + lam*A) - I shares the eigenvectors of A, so
positive-definiteness of G and I + lam*A reduces to sign checks on
scalars, and G^{-1} is a division by those scalars.
"""

import numpy as np

from surfdist import dual_diagnostics, ellipsoid_example, solve_global, spectral_cache, xi_hessian_x
from surfdist.dual import apply_g, solve_g

inst = ellipsoid_example()
cache = spectral_cache(inst)
print("A =\n", inst.A)
print("eigenvalues:", cache.beta)

cert = solve_global(inst)
sp = cert.witness
print("\nstatus:", cert.status, " dual point:", np.round(sp.dp, 8))
diag = dual_diagnostics(inst, cache, sp.dp)
print("1 + lam*beta_i:", diag.one_plus_lam_beta)
print("d_i (eigenvalues of G):", diag.d)

H, pd = xi_hessian_x(inst, sp.dp, cache)
print("\nscalar test says PD:", pd, "  smallest eigenvalue of the 6x6 Hessian:", np.linalg.eigvalsh(H)[0])

v = np.array([1.0, -2.0, 0.5])
w = apply_g(inst, sp.dp, v)
print("\nG v =", w, "  spectral G^{-1}(G v) =", solve_g(inst, cache, sp.dp, w))
print("\nclosest pair: y =", sp.x.y, " z =", sp.x.z, f" Pi = {sp.pi:.10f}")

"""The canonical function V and its conjugate.

V(xi) = alpha/2 (xi - eta)^2 on xi >= 0 has duality map sig = DV(xi) and
conjugate V*(sig) = sig^2/(2 alpha) + eta*sig. Fenchel-Young holds with
equality along the duality map, and weak duality Xi <= L follows from the
inequality elsewhere when mu > 0.
"""

import numpy as np

from surfdist import DualPoint, lagrangian, symmetric_example, xi_value
from surfdist.problem import dv, dv_star, v_star, v_value

inst = symmetric_example()
print("alpha =", inst.alpha, " eta =", inst.eta)
print(f"{'xi':>6} {'sig=DV':>10} {'V+V*-xi*sig':>14} {'DV*(sig)':>10}")
for xi in (0.0, 0.5, 1.0, 2.0, 5.0):
    sig = dv(inst, xi)
    print(f"{xi:>6.2f} {sig:>10.4f} {v_value(inst, xi) + v_star(inst, sig) - xi * sig:>14.2e} {dv_star(inst, sig):>10.4f}")

rng = np.random.default_rng(0)
worst = -np.inf
for _ in range(500):
    dp = DualPoint(rng.normal(), rng.uniform(0.01, 5), rng.normal())
    x = (rng.normal(size=2), rng.normal(size=2))
    worst = max(worst, xi_value(inst, x, dp) - lagrangian(inst, x, dp.lam, dp.mu))
print("\nmax of Xi - L over 500 random points with mu > 0:", worst)

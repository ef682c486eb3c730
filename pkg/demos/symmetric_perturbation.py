"""Breaking a tie with a vanishing linear perturbation.

The two-dimensional example is symmetric about the first axis, so it has
two mirrored global minimizers and no certifying dual point. Adding e/k
to f selects one of them; as k grows the certified solutions approach the
upper minimizer.
"""

import numpy as np

from surfdist import brute_force_min, perturb_and_solve, solve_global, symmetric_example

inst = symmetric_example()
cert = solve_global(inst)
print("unperturbed status:", cert.status)
print("  best stationary point lies on the axis: y =", cert.witness.x.y, f" Pi = {cert.witness.pi:.6f}")

res = brute_force_min(inst, m=96)
print("\noracle minima (both branches):")
for lm in res.local_minima[:2]:
    print(f"  y = {lm.x.y}  z = {lm.x.z}  Pi = {lm.pi:.10f}")

trace = perturb_and_solve(inst, [0.0, 1.0], (64, 1000, 10000, 100000)).perturbation_trace
print(f"\n{'k':>8} {'lam':>10} {'mu':>10} {'sig':>11}   y")
for e in trace:
    lam, mu, sig = e.point.dp
    print(f"{e.k:>8g} {lam:>10.7f} {mu:>10.6f} {sig:>11.7f}   {np.round(e.point.x.y, 7)}  [{e.status}]")

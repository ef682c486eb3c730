"""Compare the dual certificate against brute force on random instances.

The oracle samples both surfaces on a direction grid, takes the closest
sampled pairs and polishes them on the product of the two surfaces. It
shares no code with the dual solver, so agreement is an independent check.
"""

import numpy as np

from surfdist import brute_force_min, random_instance, solve_global

rng = np.random.default_rng(2024)
print(f"{'n':>2} {'status':>24} {'Pi certified':>14} {'Pi oracle':>14} {'|dx|':>9}")
for i in range(6):
    inst = random_instance(rng, 2 + i % 2)
    cert = solve_global(inst)
    res = brute_force_min(inst, m=64)
    if cert.witness is None:
        print(f"{inst.n:>2} {cert.status:>24} {'-':>14} {res.pi:>14.8f}")
        continue
    dx = np.linalg.norm(np.concatenate(res.best_pair) - np.concatenate(cert.witness.x))
    print(f"{inst.n:>2} {cert.status:>24} {cert.witness.pi:>14.8f} {res.pi:>14.8f} {dx:>9.1e}")

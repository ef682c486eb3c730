"""Worked instances and a generator of random separated instances."""

import math

import numpy as np

from .problem import ProblemInstance, check_separation


def sphere_example():
    """Sphere of radius 2*sqrt(2) against a shifted quartic surface in R^3."""
    return ProblemInstance(
        A=np.eye(3), r=2 * math.sqrt(2), alpha=1.0, eta=2.0, f=[2.0, 1.0, 1.0], c=[4.0, 5.0, 0.0]
    )


def ellipsoid_example():
    A = [[3.0, 1.0, 1.0], [1.0, 4.0, 1.0], [1.0, 1.0, 5.0]]
    return ProblemInstance(
        A=A, r=2 * math.sqrt(2), alpha=1.0, eta=2.0, f=[-2.0, -2.0, 1.0], c=[-4.0, -5.0, 0.0]
    )


def symmetric_example():
    """Planar instance whose two global minimizers are mirror images."""
    return ProblemInstance(
        A=np.eye(2), r=1.0, alpha=1.0, eta=1.0, f=[math.sqrt(6) / 96, 0.0], c=[1.0, 0.0]
    )


EXAMPLES = {
    "sphere": sphere_example,
    "ellipsoid": ellipsoid_example,
    "symmetric": symmetric_example,
}


def random_spd(rng, n, low=0.5, high=3.0):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    beta = rng.uniform(low, high, n)
    A = (Q * beta) @ Q.T
    return 0.5 * (A + A.T)


def random_instance(rng, n, max_tries=100, separation_m=24):
    """A random instance whose surfaces are disjoint with Z outside the ellipsoid.

    The quartic surface is centred at distance 2..4 radii from the origin
    so that most draws separate; draws failing the sampled separation
    check are rejected.
    """
    for _ in range(max_tries):
        A = random_spd(rng, n)
        r = rng.uniform(0.5, 1.5)
        alpha = rng.uniform(0.5, 2.0)
        eta = rng.uniform(0.5, 2.0)
        direction = rng.standard_normal(n)
        direction /= np.linalg.norm(direction)
        reach = r / math.sqrt(np.linalg.eigvalsh(A)[0])
        c = direction * (reach + math.sqrt(2 * eta) + rng.uniform(0.5, 2.0))
        f = rng.uniform(0.05, 1.0) * rng.standard_normal(n)
        inst = ProblemInstance(A=A, r=r, alpha=alpha, eta=eta, f=f, c=c)
        if check_separation(inst, separation_m).status == "numerically plausible":
            return inst
    raise RuntimeError("could not draw a separated instance")

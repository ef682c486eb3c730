"""Brute-force ground truth for the minimal-distance problem.

Both surfaces are parameterized by directions: the ellipsoid through
``y = Q diag(1/sqrt(beta)) (r u)``, the quartic surface by the positive
roots of the radial quartic

    q(rho) = alpha/2 (rho^2/2 - eta)^2 - rho * (f'u)

along ``z = c + rho u``. Nearest pairs between the two clouds are then
polished by projected descent on the product of the two surfaces. Nothing
here uses the dual machinery.

Root search bound
-----------------
All positive roots of ``q`` lie below

    R_max = 2 sqrt(2 eta) + 2 (2 |f| / alpha)^(1/3) + 1.

For ``rho >= 2 sqrt(2 eta)`` we have ``rho^2/2 - eta >= 3 rho^2 / 8``, so
``q(rho) >= rho (9 alpha rho^3 / 128 - |f|)``. For ``rho >= R_max`` also
``rho^3 >= 16 |f| / alpha > 128 |f| / (9 alpha)``, hence ``q(rho) > 0``:
the leading quartic term dominates and no root lies beyond ``R_max``.
"""

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import norm, qmc

from .dual import spectral_cache
from .errors import InputError
from .problem import PrimalPoint, g_value, grad_g, grad_h, h_value, pi_value

N_CELLS = 512
POLISH_SEEDS = 20


@dataclass
class SurfaceSample:
    points: np.ndarray
    residual_bound: float
    n_directions: int = 0


@dataclass
class LocalMinimum:
    x: PrimalPoint
    pi: float
    lam: float
    mu: float
    tangent_residual: float
    constraint_residual: float


@dataclass
class OracleResult:
    best_pair: PrimalPoint
    distance: float
    pi: float
    resolution: int
    spacing: float
    local_minima: list = field(default_factory=list)


def root_bound(inst):
    return 2 * math.sqrt(2 * inst.eta) + 2 * (2 * np.linalg.norm(inst.f) / inst.alpha) ** (1 / 3) + 1


def _quartic(alpha, eta, s, rho):
    t = 0.5 * rho * rho - eta
    return 0.5 * alpha * t * t - rho * s


def _quartic_d(alpha, eta, s, rho):
    return alpha * (0.5 * rho * rho - eta) * rho - s


def _bisect(fun, lo, hi, iters=80):
    """Vectorized bisection; ``fun(lo)`` and ``fun(hi)`` must differ in sign."""
    flo = fun(lo, slice(None))
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = fun(mid, slice(None))
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def _radial_roots_batch(inst, U):
    """Positive radial roots for every row of ``U``.

    Returns ``(idx, rho)`` with ``idx`` the direction index of each root.
    """
    alpha, eta = inst.alpha, inst.eta
    s_all = U @ inst.f
    grid = np.linspace(0.0, root_bound(inst), N_CELLS + 1)
    q = _quartic(alpha, eta, s_all[:, None], grid[None, :])
    dq = _quartic_d(alpha, eta, s_all[:, None], grid[None, :])
    sq = np.sign(q)
    lo_q, hi_q = sq[:, :-1], sq[:, 1:]

    dirs, los, his, doubles = [], [], [], []

    # Exact zeros on interior grid nodes.
    zi, zk = np.nonzero(sq[:, 1:] == 0)
    doubles.append((zi, grid[zk + 1]))

    # Plain sign changes.
    ci, ck = np.nonzero(lo_q * hi_q < 0)
    dirs.append(ci)
    los.append(grid[ck])
    his.append(grid[ck + 1])

    # Cells where q keeps its sign but q' changes sign: locate the critical
    # point and inspect q there (touching root or a pair of close roots).
    ti, tk = np.nonzero((lo_q * hi_q > 0) & (dq[:, :-1] * dq[:, 1:] < 0))
    if len(ti):
        s_t = s_all[ti]

        def dfun(rho, sel):
            return _quartic_d(alpha, eta, s_t[sel], rho)

        crit = _bisect(dfun, grid[tk].copy(), grid[tk + 1].copy())
        qc = _quartic(alpha, eta, s_t, crit)
        scale = max(1.0, 0.5 * alpha * eta * eta)
        touch = np.abs(qc) <= 1e-13 * scale
        doubles.append((ti[touch], crit[touch]))
        split = ~touch & (np.sign(qc) != lo_q[ti, tk])
        for a, b in ((grid[tk][split], crit[split]), (crit[split], grid[tk + 1][split])):
            dirs.append(ti[split])
            los.append(a)
            his.append(b)

    idx = np.concatenate(dirs)
    lo = np.concatenate(los)
    hi = np.concatenate(his)
    if len(idx):
        s_b = s_all[idx]

        def qfun(rho, sel):
            return _quartic(alpha, eta, s_b[sel], rho)

        rho = _bisect(qfun, lo, hi)
    else:
        rho = np.zeros(0)
    idx = np.concatenate([idx] + [d[0] for d in doubles])
    rho = np.concatenate([rho] + [d[1] for d in doubles])
    rho = _newton_polish(alpha, eta, s_all[idx], rho)
    keep = rho > 0
    idx, rho = idx[keep], rho[keep]
    order = np.lexsort((rho, idx))
    idx, rho = idx[order], rho[order]
    dup = np.zeros(len(idx), dtype=bool)
    dup[1:] = (idx[1:] == idx[:-1]) & (np.abs(rho[1:] - rho[:-1]) <= 1e-9 * np.maximum(1, rho[1:]))
    return idx[~dup], rho[~dup]


def _newton_polish(alpha, eta, s, rho, iters=6):
    for _ in range(iters):
        q = _quartic(alpha, eta, s, rho)
        dq = _quartic_d(alpha, eta, s, rho)
        with np.errstate(divide="ignore", invalid="ignore"):
            trial = rho - q / dq
        ok = np.isfinite(trial) & (np.abs(_quartic(alpha, eta, s, trial)) < np.abs(q))
        rho = np.where(ok, trial, rho)
    return rho


def radial_roots(inst, u):
    """All positive roots ``rho`` with ``g(c + rho*u) = 0`` for a unit vector ``u``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (inst.n,):
        raise InputError(f"u must have length {inst.n}")
    if abs(np.linalg.norm(u) - 1) > 1e-12:
        raise InputError("u must be a unit vector")
    _, rho = _radial_roots_batch(inst, u[None, :])
    return rho


def sphere_directions(n, m, seed=0):
    """Deterministic quasi-uniform unit vectors, ``m**(n-1)`` of them.

    Circle: equally spaced angles. Sphere: a Fibonacci spiral. Higher
    dimensions: scrambled Sobol points pushed through the normal quantile
    function and normalized.
    """
    if m < 4:
        raise InputError("m must be >= 4")
    if n == 2:
        t = 2 * np.pi * np.arange(m) / m
        return np.column_stack([np.cos(t), np.sin(t)])
    count = m ** (n - 1)
    if n == 3:
        k = np.arange(count) + 0.5
        zc = 1 - 2 * k / count
        phi = np.pi * (3 - math.sqrt(5)) * k
        rc = np.sqrt(1 - zc * zc)
        return np.column_stack([rc * np.cos(phi), rc * np.sin(phi), zc])
    with warnings.catch_warnings():
        # m**(n-1) is rarely a power of two; balance is not needed here
        warnings.simplefilter("ignore", UserWarning)
        pts = qmc.Sobol(n, scramble=True, seed=seed).random(count)
    g = norm.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_surface_y(inst, cache=None, m=64, seed=0):
    cache = spectral_cache(inst) if cache is None else cache
    U = sphere_directions(inst.n, m, seed)
    W = inst.r * U
    pts = (W / np.sqrt(cache.beta)) @ cache.Q.T
    res = np.abs(0.5 * (np.einsum("ij,jk,ik->i", pts, inst.A, pts) - inst.r**2))
    return SurfaceSample(pts, float(res.max()), len(U))


def sample_surface_z(inst, m=64, seed=0):
    U = sphere_directions(inst.n, m, seed)
    idx, rho = _radial_roots_batch(inst, U)
    pts = inst.c + rho[:, None] * U[idx]
    if len(pts):
        dz = pts - inst.c
        xi = 0.5 * np.sum(dz * dz, axis=1)
        res = np.abs(0.5 * inst.alpha * (xi - inst.eta) ** 2 - dz @ inst.f)
        bound = float(res.max())
    else:
        bound = 0.0
    return SurfaceSample(pts, bound, len(U))


def write_samples_csv(stream, inst, y_sample, z_sample):
    """Write both clouds, one point per row, tagged by a ``surface`` column."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["surface"] + [f"x{i + 1}" for i in range(inst.n)] + ["residual"])
    for label, sample, fun in (("Y", y_sample, h_value), ("Z", z_sample, g_value)):
        for p in sample.points:
            writer.writerow([label] + [repr(float(v)) for v in p] + [repr(float(abs(fun(inst, p))))])


# Projection and polish.


def _project(fun, grad, p, tol=1e-13, iters=100):
    """Newton steps along the gradient until ``|fun(p)| <= tol``."""
    for _ in range(iters):
        v = fun(p)
        if abs(v) <= tol:
            break
        gr = grad(p)
        gg = gr @ gr
        if gg == 0:
            break
        p = p - v * gr / gg
    return p


def _unit_normal(gr, fallback):
    nrm = np.linalg.norm(gr)
    if nrm > 0:
        return gr / nrm
    nrm = np.linalg.norm(fallback)
    return fallback / nrm if nrm > 0 else fallback


def _tangent_gradient(inst, y, z):
    """Components of grad(|y-z|^2/2) tangent to each surface."""
    ny = _unit_normal(grad_h(inst, y), y)
    nz = _unit_normal(grad_g(inst, z), z - inst.c)
    gy = y - z
    gz = z - y
    return gy - (gy @ ny) * ny, gz - (gz @ nz) * nz


def kkt_multipliers(inst, x):
    """Least-squares Lagrange multipliers ``(lam, mu)`` for a primal point."""
    y, z = (np.asarray(v, dtype=float) for v in x)
    n = inst.n
    M = np.zeros((2 * n, 2))
    M[:n, 0] = grad_h(inst, y)
    M[n:, 1] = grad_g(inst, z)
    rhs = -np.concatenate([y - z, z - y])
    sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return float(sol[0]), float(sol[1])


def _kkt_newton(inst, y, z, lam, mu, iters=30):
    """Newton on the full KKT system; returns None if it does not converge."""
    n = inst.n
    A, alpha = inst.A, inst.alpha
    eye = np.eye(n)
    for _ in range(iters):
        dz = z - inst.c
        gh, gg = grad_h(inst, y), grad_g(inst, z)
        F = np.concatenate([y - z + lam * gh, z - y + mu * gg, [h_value(inst, y), g_value(inst, z)]])
        if np.linalg.norm(F) <= 1e-13:
            return y, z, lam, mu
        hess_g = alpha * ((0.5 * dz @ dz - inst.eta) * eye + np.outer(dz, dz))
        J = np.zeros((2 * n + 2, 2 * n + 2))
        J[:n, :n] = eye + lam * A
        J[:n, n : 2 * n] = -eye
        J[:n, 2 * n] = gh
        J[n : 2 * n, :n] = -eye
        J[n : 2 * n, n : 2 * n] = eye + mu * hess_g
        J[n : 2 * n, 2 * n + 1] = gg
        J[2 * n, :n] = gh
        J[2 * n + 1, n : 2 * n] = gg
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        y, z = y + step[:n], z + step[n : 2 * n]
        lam, mu = lam + step[2 * n], mu + step[2 * n + 1]
    F = np.concatenate([y - z + lam * grad_h(inst, y), z - y + mu * grad_g(inst, z)])
    if np.linalg.norm(F) <= 1e-9 and abs(h_value(inst, y)) <= 1e-12 and abs(g_value(inst, z)) <= 1e-12:
        return y, z, lam, mu
    return None


def polish_pair(inst, y, z, tol=1e-7, max_iter=5000):
    """Descend ``|y - z|^2/2`` over the product of both surfaces.

    Each step moves both points against the tangential gradient, then
    projects back onto the surfaces; the step halves until the objective
    decreases. A KKT Newton finish is accepted only when it stays in the
    same basin and does not increase the objective.
    """
    hy = lambda p: h_value(inst, p)
    gy = lambda p: grad_h(inst, p)
    hz = lambda p: g_value(inst, p)
    gz = lambda p: grad_g(inst, p)
    y = _project(hy, gy, np.array(y, dtype=float))
    z = _project(hz, gz, np.array(z, dtype=float))
    val = pi_value(inst, (y, z))
    step = 1.0
    for _ in range(max_iter):
        ty, tz = _tangent_gradient(inst, y, z)
        tres = max(np.linalg.norm(ty), np.linalg.norm(tz))
        if tres <= 1e-4 * tol:
            break
        improved = False
        while step > 1e-12:
            ny = _project(hy, gy, y - step * ty)
            nz = _project(hz, gz, z - step * tz)
            nval = pi_value(inst, (ny, nz))
            if nval < val:
                y, z, val = ny, nz, nval
                improved = True
                step = min(1.0, 2 * step)
                break
            step *= 0.5
        if not improved:
            break
    lam, mu = kkt_multipliers(inst, (y, z))
    finish = _kkt_newton(inst, y, z, lam, mu)
    if finish is not None:
        fy, fz, flam, fmu = finish
        close = np.linalg.norm(np.concatenate([fy - y, fz - z])) <= 1e-3
        if close and pi_value(inst, (fy, fz)) <= val + 1e-12:
            y, z, lam, mu = fy, fz, flam, fmu
    ty, tz = _tangent_gradient(inst, y, z)
    return LocalMinimum(
        x=PrimalPoint(y, z),
        pi=pi_value(inst, (y, z)),
        lam=lam,
        mu=mu,
        tangent_residual=float(max(np.linalg.norm(ty), np.linalg.norm(tz))),
        constraint_residual=float(max(abs(h_value(inst, y)), abs(g_value(inst, z)))),
    )


def _cloud_spacing(points):
    if len(points) < 2:
        return 0.0
    d, _ = cKDTree(points).query(points, k=2)
    return float(np.max(d[:, 1]))


def brute_force_min(inst, m=96, polish=True, seed=0, n_seeds=POLISH_SEEDS):
    """Nearest pair between direction-grid samples of both surfaces.

    With ``polish`` the ``n_seeds`` closest sampled pairs are refined
    and the distinct polished basins are reported in ``local_minima``,
    sorted by objective value.
    """
    if m < 16:
        raise InputError("m must be >= 16")
    cache = spectral_cache(inst)
    ys = sample_surface_y(inst, cache, m, seed).points
    zs = sample_surface_z(inst, m, seed).points
    if len(zs) == 0:
        raise InputError("no point of the quartic surface was sampled; the surface may be empty")
    dist, nearest = cKDTree(ys).query(zs)
    order = np.argsort(dist, kind="stable")
    best = order[0]
    best_pair = PrimalPoint(ys[nearest[best]], zs[best])
    spacing = max(_cloud_spacing(ys), _cloud_spacing(zs))
    result = OracleResult(best_pair, float(dist[best]), 0.5 * float(dist[best]) ** 2, m, spacing)
    if not polish:
        return result

    minima = []
    for j in order[:n_seeds]:
        lm = polish_pair(inst, ys[nearest[j]], zs[j])
        if lm.constraint_residual > 1e-8:
            continue
        minima.append(lm)
    minima.sort(key=lambda lm: (lm.pi, tuple(np.concatenate(lm.x))))
    distinct = []
    for lm in minima:
        xv = np.concatenate(lm.x)
        if all(np.linalg.norm(xv - np.concatenate(o.x)) > 1e-4 for o in distinct):
            distinct.append(lm)
    result.local_minima = distinct
    if distinct and distinct[0].pi < result.pi:
        top = distinct[0]
        result.best_pair = top.x
        result.pi = top.pi
        result.distance = math.sqrt(2 * top.pi)
    return result


@dataclass
class KKTReport:
    stationarity: float
    h_residual: float
    g_residual: float
    tol: float

    @property
    def stationary(self):
        return self.stationarity <= self.tol

    @property
    def feasible(self):
        return max(self.h_residual, self.g_residual) <= self.tol

    @property
    def ok(self):
        return self.stationary and self.feasible


def kkt_check(inst, x, lam, mu, tol=1e-6):
    """First-order conditions of the primal problem with given multipliers."""
    y, z = (np.asarray(v, dtype=float) for v in x)
    r = np.concatenate([y - z + lam * grad_h(inst, y), z - y + mu * grad_g(inst, z)])
    return KKTReport(float(np.linalg.norm(r)), abs(h_value(inst, y)), abs(g_value(inst, z)), tol)

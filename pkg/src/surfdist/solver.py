"""Multistart Newton search for dual stationary points and global certificates."""

import itertools
import logging
from dataclasses import dataclass, field, fields, replace
from typing import Optional

import numpy as np

from .dual import (
    SA_TOL,
    DualPoint,
    dual_diagnostics,
    pi_d_gradient,
    pi_d_value,
    spectral_cache,
    x_of_dual,
    xi_gradient,
)
from .errors import InputError, NumericError, SingularityError
from .problem import check_separation, g_value, h_value, pi_value

logger = logging.getLogger(__name__)

GLOBAL_UNIQUE = "GlobalUnique"
NOT_CERTIFIED = "StationaryNotCertified"
NONE_FOUND = "NoneFound"


def default_seed_grid():
    lams = (0.1, 0.5, 1.0, 2.0, 5.0)
    mus = (0.5, 1.0, 2.0, 5.0, 10.0, 20.0)
    sigs = (-0.5, -0.1, -0.02, 0.02, 0.1, 0.5, 1.0)
    return tuple(DualPoint(*t) for t in itertools.product(lams, mus, sigs))


@dataclass(frozen=True)
class SolverConfig:
    grad_tol: float = 1e-10
    max_iter: int = 200
    seed_grid: tuple = field(default_factory=default_seed_grid)
    damping_shrink: float = 0.5
    min_step: float = 1e-14
    dedup_tol: float = 1e-6
    separation_m: int = 24
    check_separation: bool = True

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise InputError("grad_tol must be > 0")
        if self.max_iter < 1:
            raise InputError("max_iter must be >= 1")
        if len(self.seed_grid) == 0:
            raise InputError("seed grid is empty")
        if not 0 < self.damping_shrink < 1:
            raise InputError("damping_shrink must lie in (0, 1)")

    def with_overrides(self, overrides):
        """Apply ``{name: string value}`` overrides, e.g. from the command line."""
        known = {f.name: f for f in fields(self) if f.name != "seed_grid"}
        changes = {}
        for key, raw in overrides.items():
            if key not in known:
                raise InputError(f"unknown config key {key!r}")
            current = getattr(self, key)
            try:
                if isinstance(current, bool):
                    if raw.lower() not in ("true", "false", "1", "0"):
                        raise ValueError(raw)
                    changes[key] = raw.lower() in ("true", "1")
                else:
                    changes[key] = type(current)(raw)
            except ValueError:
                raise InputError(f"bad value for {key}: {raw!r}") from None
        return replace(self, **changes)


@dataclass
class StationaryPoint:
    dp: DualPoint
    grad_norm: float
    diagnostics: object
    x: object
    residuals: tuple
    pi: float
    pi_d: float
    iterations: int = 0


@dataclass
class TraceEntry:
    k: float
    f: np.ndarray
    status: str
    point: Optional[StationaryPoint]


@dataclass
class Certificate:
    status: str
    witness: Optional[StationaryPoint] = None
    stationary_points: list = field(default_factory=list)
    separation: object = None
    perturbation_trace: Optional[list] = None


def _stationary_point(inst, cache, dp, iterations=0):
    x = x_of_dual(inst, cache, dp)
    grad = xi_gradient(inst, x, dp)[-3:]
    return StationaryPoint(
        dp=DualPoint(*map(float, dp)),
        grad_norm=float(np.linalg.norm(grad)),
        diagnostics=dual_diagnostics(inst, cache, dp),
        x=x,
        residuals=(abs(h_value(inst, x.y)), abs(g_value(inst, x.z))),
        pi=pi_value(inst, x),
        pi_d=pi_d_value(inst, cache, dp),
        iterations=iterations,
    )


def _nudge_into_sa(inst, cache, p):
    # Moves sig so that every singular d_i shifts by roughly 10*SA_TOL.
    diag = dual_diagnostics(inst, cache, p)
    if diag.in_sa:
        return p
    lam, mu, sig = p
    a = diag.one_plus_lam_beta
    if mu != 0:
        sig = sig + 10 * SA_TOL / (mu * a[np.argmax(np.abs(a))])
    else:
        mu = 10 * SA_TOL
        sig = sig if sig != 0 else 1.0
    return np.array([lam, mu, sig])


class _BatchGradient:
    """Dual gradient for many dual points at once, evaluated in A's eigenbasis.

    Rows whose dual point lies outside S_a evaluate to NaN.
    """

    def __init__(self, inst, cache):
        self.inst = inst
        self.beta = cache.beta
        self.fh = cache.Q.T @ inst.f
        self.ch = cache.Q.T @ inst.c

    def d(self, P):
        a = 1.0 + P[:, :1] * self.beta
        return (1.0 + P[:, 1:2] * P[:, 2:3]) * a - 1.0

    def in_sa(self, P):
        return np.all(np.abs(self.d(P)) > SA_TOL, axis=1)

    def __call__(self, P):
        inst = self.inst
        lam, mu, sig = P[:, :1], P[:, 1:2], P[:, 2:3]
        a = 1.0 + lam * self.beta
        d = (1.0 + mu * sig) * a - 1.0
        bad = ~np.all(np.abs(d) > SA_TOL, axis=1)
        d = np.where(np.abs(d) > SA_TOL, d, np.nan)
        w = mu * (self.fh + sig * self.ch) / d
        dz = a * w - self.ch
        xi = 0.5 * np.sum(dz * dz, axis=1)
        lam, mu, sig = P[:, 0], P[:, 1], P[:, 2]
        out = np.empty_like(P)
        out[:, 0] = 0.5 * (np.sum(self.beta * w * w, axis=1) - inst.r**2)
        out[:, 1] = xi * sig - (sig * sig / (2 * inst.alpha) + inst.eta * sig) - dz @ self.fh
        out[:, 2] = mu * (xi - sig / inst.alpha - inst.eta)
        out[bad] = np.nan
        return out


def _fd_jacobian(fun, P):
    """Central-difference Jacobians, shape ``(S, 3, 3)``."""
    S = len(P)
    J = np.empty((S, 3, 3))
    for j in range(3):
        step = np.maximum(1e-7, 1e-7 * np.abs(P[:, j]))
        E = np.zeros_like(P)
        E[:, j] = step
        J[:, :, j] = (fun(P + E) - fun(P - E)) / (2 * step[:, None])
    return J


def _newton_batch(inst, cache, seeds, cfg):
    """Damped Newton from every seed simultaneously.

    Each row is iterated independently. Trial points must stay in S_a and
    keep the sign of every ``d_i``: crossing ``d_i = 0`` passes through a
    pole of the dual function, which the line search cannot see. A row stops when its gradient
    norm reaches ``grad_tol`` (converged), when backtracking falls below
    ``min_step`` (stalled) or when its residual becomes non-finite.
    Returns ``(P, status, iterations)`` with status 1 converged, 0 failed,
    -1 numeric failure.
    """
    grad = _BatchGradient(inst, cache)
    P = np.array([_nudge_into_sa(inst, cache, np.asarray(s, dtype=float)) for s in seeds], dtype=float)
    S = len(P)
    status = np.zeros(S, dtype=int)
    iters = np.zeros(S, dtype=int)
    active = np.ones(S, dtype=bool)
    G = grad(P)
    gn = np.linalg.norm(G, axis=1)
    active &= grad.in_sa(P)
    for it in range(cfg.max_iter + 1):
        iters[active] = it
        done = active & (gn <= cfg.grad_tol)
        status[done] = 1
        active &= ~done
        nonfinite = active & ~np.isfinite(gn)
        status[nonfinite] = -1
        active &= ~nonfinite
        if it == cfg.max_iter or not active.any():
            break
        idx = np.nonzero(active)[0]
        Pa, Ga = P[idx], G[idx]
        J = _fd_jacobian(grad, Pa)
        delta = np.empty_like(Pa)
        # A stencil crossing the singular set gives a NaN Jacobian; use a gradient step there.
        okJ = np.all(np.isfinite(J), axis=(1, 2))
        if okJ.any():
            delta[okJ] = -np.einsum("sij,sj->si", np.linalg.pinv(J[okJ]), Ga[okJ])
        delta[~okJ] = -Ga[~okJ]
        t = np.ones(len(idx))
        pending = np.all(np.isfinite(delta), axis=1)
        status[idx[~pending]] = -1
        active[idx[~pending]] = False
        while pending.any():
            sel = np.nonzero(pending)[0]
            trial = Pa[sel] + t[sel, None] * delta[sel]
            Gt = grad(trial)
            gtn = np.linalg.norm(Gt, axis=1)
            same_cell = np.all(np.sign(grad.d(trial)) == np.sign(grad.d(Pa[sel])), axis=1)
            accept = same_cell & np.isfinite(gtn) & (gtn < gn[idx[sel]])
            rows = idx[sel[accept]]
            P[rows], G[rows], gn[rows] = trial[accept], Gt[accept], gtn[accept]
            pending[sel[accept]] = False
            rej = sel[~accept]
            t[rej] *= cfg.damping_shrink
            stalled = rej[t[rej] < cfg.min_step]
            pending[stalled] = False
            active[idx[stalled]] = False
    return P, status, iters


def newton_solve(inst, cache, seed, cfg=None):
    """Damped Newton on the dual gradient from one seed.

    The Jacobian is a central finite-difference approximation; steps are
    halved until the gradient norm decreases and the iterate stays in
    S_a. Returns a :class:`StationaryPoint`, or None when the iteration
    stalls or runs out of iterations. Non-finite residuals raise
    :class:`NumericError`.
    """
    cfg = cfg or SolverConfig()
    cache = spectral_cache(inst) if cache is None else cache
    P, status, iters = _newton_batch(inst, cache, [seed], cfg)
    if status[0] < 0:
        raise NumericError(f"non-finite dual gradient from seed {tuple(seed)}")
    if status[0] == 0:
        return None
    return _stationary_point(inst, cache, P[0], int(iters[0]))


def _dedup(points, tol):
    kept = []
    for sp in sorted(points, key=lambda s: (s.pi_d, tuple(s.dp))):
        if all(np.linalg.norm(np.subtract(sp.dp, o.dp)) > tol for o in kept):
            kept.append(sp)
    return kept


def find_stationary_points(inst, cfg=None, cache=None, extra_seeds=()):
    """Run :func:`newton_solve` from every seed; deduplicated, sorted by dual value."""
    cfg = cfg or SolverConfig()
    cache = spectral_cache(inst) if cache is None else cache
    seeds = tuple(extra_seeds) + tuple(cfg.seed_grid)
    P, status, iters = _newton_batch(inst, cache, seeds, cfg)
    if np.any(status < 0):
        logger.debug("%d seed(s) hit non-finite residuals", int(np.sum(status < 0)))
    found = [_stationary_point(inst, cache, P[i], int(iters[i])) for i in np.nonzero(status == 1)[0]]
    return _dedup(found, cfg.dedup_tol)


class UniquenessViolation(RuntimeError):
    """Two certified stationary points recover different primal points."""


def solve_global(inst, cfg=None, extra_seeds=()):
    """Search for a dual stationary point that certifies the global minimizer."""
    cfg = cfg or SolverConfig()
    cache = spectral_cache(inst)
    separation = check_separation(inst, cfg.separation_m) if cfg.check_separation else None
    if separation is not None and not separation.ok:
        logger.warning("separation check: %s", separation.status)
    points = find_stationary_points(inst, cfg, cache, extra_seeds)
    certified = [sp for sp in points if sp.diagnostics.certifying]
    if certified:
        witness = certified[0]
        xw = np.concatenate(witness.x)
        for other in certified[1:]:
            if np.linalg.norm(np.concatenate(other.x) - xw) > cfg.dedup_tol:
                raise UniquenessViolation(
                    f"distinct certified stationary points {tuple(witness.dp)} and {tuple(other.dp)}"
                )
        return Certificate(GLOBAL_UNIQUE, witness, points, separation)
    if points:
        feasible = [sp for sp in points if sp.dp.mu != 0]
        best = min(feasible or points, key=lambda s: s.pi)
        return Certificate(NOT_CERTIFIED, best, points, separation)
    return Certificate(NONE_FOUND, None, points, separation)


def perturb_and_solve(inst, e=None, schedule=(1000, 10000, 100000), cfg=None):
    """Solve a sequence of instances with ``f`` replaced by ``f + e/k``.

    The witness of each run seeds the next one. The returned certificate
    carries the status of the last run and the full trace.
    """
    e = np.eye(inst.n)[-1] if e is None else np.asarray(e, dtype=float)
    if e.shape != (inst.n,):
        raise InputError(f"perturbation direction must have length {inst.n}")
    if not np.any(e):
        raise InputError("perturbation direction must be nonzero")
    schedule = [float(k) for k in schedule]
    if not schedule:
        raise InputError("schedule is empty")
    if any(k <= 0 for k in schedule) or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise InputError("schedule must be strictly increasing positive values")
    cfg = cfg or SolverConfig()
    trace = []
    cert = None
    warm = ()
    for k in schedule:
        fk = inst.f + e / k
        try:
            cert = solve_global(inst.replace(f=fk), cfg, extra_seeds=warm)
        except Exception as exc:  # a failed run is recorded, the schedule continues
            logger.warning("perturbed run k=%g failed: %s", k, exc)
            cert = Certificate(NONE_FOUND)
        trace.append(TraceEntry(k, fk, cert.status, cert.witness))
        if cert.witness is not None:
            warm = (cert.witness.dp,)
    return Certificate(cert.status, cert.witness, cert.stationary_points, cert.separation, trace)


@dataclass
class Lemma1Report:
    applicable: bool
    mu_zero: Optional[bool] = None
    lam_zero: Optional[bool] = None
    off_surface: Optional[bool] = None

    @property
    def consistent(self):
        if not self.applicable:
            return True
        flags = (self.mu_zero, self.lam_zero, self.off_surface)
        return all(flags) or not any(flags)


def verify_lemma1(inst, sp, tol=1e-8, stationary_tol=1e-6):
    """Check that ``mu = 0``, ``lam = 0`` and ``x`` off the feasible set agree.

    The check only applies to stationary points of the total complementary
    function; anything else is reported as not applicable.
    """
    grad = xi_gradient(inst, sp.x, sp.dp)
    if np.linalg.norm(grad) > stationary_tol:
        return Lemma1Report(applicable=False)
    residual = max(abs(h_value(inst, sp.x[0])), abs(g_value(inst, sp.x[1])))
    return Lemma1Report(
        applicable=True,
        mu_zero=abs(sp.dp[1]) <= tol,
        lam_zero=abs(sp.dp[0]) <= tol,
        off_surface=residual > 1e-6,
    )

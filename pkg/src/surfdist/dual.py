"""Canonical dual machinery.

Replacing the quartic part of ``g`` by ``Lambda(z)*sig - V*(sig)`` turns the
Lagrangian into the total complementary function

    Xi(x, lam, mu, sig) = |y - z|^2/2 + lam*h(y)
                          + mu*(Lambda(z)*sig - V*(sig) - f'(z - c)),

which is quadratic in ``x = (y, z)``. Its x-stationary point has the closed
form ``y = mu * G^{-1} (f + sig*c)``, ``z = (I + lam*A) y`` with
``G = (1 + mu*sig)(I + lam*A) - I``. Because ``G`` shares the eigenvectors
of ``A``, every inverse here is applied in the eigenbasis of ``A``.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConsistencyError, SingularityError
from .problem import PrimalPoint, h_value, lagrangian, pi_value, v_star_unchecked

logger = logging.getLogger(__name__)

SA_TOL = 1e-9


class DualPoint(NamedTuple):
    lam: float
    mu: float
    sig: float


@dataclass(frozen=True, eq=False)
class SpectralCache:
    """Eigendecomposition ``A = Q diag(beta) Q'`` with ascending ``beta``."""

    Q: np.ndarray
    beta: np.ndarray


def spectral_cache(inst):
    beta, Q = np.linalg.eigh(inst.A)
    if not np.all(np.isfinite(beta)) or beta[0] <= 0:
        raise ArithmeticError(f"eigendecomposition of A failed: beta = {beta}")
    Q.setflags(write=False)
    beta.setflags(write=False)
    return SpectralCache(Q, beta)


def _cache(inst, cache):
    return spectral_cache(inst) if cache is None else cache


@dataclass
class DualDiagnostics:
    """Scalar form of the matrix tests on ``I + lam*A`` and ``G``.

    ``d[i] = (1 + mu*sig)(1 + lam*beta[i]) - 1`` are the eigenvalues of
    ``G``; ``sig_in_domain`` records whether ``sig >= -alpha*eta``.

    ``certifying`` additionally requires ``mu > 0``. Only then is
    ``Xi(., lam, mu, sig) <= L(., lam, mu)``, which is what turns an S_a+
    stationary point into a global minimizer; S_a+ points with ``mu < 0``
    do occur and need not be global.
    """

    d: np.ndarray
    one_plus_lam_beta: np.ndarray
    in_sa: bool
    in_sa_plus: bool
    sig_in_domain: bool
    mu_positive: bool = False

    @property
    def certifying(self):
        return self.in_sa_plus and self.mu_positive

    @property
    def min_one_plus_lam_beta(self):
        return float(self.one_plus_lam_beta.min())


def dual_diagnostics(inst, cache, dp):
    cache = _cache(inst, cache)
    lam, mu, sig = dp
    a = 1.0 + lam * cache.beta
    d = (1.0 + mu * sig) * a - 1.0
    in_sa = bool(np.all(np.abs(d) > SA_TOL))
    in_sa_plus = bool(in_sa and a.min() > SA_TOL and d.min() > SA_TOL)
    return DualDiagnostics(
        d, a, in_sa, in_sa_plus, bool(sig >= -inst.alpha * inst.eta), bool(mu > SA_TOL)
    )


def apply_g(inst, dp, v):
    """Multiply by ``G = (1 + mu*sig)(I + lam*A) - I`` directly (no eigenbasis)."""
    lam, mu, sig = dp
    v = np.asarray(v, dtype=float)
    return (1.0 + mu * sig) * (v + lam * (inst.A @ v)) - v


def solve_g(inst, cache, dp, v):
    """Apply ``G^{-1}`` through the eigenbasis of ``A``."""
    cache = _cache(inst, cache)
    diag = dual_diagnostics(inst, cache, dp)
    if not diag.in_sa:
        raise SingularityError("G is singular", diag.d)
    Q = cache.Q
    return Q @ ((Q.T @ np.asarray(v, dtype=float)) / diag.d)


def x_of_dual(inst, cache, dp):
    """Primal point recovered from a dual point in S_a."""
    cache = _cache(inst, cache)
    lam, mu, sig = dp
    diag = dual_diagnostics(inst, cache, dp)
    if not diag.in_sa:
        raise SingularityError("dual point outside S_a", diag.d)
    Q = cache.Q
    w = mu * (Q.T @ (inst.f + sig * inst.c)) / diag.d
    y = Q @ w
    z = Q @ (diag.one_plus_lam_beta * w)
    return PrimalPoint(y, z)


def xi_value(inst, x, dp):
    lam, mu, sig = dp
    y, z = x
    if not sig >= -inst.alpha * inst.eta:
        logger.debug("sigma=%g below -alpha*eta; V* evaluated outside its domain", sig)
    dz = np.asarray(z, dtype=float) - inst.c
    coupling = 0.5 * (dz @ dz) * sig - v_star_unchecked(inst, sig) - inst.f @ dz
    return pi_value(inst, x) + lam * h_value(inst, y) + mu * coupling


def xi_gradient(inst, x, dp):
    """Full gradient of Xi with respect to ``(y, z, lam, mu, sig)``."""
    lam, mu, sig = dp
    y = np.asarray(x[0], dtype=float)
    z = np.asarray(x[1], dtype=float)
    dz = z - inst.c
    xi = 0.5 * (dz @ dz)
    gy = y - z + lam * (inst.A @ y)
    gz = z - y + mu * sig * dz - mu * inst.f
    g_lam = h_value(inst, y)
    g_mu = xi * sig - v_star_unchecked(inst, sig) - inst.f @ dz
    g_sig = mu * (xi - sig / inst.alpha - inst.eta)
    return np.concatenate([gy, gz, [g_lam, g_mu, g_sig]])


def pi_d_value(inst, cache, dp):
    return xi_value(inst, x_of_dual(inst, cache, dp), dp)


def pi_d_gradient(inst, cache, dp):
    """Gradient of the dual function.

    At ``x = x(dp)`` the x-gradient of Xi vanishes, so the partial
    derivatives of Xi in ``(lam, mu, sig)`` are the total derivatives of
    the dual function.
    """
    x = x_of_dual(inst, cache, dp)
    return xi_gradient(inst, x, dp)[-3:]


def xi_hessian_x(inst, dp, cache=None):
    """Block Hessian ``[[I + lam*A, -I], [-I, (1 + mu*sig) I]]`` and its PD flag.

    Positive definiteness is decided twice: from the scalar criterion on
    ``1 + lam*beta`` and ``d``, and from the smallest eigenvalue of the
    assembled matrix. A disagreement that is not explained by a margin
    near zero raises :class:`ConsistencyError`.
    """
    cache = _cache(inst, cache)
    lam, mu, sig = dp
    n = inst.n
    eye = np.eye(n)
    H = np.block([[eye + lam * inst.A, -eye], [-eye, (1.0 + mu * sig) * eye]])
    scalar_pd = dual_diagnostics(inst, cache, dp).in_sa_plus
    min_eig = np.linalg.eigvalsh(H)[0]
    direct_pd = bool(min_eig > 0)
    if scalar_pd != direct_pd and abs(min_eig) > 1e-8 * max(1.0, np.abs(H).max()):
        raise ConsistencyError(
            f"PD tests disagree at {tuple(dp)}: scalar={scalar_pd}, min eigenvalue={min_eig}"
        )
    return H, scalar_pd


@dataclass
class GapReport:
    pi: float
    lagrangian: float
    xi: float
    pi_d: float

    @property
    def max_gap(self):
        vals = (self.pi, self.lagrangian, self.xi, self.pi_d)
        return max(abs(a - b) for a in vals for b in vals)


def duality_gap(inst, x, dp, cache=None):
    """Compare the primal, Lagrangian, complementary and dual values."""
    lam, mu, _ = dp
    return GapReport(
        pi=pi_value(inst, x),
        lagrangian=lagrangian(inst, x, lam, mu),
        xi=xi_value(inst, x, dp),
        pi_d=pi_d_value(inst, cache, dp),
    )

"""Primal problem data and functions.

The problem is to find the closest pair of points between the ellipsoid

    Y = {y : h(y) = 0},   h(y) = (y'Ay - r^2) / 2

and the (generally non-convex) quartic surface

    Z = {z : g(z) = 0},   g(z) = alpha/2 (|z - c|^2/2 - eta)^2 - f'(z - c),

i.e. to minimize ``0.5 * |y - z|^2`` over ``Y x Z``.
"""

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, InputError

SYM_TOL = 1e-10

_INSTANCE_FIELDS = ("n", "A", "r", "alpha", "eta", "f", "c")


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """The data ``(A, r, alpha, eta, f, c)`` of a minimal-distance problem.

    Arrays are copied and made read-only on construction, so an instance
    can be shared freely.
    """

    A: np.ndarray
    r: float
    alpha: float
    eta: float
    f: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 2:
            raise InputError(f"A must be a square matrix of size >= 2, got shape {A.shape}")
        n = A.shape[0]
        f = np.asarray(self.f, dtype=float)
        c = np.asarray(self.c, dtype=float)
        if f.shape != (n,):
            raise InputError(f"f must have length {n}, got shape {f.shape}")
        if c.shape != (n,):
            raise InputError(f"c must have length {n}, got shape {c.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(f)) and np.all(np.isfinite(c))):
            raise InputError("instance data must be finite")
        scale = max(1.0, float(np.max(np.abs(A))))
        if np.max(np.abs(A - A.T)) > SYM_TOL * scale:
            raise InputError("A is not symmetric")
        if np.linalg.eigvalsh(A)[0] <= 0:
            raise InputError("A is not positive definite")
        for name in ("r", "alpha", "eta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InputError(f"{name} must be a positive number, got {value!r}")
            object.__setattr__(self, name, float(value))
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "f", _frozen(f))
        object.__setattr__(self, "c", _frozen(c))

    @property
    def n(self):
        return self.A.shape[0]

    def replace(self, **changes):
        data = dict(A=self.A, r=self.r, alpha=self.alpha, eta=self.eta, f=self.f, c=self.c)
        data.update(changes)
        return ProblemInstance(**data)

    def to_dict(self):
        return {
            "n": self.n,
            "A": self.A.tolist(),
            "r": self.r,
            "alpha": self.alpha,
            "eta": self.eta,
            "f": self.f.tolist(),
            "c": self.c.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        """Build an instance from the JSON instance format.

        Unknown fields and missing fields are rejected, and ``n`` must
        agree with the shapes of ``A``, ``f`` and ``c``.
        """
        if not isinstance(data, dict):
            raise InputError("instance document must be a JSON object")
        unknown = sorted(set(data) - set(_INSTANCE_FIELDS))
        if unknown:
            raise InputError(f"unknown field(s): {', '.join(unknown)}")
        missing = [k for k in _INSTANCE_FIELDS if k not in data]
        if missing:
            raise InputError(f"missing field(s): {', '.join(missing)}")
        n = data["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise InputError(f"field 'n': expected an integer >= 2, got {n!r}")
        A = _numeric_field(data, "A")
        if A.shape != (n, n):
            raise InputError(f"field 'A': expected {n} rows of {n} numbers")
        vectors = {}
        for name in ("f", "c"):
            vectors[name] = _numeric_field(data, name)
            if vectors[name].shape != (n,):
                raise InputError(f"field '{name}': expected {n} numbers")
        scalars = {}
        for name in ("r", "alpha", "eta"):
            value = data[name]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise InputError(f"field '{name}': expected a number, got {value!r}")
            scalars[name] = float(value)
        try:
            return cls(A=A, f=vectors["f"], c=vectors["c"], **scalars)
        except InputError as exc:
            raise InputError(f"invalid instance: {exc}") from None


def _numeric_field(data, name):
    try:
        arr = np.array(data[name], dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"field '{name}': expected numbers") from None
    return arr


def load_instance(path):
    """Read an instance file; JSON syntax errors are reported with line/column."""
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return ProblemInstance.from_dict(data)


def save_instance(inst, path):
    with open(path, "w") as fh:
        json.dump(inst.to_dict(), fh, indent=2)
        fh.write("\n")


class PrimalPoint(NamedTuple):
    y: np.ndarray
    z: np.ndarray


def _vec(inst, v, name):
    v = np.asarray(v, dtype=float)
    if v.shape != (inst.n,):
        raise InputError(f"{name} must have length {inst.n}, got shape {v.shape}")
    return v


def h_value(inst, y):
    y = _vec(inst, y, "y")
    return 0.5 * (y @ inst.A @ y - inst.r**2)


def lambda_op(inst, z):
    """Geometric operator ``0.5 * |z - c|^2``."""
    dz = _vec(inst, z, "z") - inst.c
    return 0.5 * (dz @ dz)


def w_value(inst, z):
    return v_value(inst, lambda_op(inst, z))


def g_value(inst, z):
    z = _vec(inst, z, "z")
    xi = lambda_op(inst, z)
    return 0.5 * inst.alpha * (xi - inst.eta) ** 2 - inst.f @ (z - inst.c)


def pi_value(inst, x):
    y, z = x
    d = _vec(inst, y, "y") - _vec(inst, z, "z")
    return 0.5 * (d @ d)


def lagrangian(inst, x, lam, mu):
    y, z = x
    return pi_value(inst, x) + lam * h_value(inst, y) + mu * g_value(inst, z)


def grad_h(inst, y):
    return inst.A @ _vec(inst, y, "y")


def grad_g(inst, z):
    z = _vec(inst, z, "z")
    dz = z - inst.c
    return inst.alpha * (0.5 * (dz @ dz) - inst.eta) * dz - inst.f


# Canonical function V(xi) = alpha/2 (xi - eta)^2 on xi >= 0 and its
# Legendre conjugate on sig >= -alpha*eta.


def _check_xi(xi):
    if not xi >= 0:
        raise DomainError("xi must be >= 0", xi)


def _check_sig(inst, sig):
    if not sig >= -inst.alpha * inst.eta:
        raise DomainError(f"sigma must be >= -alpha*eta = {-inst.alpha * inst.eta}", sig)


def v_value(inst, xi):
    _check_xi(xi)
    return 0.5 * inst.alpha * (xi - inst.eta) ** 2


def dv(inst, xi):
    _check_xi(xi)
    return inst.alpha * (xi - inst.eta)


def v_star(inst, sig):
    _check_sig(inst, sig)
    return v_star_unchecked(inst, sig)


def dv_star(inst, sig):
    _check_sig(inst, sig)
    return sig / inst.alpha + inst.eta


def v_star_unchecked(inst, sig):
    """``V*`` without the domain check, for dual evaluations that only log violations."""
    return sig * sig / (2.0 * inst.alpha) + inst.eta * sig


@dataclass
class SeparationReport:
    """Outcome of :func:`check_separation`.

    ``status`` is one of ``"analytically certified"``, ``"numerically
    plausible"``, ``"violated"`` or ``"undetermined"`` (no point of Z
    could be sampled). ``analytic`` is None when the sufficient condition
    does not apply (``c != 0``).
    """

    status: str
    analytic: Optional[bool]
    min_h_on_z: Optional[float] = None
    n_samples: int = 0
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return self.status in ("analytically certified", "numerically plausible")


def analytic_separation(inst):
    """Sufficient condition for ``h > 0`` on Z when ``c = 0``; None otherwise.

    With ``rho = r / sqrt(beta_min)`` every point outside the ball of
    radius ``rho`` is outside the ellipsoid. If ``|z| <= rho`` and
    ``eta > rho^2/2`` then ``g(z) = 0`` forces
    ``alpha/2 (eta - rho^2/2)^2 <= |f| rho``, so ``Y`` and ``Z`` are
    disjoint as soon as ``|f| < alpha/2 (rho^2/2 - eta)^2 / rho``. For
    ``A = I`` and ``alpha = 1`` this is the familiar
    ``eta > r^2/2``, ``|f| < (r^2/2 - eta)^2 / (2r)``.
    """
    if np.any(inst.c != 0):
        return None
    rho = inst.r / math.sqrt(np.linalg.eigvalsh(inst.A)[0])
    bound = 0.5 * inst.alpha * (0.5 * rho**2 - inst.eta) ** 2 / rho
    return bool(inst.eta > 0.5 * rho**2 and np.linalg.norm(inst.f) < bound)


def check_separation(inst, m=32, seed=0):
    """Check that every point of Z lies strictly outside the ellipsoid.

    The analytic condition is tried first; the sampled check (minimum of
    ``h`` over a direction-grid sample of Z with ``m`` directions per
    angular dimension) runs regardless and is reported alongside.
    """
    from .oracle import sample_surface_z

    analytic = analytic_separation(inst)
    sample = sample_surface_z(inst, m, seed=seed)
    pts = sample.points
    notes = []
    if analytic is None:
        notes.append("analytic condition requires c = 0")
    if len(pts) == 0:
        notes.append("no radial roots found in any sampled direction")
        status = "analytically certified" if analytic else "undetermined"
        return SeparationReport(status, analytic, None, 0, notes)
    hz = 0.5 * (np.einsum("ij,jk,ik->i", pts, inst.A, pts) - inst.r**2)
    min_h = float(hz.min())
    if analytic:
        status = "analytically certified"
    elif min_h > 0:
        status = "numerically plausible"
    else:
        status = "violated"
    return SeparationReport(status, analytic, min_h, len(pts), notes)

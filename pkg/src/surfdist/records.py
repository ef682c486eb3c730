"""Machine-readable result records.

Records are JSON with sorted keys and floats printed with 17 significant
digits, so parsing a record and emitting it again reproduces it byte for
byte.
"""

import json
import math

import numpy as np


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(k))}: {_encode(obj[k], indent, level + 1)}" for k in sorted(obj)
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    return json.dumps(obj)


def dumps_record(obj, indent=2):
    return _encode(obj, indent, 0) + "\n"


def _vec(v):
    return [float(t) for t in v]


def stationary_record(sp):
    if sp is None:
        return {
            "dual_point": None,
            "x_bar": None,
            "pi": None,
            "pi_d": None,
            "grad_norm": None,
            "diagnostics": None,
            "residuals": None,
        }
    diag = sp.diagnostics
    return {
        "dual_point": {"lam": sp.dp.lam, "mu": sp.dp.mu, "sig": sp.dp.sig},
        "x_bar": {"y": _vec(sp.x.y), "z": _vec(sp.x.z)},
        "pi": sp.pi,
        "pi_d": sp.pi_d,
        "grad_norm": sp.grad_norm,
        "diagnostics": {
            "d": _vec(diag.d),
            "in_sa": diag.in_sa,
            "in_sa_plus": diag.in_sa_plus,
        },
        "residuals": {"h": float(sp.residuals[0]), "g": float(sp.residuals[1])},
    }


def certificate_record(cert):
    rec = {"status": cert.status}
    rec.update(stationary_record(cert.witness))
    if cert.separation is not None:
        rec["separation"] = {"status": cert.separation.status, "min_h_on_z": cert.separation.min_h_on_z}
    if cert.perturbation_trace is not None:
        rec["perturbation_trace"] = [trace_record(e) for e in cert.perturbation_trace]
    return rec


def trace_record(entry):
    rec = {"k": float(entry.k), "f": _vec(entry.f), "status": entry.status}
    point = stationary_record(entry.point)
    rec["dual_point"] = point["dual_point"]
    rec["x_bar"] = point["x_bar"]
    rec["pi"] = point["pi"]
    return rec

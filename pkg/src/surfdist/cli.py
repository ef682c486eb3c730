"""Command-line interface.

    surfdist solve|verify|perturb|oracle|sample --instance PATH
             [--config KEY=VALUE]... [--out PATH] [--format json|text|csv]
             [--seed INT]

``perturb`` also takes ``--direction v1,v2,...`` and ``--schedule k1,k2,...``.

Exit codes: 0 success (GlobalUnique for solve/perturb), 1 input error,
2 StationaryNotCertified, 3 NoneFound, 4 a verification check failed.
"""

import argparse
import contextlib
import csv
import logging
import sys
from dataclasses import fields

import numpy as np

from . import oracle
from .dual import duality_gap, spectral_cache, xi_hessian_x
from .errors import ConsistencyError, InputError
from .problem import check_separation, load_instance
from .records import certificate_record, dumps_record, trace_record
from .solver import (
    GLOBAL_UNIQUE,
    NONE_FOUND,
    NOT_CERTIFIED,
    SolverConfig,
    perturb_and_solve,
    solve_global,
    verify_lemma1,
)

logger = logging.getLogger("surfdist")

EXIT_OK, EXIT_INPUT, EXIT_NOT_CERTIFIED, EXIT_NONE, EXIT_CHECK = 0, 1, 2, 3, 4
STATUS_EXIT = {GLOBAL_UNIQUE: EXIT_OK, NOT_CERTIFIED: EXIT_NOT_CERTIFIED, NONE_FOUND: EXIT_NONE}

ORACLE_KEYS = {"m": int, "polish": lambda s: s.lower() in ("1", "true")}
MAX_ORACLE_DIM = 4


def _g7(x):
    return format(float(x), ".7g")


def _vec7(v):
    return "(" + ", ".join(_g7(t) for t in v) + ")"


def _parse_floats(text, what):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    return vals


def _split_config(pairs):
    solver_keys = {f.name for f in fields(SolverConfig) if f.name != "seed_grid"}
    solver, extra = {}, {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise InputError(f"--config expects KEY=VALUE, got {pair!r}")
        if key in solver_keys:
            solver[key] = value
        elif key in ORACLE_KEYS:
            try:
                extra[key] = ORACLE_KEYS[key](value)
            except ValueError:
                raise InputError(f"bad value for {key}: {value!r}") from None
        else:
            raise InputError(f"unknown config key {key!r}")
    return SolverConfig().with_overrides(solver), extra


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _solve_text(cert):
    lines = [f"status: {cert.status}"]
    if cert.separation is not None:
        lines.append(f"separation: {cert.separation.status}")
    sp = cert.witness
    if sp is not None:
        lines += [
            f"dual point (lam, mu, sig): {_vec7(sp.dp)}",
            f"y: {_vec7(sp.x.y)}",
            f"z: {_vec7(sp.x.z)}",
            f"Pi: {_g7(sp.pi)}   Pi_d: {_g7(sp.pi_d)}   |grad|: {_g7(sp.grad_norm)}",
            f"residuals |h|, |g|: {_g7(sp.residuals[0])}, {_g7(sp.residuals[1])}",
            f"in S_a: {sp.diagnostics.in_sa}   in S_a+: {sp.diagnostics.in_sa_plus}",
        ]
    return "\n".join(lines) + "\n"


def cmd_solve(args):
    inst = load_instance(args.instance)
    cfg, _ = _split_config(args.config)
    if args.format == "csv":
        raise InputError("solve supports --format json or text")
    cert = solve_global(inst, cfg)
    with _output(args.out) as out:
        if args.format == "json":
            out.write(dumps_record(certificate_record(cert)))
        else:
            out.write(_solve_text(cert))
    return STATUS_EXIT[cert.status]


def cmd_perturb(args):
    inst = load_instance(args.instance)
    cfg, _ = _split_config(args.config)
    direction = None
    if args.direction is not None:
        direction = _parse_floats(args.direction, "--direction")
    if args.schedule is None:
        raise InputError("perturb requires --schedule")
    schedule = _parse_floats(args.schedule, "--schedule")
    if not schedule:
        raise InputError("--schedule is empty")
    cert = perturb_and_solve(inst, direction, schedule, cfg)
    rows = [trace_record(e) for e in cert.perturbation_trace]
    with _output(args.out) as out:
        if args.format == "json":
            out.write(dumps_record(certificate_record(cert)))
        elif args.format == "csv":
            n = inst.n
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(
                ["k", "status", "lam", "mu", "sig"]
                + [f"y{i + 1}" for i in range(n)]
                + [f"z{i + 1}" for i in range(n)]
            )
            for row in rows:
                dp, xb = row["dual_point"], row["x_bar"]
                vals = [dp["lam"], dp["mu"], dp["sig"], *xb["y"], *xb["z"]] if dp else [""] * (3 + 2 * n)
                writer.writerow([format(row["k"], "g"), row["status"]] + [repr(v) for v in vals])
        else:
            out.write(f"{'k':>10}  {'lam':>10} {'mu':>10} {'sig':>11}  y / z\n")
            for row in rows:
                dp, xb = row["dual_point"], row["x_bar"]
                if dp is None:
                    out.write(f"{row['k']:>10g}  {row['status']}\n")
                    continue
                out.write(
                    f"{row['k']:>10g}  {_g7(dp['lam']):>10} {_g7(dp['mu']):>10} {_g7(dp['sig']):>11}"
                    f"  y={_vec7(xb['y'])} z={_vec7(xb['z'])}  [{row['status']}]\n"
                )
    return STATUS_EXIT[cert.status]


def _check_oracle_dim(inst):
    if inst.n > MAX_ORACLE_DIM:
        raise InputError(
            f"brute-force oracle is limited to n <= {MAX_ORACLE_DIM} (n = {inst.n}); refusing"
        )


def cmd_sample(args):
    inst = load_instance(args.instance)
    _, extra = _split_config(args.config)
    _check_oracle_dim(inst)
    m = extra.get("m", 64)
    ys = oracle.sample_surface_y(inst, None, m, args.seed)
    zs = oracle.sample_surface_z(inst, m, args.seed)
    with _output(args.out) as out:
        if args.format == "json":
            out.write(
                dumps_record(
                    {
                        "Y": {"points": ys.points.tolist(), "residual_bound": ys.residual_bound},
                        "Z": {"points": zs.points.tolist(), "residual_bound": zs.residual_bound},
                    }
                )
            )
        elif args.format == "csv":
            oracle.write_samples_csv(out, inst, ys, zs)
        else:
            out.write(
                f"Y: {len(ys.points)} points, max |h| = {_g7(ys.residual_bound)}\n"
                f"Z: {len(zs.points)} points, max |g| = {_g7(zs.residual_bound)}\n"
            )
    return EXIT_OK


def _oracle_record(res):
    return {
        "distance": res.distance,
        "pi": res.pi,
        "best_pair": {"y": res.best_pair.y.tolist(), "z": res.best_pair.z.tolist()},
        "resolution": res.resolution,
        "spacing": res.spacing,
        "local_minima": [
            {
                "pi": lm.pi,
                "y": lm.x.y.tolist(),
                "z": lm.x.z.tolist(),
                "lam": lm.lam,
                "mu": lm.mu,
                "constraint_residual": lm.constraint_residual,
                "tangent_residual": lm.tangent_residual,
            }
            for lm in res.local_minima
        ],
    }


def cmd_oracle(args):
    inst = load_instance(args.instance)
    _, extra = _split_config(args.config)
    _check_oracle_dim(inst)
    res = oracle.brute_force_min(inst, extra.get("m", 96), extra.get("polish", True), args.seed)
    with _output(args.out) as out:
        if args.format == "json":
            out.write(dumps_record(_oracle_record(res)))
        elif args.format == "csv":
            writer = csv.writer(out, lineterminator="\n")
            n = inst.n
            writer.writerow(["pi"] + [f"y{i + 1}" for i in range(n)] + [f"z{i + 1}" for i in range(n)])
            for lm in res.local_minima:
                writer.writerow([repr(float(v)) for v in (lm.pi, *lm.x.y, *lm.x.z)])
        else:
            out.write(f"min distance: {_g7(res.distance)}   Pi: {_g7(res.pi)}   (m = {res.resolution})\n")
            out.write(f"best pair: y={_vec7(res.best_pair.y)} z={_vec7(res.best_pair.z)}\n")
            for lm in res.local_minima:
                out.write(f"  local minimum Pi={_g7(lm.pi)} y={_vec7(lm.x.y)} z={_vec7(lm.x.z)}\n")
    return EXIT_OK


def run_checks(inst, cfg, m=96, seed=0):
    """All verification checks as ``(name, passed, detail)`` triples.

    Raises :class:`InputError` when the separation precondition fails.
    """
    sep = check_separation(inst, cfg.separation_m, seed)
    if not sep.ok:
        raise InputError(f"separation precondition not met: {sep.status} (min h on Z = {sep.min_h_on_z})")
    cert = solve_global(inst, cfg)
    checks = []

    cache = spectral_cache(inst)
    Q, beta = cache.Q, cache.beta
    recon = np.abs(inst.A - (Q * beta) @ Q.T).max()
    orth = np.abs(Q.T @ Q - np.eye(inst.n)).max()
    checks.append(
        (
            "spectral",
            recon <= 1e-8 * max(1.0, np.abs(inst.A).max()) and orth <= 1e-10,
            f"beta={_vec7(beta)} recon={recon:.1e}",
        )
    )

    worst_gap, lemma_ok, pd_ok = 0.0, True, True
    for sp in cert.stationary_points:
        gap = duality_gap(inst, sp.x, sp.dp, cache)
        worst_gap = max(worst_gap, gap.max_gap / max(1.0, abs(gap.pi)))
        lemma_ok &= verify_lemma1(inst, sp).consistent
        try:
            xi_hessian_x(inst, sp.dp, cache)
        except ConsistencyError:
            pd_ok = False
    checks.append(("complementary_dual", worst_gap <= 1e-6, f"max relative gap {worst_gap:.1e}"))
    checks.append(("lemma1", lemma_ok, f"{len(cert.stationary_points)} stationary point(s)"))
    checks.append(("pd_criterion", pd_ok, "scalar vs direct Hessian test"))

    sp = cert.witness
    if sp is not None:
        kkt = oracle.kkt_check(inst, sp.x, sp.dp.lam, sp.dp.mu, 1e-6)
        checks.append(("kkt", kkt.ok, f"stationarity {kkt.stationarity:.1e}"))
    if inst.n <= MAX_ORACLE_DIM:
        res = oracle.brute_force_min(inst, m, True, seed)
        if cert.status == GLOBAL_UNIQUE:
            dx = np.linalg.norm(np.concatenate(res.best_pair) - np.concatenate(sp.x))
            ok = res.pi >= sp.pi - 1e-6 and dx <= 1e-4
            ok &= all(lm.pi >= sp.pi - 1e-6 for lm in res.local_minima)
            checks.append(("oracle", ok, f"oracle Pi={_g7(res.pi)} certified Pi={_g7(sp.pi)} |dx|={dx:.1e}"))
        else:
            checks.append(("oracle", True, f"no certificate; oracle Pi={_g7(res.pi)}"))
    return cert, checks


def cmd_verify(args):
    inst = load_instance(args.instance)
    cfg, extra = _split_config(args.config)
    cert, checks = run_checks(inst, cfg, extra.get("m", 96), args.seed)
    with _output(args.out) as out:
        if args.format == "json":
            rec = {
                "status": cert.status,
                "checks": [{"name": n, "passed": bool(p), "detail": d} for n, p, d in checks],
            }
            out.write(dumps_record(rec))
        else:
            out.write(f"status: {cert.status}\n")
            for name, passed, detail in checks:
                out.write(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}\n")
    failed = [name for name, passed, _ in checks if not passed]
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "perturb": cmd_perturb,
    "oracle": cmd_oracle,
    "sample": cmd_sample,
}


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage, which collides with
    # StationaryNotCertified; usage errors map to exit 1 instead.
    def error(self, message):
        raise _ArgumentError(message)


def build_parser():
    parser = _Parser(prog="surfdist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--instance", required=True)
        p.add_argument("--config", action="append", default=[], metavar="KEY=VALUE")
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "text", "csv"), default="text")
        p.add_argument("--seed", type=int, default=0)
        if name == "perturb":
            p.add_argument("--direction")
            p.add_argument("--schedule")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
        return COMMANDS[args.command](args)
    except _ArgumentError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

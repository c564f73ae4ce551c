"""Command-line front end: seeded experiment drivers with CSV/JSON output.

Every subcommand is deterministic for a fixed seed and configuration; CSV
uses comma delimiters, '.' decimal points, LF line endings, and UTF-8.
Exit codes: 0 success, 1 audit-violation findings, 2 usage or I/O errors.
Each flag can also be set through an ENTMONO_* environment variable (e.g.
ENTMONO_SAMPLES); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .measures import (
    MEASURE_EOF,
    MEASURE_TANGLE,
    RoofConfig,
    eof_from_tangle,
)
from .monogamy import (
    MonogamyRecord,
    alpha_fit,
    ckw_mixed,
    count_alpha_violations,
    empirical_c,
    equality_audit,
    formation_bound,
    monotonicity_audit,
    regularised_bound_arith,
    sample_pure_records,
    triple_eof,
)
from .states import ginibre_random_density, haar_random_pure, named_state
from .teleport import teleport

SCHEMA_VERSION = 1
ENV_PREFIX = "ENTMONO_"


def _env(name: str, cast, fallback):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError as exc:
        raise SystemExit(f"entmono: bad value for {ENV_PREFIX}{name}: {raw!r} ({exc})")


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_text(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _emit_json(path: str | None, payload: dict) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _emit_csv(path: str | None, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(row) for row in rows)
    _write_text(path, "\n".join(lines) + "\n")


def _record_dict(index: int, r) -> dict:
    return {
        "index": index,
        "seed": r.state_seed,
        "measure": r.measure_id,
        "e_abc": r.e_abc,
        "e_ab": r.e_ab,
        "e_ac": r.e_ac,
        "residual": r.residual,
    }


def cmd_region(args) -> int:
    records = sample_pure_records(args.measure, args.samples, args.seed)
    if args.format == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "measure": args.measure,
            "samples": args.samples,
            "seed": args.seed,
            "records": [_record_dict(i, r) for i, r in enumerate(records)],
        }
        _emit_json(args.out, payload)
    else:
        rows = (
            [str(i), str(r.state_seed), r.measure_id,
             _fmt(r.e_abc), _fmt(r.e_ab), _fmt(r.e_ac), _fmt(r.residual)]
            for i, r in enumerate(records)
        )
        _emit_csv(args.out, "index,seed,measure,e_abc,e_ab,e_ac,residual", rows)
    return 0


def cmd_curve(args) -> int:
    if args.curve == "eof_vs_csq":
        grid = np.linspace(0.0, 1.0, args.grid_points)
        values = eof_from_tangle(grid)
        rows = ([_fmt(c), _fmt(v)] for c, v in zip(grid, values))
        _emit_csv(args.out, "c_squared,e_f", rows)
        return 0
    # Level set of (x^a + y^a)^(1/a) = 1 for each alpha, traced by x.
    alphas = [float(a) for a in args.alphas.split(",") if a.strip()]
    if not alphas or any(a <= 0 for a in alphas):
        raise SystemExit("entmono: --alphas must be a comma list of positive reals")
    xs = np.linspace(0.0, 1.0, args.grid_points)
    rows = []
    for alpha in alphas:
        ys = np.clip(1.0 - xs ** alpha, 0.0, 1.0) ** (1.0 / alpha)
        rows.extend([_fmt(alpha), _fmt(x), _fmt(y)] for x, y in zip(xs, ys))
    _emit_csv(args.out, "alpha,e_ab,e_ac", rows)
    return 0


def cmd_counterexample(args) -> int:
    record = triple_eof(named_state("counterexample"), tag="counterexample")
    payload = {
        "schema_version": SCHEMA_VERSION,
        "state": "counterexample",
        "e_abc": record.e_abc,
        "e_ab": record.e_ab,
        "e_ac": record.e_ac,
        "residual": record.residual,
        "violates_additive_bound": record.e_ab + record.e_ac > record.e_abc,
    }
    _emit_json(args.out, payload)
    return 0


def cmd_alpha_fit(args) -> int:
    records = sample_pure_records(args.measure, args.samples, args.seed)
    report = alpha_fit(records, alpha_cap=args.alpha_cap)
    fresh_seed = args.seed + args.samples
    fresh = sample_pure_records(args.measure, args.validate_samples, fresh_seed)
    fresh_violations = count_alpha_violations(fresh, report.alpha_min)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "measure": args.measure,
        "samples": args.samples,
        "seed": args.seed,
        "alpha_cap": args.alpha_cap,
        "alpha_min": report.alpha_min if report.finite else None,
        "finite": report.finite,
        "skipped": report.skipped,
        "infinite": report.infinite,
        "fit_violations": report.validation_violations,
        "validation": {
            "samples": args.validate_samples,
            "seed": fresh_seed,
            "violations": fresh_violations,
        },
        "per_record_alphas": [a if math.isfinite(a) else None for a in report.alphas],
    }
    _emit_json(args.out, payload)
    return 0 if report.finite and fresh_violations == 0 else 1


def cmd_equality_audit(args) -> int:
    records = sample_pure_records(args.measure, args.samples, args.seed)
    candidates = equality_audit(records, args.epsilon, args.delta)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "measure": args.measure,
        "samples": args.samples,
        "seed": args.seed,
        "epsilon": args.epsilon,
        "delta": args.delta,
        "candidate_count": len(candidates),
        "candidates": [_record_dict(i, r) for i, r in enumerate(candidates)],
    }
    _emit_json(args.out, payload)
    return 0 if not candidates else 1


def cmd_bounds(args) -> int:
    if args.triple is not None:
        e_abc, e_ab, e_ac = args.triple
        c = args.c if args.c is not None else 0.0
        if args.exponent == 4:
            check = regularised_bound_arith(e_abc, e_ab, e_ac, args.dims, c)
        else:
            record = MonogamyRecord(e_abc, e_ab, e_ac, e_abc - e_ab - e_ac,
                                    MEASURE_EOF, "cli")
            check = formation_bound(record, args.dims, c)
        payload = {
            "schema_version": SCHEMA_VERSION,
            "mode": "arithmetic",
            "e_abc": e_abc,
            "e_ab": e_ab,
            "e_ac": e_ac,
            "dims": list(args.dims),
            "c": c,
            "exponent": args.exponent,
            "passed": check.passed,
            "slack": check.slack,
        }
        _emit_json(args.out, payload)
        return 0 if check.passed else 1

    records = sample_pure_records(MEASURE_EOF, args.samples, args.seed)
    c_used = args.c
    report = empirical_c(records, args.dims, exponent=args.exponent, c=c_used)
    if c_used is None:
        c_used = report.c_empirical
        report = empirical_c(records, args.dims, exponent=args.exponent, c=c_used)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "mode": "sampled",
        "measure": MEASURE_EOF,
        "samples": args.samples,
        "seed": args.seed,
        "dims": list(report.dims),
        "exponent": report.exponent,
        "c": c_used,
        "c_empirical": report.c_empirical,
        "violations": report.violations,
        "excluded_zero_e_ab": report.excluded_zero_e_ab,
        "excluded_zero_e_ac": report.excluded_zero_e_ac,
    }
    _emit_json(args.out, payload)
    return 0 if report.violations == 0 else 1


def cmd_ckw(args) -> int:
    if args.mixed:
        config = RoofConfig(ensemble_size=args.roof_size, restarts=args.roof_restarts,
                            tol=args.roof_tol, max_sweeps=args.roof_max_sweeps,
                            seed=args.seed)
        records = []
        for i in range(args.samples):
            rho = ginibre_random_density(8, args.rank, args.seed + i, dims=(2, 2, 2))
            records.append(ckw_mixed(rho, config, tag=args.seed + i))
        threshold = -1e-6
        mode = "mixed"
    else:
        records = sample_pure_records(MEASURE_TANGLE, args.samples, args.seed)
        threshold = -1e-9
        mode = "pure"
    residuals = [r.residual for r in records]
    violations = sum(1 for r in residuals if r < threshold)
    monotone_failures = len(monotonicity_audit(records))
    payload = {
        "schema_version": SCHEMA_VERSION,
        "mode": mode,
        "samples": args.samples,
        "seed": args.seed,
        "rank": args.rank if args.mixed else None,
        "min_residual": min(residuals),
        "max_residual": max(residuals),
        "residual_threshold": threshold,
        "violations": violations,
        "monotonicity_violations": monotone_failures,
    }
    _emit_json(args.out, payload)
    return 0 if violations == 0 and monotone_failures == 0 else 1


def cmd_teleport(args) -> int:
    input_state = haar_random_pure((2,), args.seed)
    outcome = tuple(args.outcome) if args.outcome is not None else None
    transcript = teleport(input_state, forced_outcome=outcome, seed=args.seed + 1)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "seed": args.seed,
        "input": [[z.real, z.imag] for z in transcript.input_state.amplitudes],
        "outcome": list(transcript.outcome),
        "correction": transcript.correction,
        "output": [[z.real, z.imag] for z in transcript.output_state.amplitudes],
        "fidelity": transcript.fidelity,
    }
    _emit_json(args.out, payload)
    return 0 if transcript.fidelity >= 1.0 - 1e-12 else 1


def _add_common(p, *, samples_default=1000):
    p.add_argument("--samples", type=int, default=_env("SAMPLES", int, samples_default),
                   help="number of sampled states")
    p.add_argument("--seed", type=int, default=_env("SEED", int, 0),
                   help="base seed; state i uses seed + i")
    p.add_argument("--out", default=_env("OUT", str, "-"),
                   help="output path, or - for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entmono",
        description="Entanglement monogamy audits over sampled tripartite states.",
    )
    parser.add_argument("--version", action="version", version=f"entmono {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("region", help="sample (E_A(BC), E_AB, E_AC) triples to CSV/JSON")
    _add_common(p)
    p.add_argument("--measure", choices=(MEASURE_TANGLE, MEASURE_EOF),
                   default=_env("MEASURE", str, MEASURE_TANGLE))
    p.add_argument("--format", choices=("csv", "json"),
                   default=_env("FORMAT", str, "csv"))
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("curve", help="plot-ready curves (formation vs tangle, power level sets)")
    p.add_argument("--curve", choices=("eof_vs_csq", "alpha_level_set"), default="eof_vs_csq")
    p.add_argument("--grid-points", type=int, default=1000)
    p.add_argument("--alphas", default="2,10,15,50",
                   help="comma list of alpha values for alpha_level_set")
    p.add_argument("--out", default=_env("OUT", str, "-"))
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("counterexample",
                       help="formation triple of the additive-bound counterexample state")
    p.add_argument("--out", default=_env("OUT", str, "-"))
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("alpha-fit", help="fit the minimal power alpha over sampled records")
    _add_common(p, samples_default=10000)
    p.add_argument("--measure", choices=(MEASURE_TANGLE, MEASURE_EOF),
                   default=_env("MEASURE", str, MEASURE_TANGLE))
    p.add_argument("--alpha-cap", type=float, default=_env("ALPHA_CAP", float, 512.0))
    p.add_argument("--validate-samples", type=int,
                   default=_env("VALIDATE_SAMPLES", int, 10000),
                   help="fresh sample size for revalidating the fitted alpha")
    p.set_defaults(func=cmd_alpha_fit)

    p = sub.add_parser("equality-audit",
                       help="hunt for records with E_A(BC) = max side but a nonzero other side")
    _add_common(p, samples_default=10000)
    p.add_argument("--measure", choices=(MEASURE_TANGLE, MEASURE_EOF),
                   default=_env("MEASURE", str, MEASURE_TANGLE))
    p.add_argument("--epsilon", type=float, default=_env("EPSILON", float, 1e-6))
    p.add_argument("--delta", type=float, default=_env("DELTA", float, 1e-3))
    p.set_defaults(func=cmd_equality_audit)

    p = sub.add_parser("bounds", help="dimension-dependent lower-bound audit for formation records")
    _add_common(p, samples_default=10000)
    p.add_argument("--c", type=float, default=_env("C", float, None))
    p.add_argument("--exponent", type=int, choices=(4, 8), default=8)
    p.add_argument("--dims", type=int, nargs=3, default=(2, 2, 2),
                   metavar=("D_A", "D_B", "D_C"))
    p.add_argument("--triple", type=float, nargs=3, default=None,
                   metavar=("E_ABC", "E_AB", "E_AC"),
                   help="check supplied values arithmetically instead of sampling")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("ckw", help="tangle monogamy residuals over sampled states")
    _add_common(p)
    p.add_argument("--mixed", action="store_true",
                   help="sample mixed states and use the convex roof (slow)")
    p.add_argument("--rank", type=int, default=2, help="rank of sampled mixed states")
    p.add_argument("--roof-restarts", type=int, default=_env("ROOF_RESTARTS", int, 32))
    p.add_argument("--roof-size", type=int, default=_env("ROOF_SIZE", int, None))
    p.add_argument("--roof-tol", type=float, default=_env("ROOF_TOL", float, 1e-8))
    p.add_argument("--roof-max-sweeps", type=int,
                   default=_env("ROOF_MAX_SWEEPS", int, 5000))
    p.set_defaults(func=cmd_ckw)

    p = sub.add_parser("teleport", help="run the teleportation protocol once")
    p.add_argument("--seed", type=int, default=_env("SEED", int, 0))
    p.add_argument("--outcome", type=int, nargs=2, default=None, metavar=("I", "J"),
                   help="force the measurement outcome bits")
    p.add_argument("--out", default=_env("OUT", str, "-"))
    p.set_defaults(func=cmd_teleport)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"entmono: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

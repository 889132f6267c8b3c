"""Command-line interface.

    entropic-nc verify   [--observables FILE]
    entropic-nc eval     --family entangled --alpha 3.4899 --beta 2.9012
    entropic-nc scan     --family product --steps 200 --out product.csv
    entropic-nc optimize --family entangled --seed 0
    entropic-nc oracle   --samples 100000 --seed 7

Exit codes: 0 success (a violation is data, not an error); 1 internal
consistency failure (cyclicity broken, classical M > 0 found); 2 usage;
3 file not found or unreadable; 4 malformed configuration; 5 invalid
numerical input (degenerate state, zero vector, bad grid).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import ConfigError, ContextualityError, CyclicityViolation
from .explore import DEFAULT_WINDOWS, ScanGrid, export_scan, optimize, scan, write_scan
from .inequality import estimate_m_sampled, evaluate_m
from .model import (
    DEFAULT_LABEL,
    DEFAULT_VECTORS,
    FamilyKind,
    StateFamily,
    build_observables,
    make_state,
    normalize,
    read_observable_config,
)
from .oracle import run_classical_oracle

EXIT_OK = 0
EXIT_CONSISTENCY = 1
EXIT_USAGE = 2
EXIT_FILE = 3
EXIT_CONFIG = 4
EXIT_INPUT = 5


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _raw_vectors(path):
    if path is None:
        return DEFAULT_LABEL, [list(v) for v in DEFAULT_VECTORS]
    return read_observable_config(path)


def _load(args):
    label, vectors = _raw_vectors(args.observables)
    return build_observables(vectors, label)


def _angle(args, x):
    return math.radians(x) if args.degrees else x


def _resolved(args, **extra) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    cfg["observables"] = args.observables or f"<built-in {DEFAULT_LABEL}>"
    cfg["version"] = __version__
    cfg.update(extra)
    return cfg


def cmd_verify(args) -> int:
    label, vectors = _raw_vectors(args.observables)
    rows = []
    for k, v in enumerate(vectors):
        try:
            rows.append(normalize([float(x) for x in v]).amplitudes)
        except ContextualityError as exc:
            raise type(exc)(f"v{k + 1}: {exc}") from None
    d = np.array(rows)
    gram = d.conj() @ d.T
    n = len(d)
    adjacent = [float(abs(gram[i, (i + 1) % n])) for i in range(n)]
    failure = None
    try:
        build_observables(vectors, label)
    except CyclicityViolation as exc:
        failure = exc

    if args.format == "json":
        report = {
            "config": _resolved(args),
            "label": label,
            "gram_abs": np.abs(gram).tolist(),
            "adjacent_overlaps": adjacent,
            "passed": failure is None,
            "failure": None if failure is None else {"pair": list(failure.pair), "overlap": failure.overlap},
        }
        _emit(_dump(report) + "\n", args.out)
    else:
        lines = [f"observables: {label}", "|<v_i|v_j>|:"]
        lines.append("      " + "".join(f"{'v' + str(j + 1):>12}" for j in range(n)))
        for i in range(n):
            lines.append(f"{'v' + str(i + 1):>6}" + "".join(f"{abs(gram[i, j]):12.3e}" for j in range(n)))
        for i, ov in enumerate(adjacent):
            lines.append(f"pair ({i + 1},{(i + 1) % n + 1}): {ov:.3e}")
        lines.append("PASS: cyclic orthogonality holds" if failure is None else f"FAIL: {failure}")
        _emit("\n".join(lines) + "\n", args.out)
    if failure is not None:
        print(f"error: {failure}", file=sys.stderr)
        return EXIT_CONSISTENCY
    return EXIT_OK


def _parse_state(text: str):
    try:
        return [complex(x.strip().replace(" ", "")) for x in text.split(",")]
    except ValueError:
        raise ValueError(f"cannot parse state amplitudes {text!r}") from None


def cmd_eval(args) -> int:
    obs = _load(args)
    if args.state is not None:
        state = normalize(_parse_state(args.state))
    else:
        if args.alpha is None or args.beta is None:
            raise ValueError("eval needs --state or both --alpha and --beta")
        state = make_state(StateFamily(args.family, _angle(args, args.alpha), _angle(args, args.beta)))
    if args.shots:
        report = estimate_m_sampled(obs, state, args.shots, args.seed)
    else:
        report = evaluate_m(obs, state)
    out = {"config": _resolved(args, observables_label=obs.label)}
    out.update(report.to_dict())
    _emit(_dump(out) + "\n", args.out)
    return EXIT_OK


def _window(args, family):
    (a0, a1), (b0, b1) = DEFAULT_WINDOWS[family]
    if args.alpha_range:
        a0, a1 = (_angle(args, x) for x in args.alpha_range)
    if args.beta_range:
        b0, b1 = (_angle(args, x) for x in args.beta_range)
    return (a0, a1), (b0, b1)


def cmd_scan(args) -> int:
    obs = _load(args)
    family = FamilyKind(args.family)
    (a0, a1), (b0, b1) = _window(args, family)
    grid = ScanGrid((a0, a1, args.steps), (b0, b1, args.steps), family, obs.label)
    result = scan(grid, obs, workers=args.workers)
    fmt = args.format or "csv"
    meta = _resolved(args, format=fmt)
    if args.out:
        export_scan(result, fmt, args.out, metadata=meta)
    else:
        write_scan(result, fmt, sys.stdout, metadata=meta)
    a, b, m = result.max_point
    print(
        f"max M = {m:.6f} bits at alpha={a:.4f}, beta={b:.4f}; "
        f"violation fraction {result.violation_fraction:.4f}; degenerate points {result.missing}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_optimize(args) -> int:
    obs = _load(args)
    family = FamilyKind(args.family)
    window = _window(args, family)
    best = optimize(family, obs, args.coarse_steps, args.restarts, args.seed, window=window, workers=args.workers)
    out = {
        "config": _resolved(args, observables_label=obs.label),
        "alpha": best.alpha,
        "beta": best.beta,
        "m_bits": best.m,
        "violated": best.m > 0,
    }
    _emit(_dump(out) + "\n", args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    summary = run_classical_oracle(
        samples=args.samples,
        seed=args.seed,
        concentrations=tuple(args.concentrations),
        exclusive=args.exclusive,
        workers=args.workers,
    )
    out = {"config": _resolved(args)}
    out.update(summary.to_dict())
    _emit(_dump(out) + "\n", args.out)
    if summary.violations_found:
        print(f"error: {summary.violations_found} joint distributions gave M > 1e-12", file=sys.stderr)
        return EXIT_CONSISTENCY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--observables", metavar="PATH", help="JSON observable config (default: built-in default vectors)")
    common.add_argument("--out", metavar="PATH", help="write the primary output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), help="output format where a choice exists")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--workers", type=int, default=1, help="parallel workers; output is identical for any value")
    common.add_argument("--degrees", action="store_true", help="angles on the command line are in degrees")

    parser = argparse.ArgumentParser(prog="entropic-nc", description="Entropic non-contextuality inequality toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check cyclic orthogonality and print the Gram matrix")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval", parents=[common], help="evaluate M for one state")
    p.add_argument("--family", choices=("entangled", "product"), default="entangled")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--state", metavar="A,B,C,D", help="explicit amplitudes (complex allowed, e.g. 1,0,0.5j,0)")
    p.add_argument("--shots", type=int, default=0, help="estimate from this many simulated shots per pair")
    p.set_defaults(func=cmd_eval)

    for name, func, helptext in (
        ("scan", cmd_scan, "grid scan of M over (alpha, beta)"),
        ("optimize", cmd_optimize, "maximize M over (alpha, beta)"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--family", choices=("entangled", "product"), default="entangled")
        p.add_argument("--alpha-range", nargs=2, type=float, metavar=("START", "STOP"))
        p.add_argument("--beta-range", nargs=2, type=float, metavar=("START", "STOP"))
        p.set_defaults(func=func)
        if name == "scan":
            p.add_argument("--steps", type=int, default=200)
        else:
            p.add_argument("--coarse-steps", type=int, default=60)
            p.add_argument("--restarts", type=int, default=4)

    p = sub.add_parser("oracle", parents=[common], help="sample classical joint distributions and check M <= 0")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--concentrations", type=float, nargs="+", default=[0.1, 1.0, 10.0])
    p.add_argument("--exclusive", action="store_true", help="only populate exclusivity-respecting atoms")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CyclicityViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return EXIT_FILE
    except (ContextualityError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

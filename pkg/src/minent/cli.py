"""Command line interface: estimate, simulate, evaluate, online, analyze."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib  # python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .analysis import (
    joint_range_curve,
    near_uniform_pmf,
    variance_crossover_threshold,
    variance_of_g,
    z_slope,
)
from .blocks import load_bits, pack_blocks, save_bits
from .estimators import estimate_sequence
from .harness import (
    EstimatorSpec,
    ExperimentConfig,
    SourceBattery,
    run_experiment,
    write_report,
)
from .online import online_init, online_snapshot, online_update
from .sources import FAMILIES, RNG_ALGORITHM, SourceSpec, sample_bits, true_min_entropy

ESTIMATORS = ("compression", "coron", "kim", "collision")

_PARAM_NAMES = {
    "bms": "p",
    "near_uniform": "theta",
    "inverted_near_uniform": "psi",
    "discretized_normal": "sigma",
    "markov": "p",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minent",
        description="Min-entropy estimation for bit sources via distance-based tests.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate min-entropy of a bits file")
    est.add_argument("file", help="raw binary or '0'/'1' text bit file")
    est.add_argument("--estimator", required=True, choices=ESTIMATORS)
    est.add_argument("--alpha", type=float, default=2.0, help="order for the kim estimator")
    est.add_argument("--L", type=int, default=6, dest="l", help="bits per block")
    est.add_argument("--Q", type=int, default=None, dest="q",
                     help="initialisation blocks (default: per-estimator)")
    est.add_argument("--no-ci", action="store_true", help="skip the 99%% lower confidence bound")
    est.add_argument("--c", type=float, default=None, help="corrective factor override")
    est.set_defaults(func=_cmd_estimate)

    sim = sub.add_parser("simulate", help="generate a simulated source file")
    sim.add_argument("spec", help="family:key=val,... e.g. bms:p=0.3,seed=7,n_blocks=1000000")
    sim.add_argument("--out", required=True, help="output bits file (binary, MSB-first)")
    sim.add_argument("--text", action="store_true", help="write '0'/'1' text instead of binary")
    sim.set_defaults(func=_cmd_simulate)

    ev = sub.add_parser("evaluate", help="run an experiment config and write CSV reports")
    ev.add_argument("config", help="TOML experiment config")
    ev.add_argument("--out", required=True, help="output directory")
    ev.set_defaults(func=_cmd_evaluate)

    onl = sub.add_parser("online", help="stream a bits file through the online estimator")
    onl.add_argument("file", help="bits file or '-' for standard input")
    onl.add_argument("--L", type=int, default=6, dest="l")
    onl.add_argument("--emit-every", type=int, default=100, metavar="N",
                     help="emit a CSV row every N blocks (default 100)")
    onl.add_argument("--track-indices", action="store_true",
                     help="also report the collision index set when the stream ends")
    onl.set_defaults(func=_cmd_online)

    ana = sub.add_parser("analyze", help="emit analysis curves as CSV")
    ana_sub = ana.add_subparsers(dest="curve", required=True)

    jr = ana_sub.add_parser("joint-range", help="min-entropy envelopes vs a statistic")
    jr.add_argument("--statistic", choices=("shannon", "renyi", "maurer"), default="shannon")
    jr.add_argument("--alpha", type=float, default=2.0, help="order for the renyi statistic")
    jr.add_argument("--L", type=int, default=6, dest="l")
    jr.add_argument("--grid", type=int, default=2048, help="number of sweep points")
    jr.add_argument("--out", required=True)
    jr.set_defaults(func=_cmd_joint_range)

    sl = ana_sub.add_parser("slope", help="inversion sensitivity z(theta, alpha)")
    sl.add_argument("--alphas", default="2,3,4,5", help="comma-separated orders")
    sl.add_argument("--L", type=int, default=6, dest="l")
    sl.add_argument("--delta", type=float, default=0.001,
                    help="offset of the sweep start above 1/B")
    sl.add_argument("--grid", type=int, default=1000)
    sl.add_argument("--out", required=True)
    sl.set_defaults(func=_cmd_slope)

    va = ana_sub.add_parser("variance", help="per-term weight variance along the near-uniform family")
    va.add_argument("--alphas", default="2,3,4,5", help="comma-separated orders")
    va.add_argument("--L", type=int, default=6, dest="l")
    va.add_argument("--grid", type=int, default=256)
    va.add_argument("--out", required=True)
    va.set_defaults(func=_cmd_variance)

    return parser


def _cmd_estimate(args) -> int:
    bits = load_bits(args.file)
    blocks = pack_blocks(bits, args.l)
    result = estimate_sequence(
        blocks, args.estimator, args.l, alpha=args.alpha, q=args.q,
        apply_ci=not args.no_ci, c=args.c,
    )
    payload = {
        "file": str(args.file),
        "n_bits": int(bits.size),
        "n_blocks": int(blocks.size),
        "L": args.l,
        "estimator": result.estimator,
        "alpha": result.alpha,
        "theta": result.theta,
        "per_block_min_entropy": result.per_block,
        "per_bit_min_entropy": result.per_bit,
        "solved": result.solved,
        "ci_applied": result.ci_applied,
    }
    print(json.dumps(payload, indent=2))
    return 0


def parse_source_spec(text: str) -> SourceSpec:
    """Parse 'family:key=val,key=val' into a SourceSpec."""
    family, _, rest = text.partition(":")
    family = family.strip()
    if family not in FAMILIES:
        raise ValueError(f"unknown source family {family!r}; choose from {FAMILIES}")
    fields: dict[str, str] = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"malformed spec item {item!r}; expected key=value")
        fields[key.strip()] = value.strip()
    param_name = _PARAM_NAMES[family]
    if param_name in fields:
        param = float(fields.pop(param_name))
    elif "param" in fields:
        param = float(fields.pop("param"))
    else:
        raise ValueError(f"{family} spec needs {param_name}=...")
    seed = int(fields.pop("seed", 0))
    n_blocks = int(fields.pop("n_blocks", 1_000_000))
    l = int(fields.pop("L", fields.pop("l", 6)))
    if fields:
        raise ValueError(f"unknown spec keys: {sorted(fields)}")
    return SourceSpec(family=family, param=param, l=l, n_blocks=n_blocks, seed=seed)


def _cmd_simulate(args) -> int:
    spec = parse_source_spec(args.spec)
    bits = sample_bits(spec)
    save_bits(args.out, bits, text=args.text)
    truth = true_min_entropy(spec)
    meta = {
        "family": spec.family,
        "param_name": _PARAM_NAMES[spec.family],
        "param": spec.param,
        "L": spec.l,
        "n_blocks": spec.n_blocks,
        "n_bits": int(bits.size),
        "seed": spec.seed,
        "rng": RNG_ALGORITHM,
        "true_min_entropy_per_bit": truth.per_bit_min_entropy,
        "derivation": truth.derivation,
    }
    meta_path = Path(str(args.out) + ".meta.json")
    meta_path.write_text(json.dumps(meta, indent=2) + "\n")
    print(f"wrote {args.out} ({bits.size} bits) and {meta_path}")
    return 0


def load_experiment_config(path) -> ExperimentConfig:
    """Read the TOML experiment schema (see README for the field list)."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    default_blocks = int(data.get("n_blocks", 1_000_000))
    batteries = []
    for bat in data.get("battery", []):
        batteries.append(SourceBattery(
            family=bat["family"],
            params=tuple(float(p) for p in bat["params"]),
            trials=int(bat.get("trials", 1)),
            n_blocks=int(bat.get("n_blocks", default_blocks)),
        ))
    estimators = []
    for est in data.get("estimator", []):
        estimators.append(EstimatorSpec(
            method=est["method"],
            alpha=float(est["alpha"]) if "alpha" in est else None,
            q=int(est["q"]) if "q" in est else None,
            apply_ci=bool(est.get("ci", True)),
            c=float(est["c"]) if "c" in est else None,
        ))
    if not batteries or not estimators:
        raise ValueError("config needs at least one [[battery]] and one [[estimator]]")
    return ExperimentConfig(
        batteries=tuple(batteries),
        estimators=tuple(estimators),
        l=int(data.get("l", 6)),
        base_seed=int(data.get("base_seed", 0)),
    )


def _cmd_evaluate(args) -> int:
    config = load_experiment_config(args.config)
    report = run_experiment(config)
    trials, aggregates = write_report(report, args.out)
    print(f"wrote {trials} ({len(report.trials)} rows) and {aggregates}")
    for agg in report.aggregates:
        mpe = "na" if agg.mpe_pct is None else f"{agg.mpe_pct:.2f}%"
        print(f"  {agg.family} param={agg.param:g} {agg.estimator}: "
              f"N={agg.n} mse={agg.mse:.6f} mpe={mpe}")
    return 0


def _iter_stream_blocks(handle, l: int, chunk_bytes: int = 1 << 16):
    """Yield l-bit blocks from a byte stream, auto-detecting text format on
    the first chunk."""
    text_bytes = frozenset(b"01 \t\r\n")
    carry = np.empty(0, dtype=np.uint8)
    text_mode = None
    while True:
        chunk = handle.read(chunk_bytes)
        if not chunk:
            break
        if text_mode is None:
            text_mode = all(c in text_bytes for c in chunk) and any(c in b"01" for c in chunk)
        raw = np.frombuffer(chunk, dtype=np.uint8)
        if text_mode:
            mask = (raw == ord("0")) | (raw == ord("1"))
            bits = (raw[mask] - ord("0")).astype(np.uint8)
        else:
            bits = np.unpackbits(raw)
        bits = np.concatenate([carry, bits])
        n_full = bits.size // l
        if n_full:
            for block in pack_blocks(bits[: n_full * l], l):
                yield int(block)
        carry = bits[n_full * l :]


def _cmd_online(args) -> int:
    if args.emit_every < 1:
        raise ValueError(f"--emit-every must be >= 1, got {args.emit_every}")
    handle = sys.stdin.buffer if args.file == "-" else open(args.file, "rb")
    try:
        blocks = _iter_stream_blocks(handle, args.l)
        first = next(blocks, None)
        if first is None:
            raise ValueError("input holds no complete block")
        state = online_init(first, args.l, track_indices=args.track_indices)
        print("k,p_c,theta,per_bit_estimate")
        emitted_k = 0
        for block in blocks:
            online_update(state, block)
            if state.k % args.emit_every == 0:
                k, p_c, theta, h = online_snapshot(state)
                print(f"{k},{p_c:.12g},{theta:.12g},{h:.12g}")
                emitted_k = k
        if state.k != emitted_k:  # always close with the final state
            k, p_c, theta, h = online_snapshot(state)
            print(f"{k},{p_c:.12g},{theta:.12g},{h:.12g}")
        if args.track_indices:
            indices = " ".join(map(str, state.collision_indices or []))
            print(f"# collision_indices: {indices}")
    finally:
        if handle is not sys.stdin.buffer:
            handle.close()
    return 0


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _cmd_joint_range(args) -> int:
    b = 1 << args.l
    statistic = "maurer_expectation" if args.statistic == "maurer" else args.statistic
    grid = np.linspace(1.0 / b, 1.0, args.grid)
    alpha = args.alpha if args.statistic == "renyi" else None
    points = joint_range_curve(statistic, b, grid, alpha=alpha)
    _write_csv(args.out, ["x", "h_lower", "h_upper", "gap"],
               [(f"{p.x:.12g}", f"{p.h_lower:.12g}", f"{p.h_upper:.12g}", f"{p.gap:.12g}")
                for p in points])
    print(f"wrote {args.out} ({len(points)} points)")
    return 0


def _parse_alphas(text: str) -> list[float]:
    alphas = [float(a) for a in text.split(",") if a.strip()]
    if not alphas:
        raise ValueError("need at least one order")
    return alphas


def _cmd_slope(args) -> int:
    b = 1 << args.l
    alphas = _parse_alphas(args.alphas)
    thetas = np.linspace(1.0 / b + args.delta, 1.0, args.grid)
    header = ["theta"] + [f"z_a{a:g}" for a in alphas]
    rows = [[f"{t:.12g}"] + [f"{z_slope(float(t), a, b):.12g}" for a in alphas]
            for t in thetas]
    _write_csv(args.out, header, rows)
    print(f"wrote {args.out} ({len(rows)} points)")
    return 0


def _cmd_variance(args) -> int:
    b = 1 << args.l
    alphas = _parse_alphas(args.alphas)
    thetas = np.linspace(1.0 / b, 1.0, args.grid)
    header = ["theta"] + [f"var_g_a{a:g}" for a in alphas]
    rows = []
    for t in thetas:
        pmf = near_uniform_pmf(float(t), b)
        rows.append([f"{t:.12g}"] + [f"{variance_of_g(pmf, a):.12g}" for a in alphas])
    _write_csv(args.out, header, rows)
    print(f"wrote {args.out} ({len(rows)} points); "
          f"order-2-vs-3 variance threshold at theta={variance_crossover_threshold(b):.6g}")
    return 0


def run(argv=None) -> int:
    """Parse and execute; returns the process exit status (0 ok, 1 runtime
    error, 2 usage error)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> None:
    raise SystemExit(run(argv))


if __name__ == "__main__":
    main()

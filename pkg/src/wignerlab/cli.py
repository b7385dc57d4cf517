"""Command-line front end: kernels, estimates, sweeps, oracles, per-state runs.

Exit codes: 0 success, 2 usage or validation error, 3 runtime failure.
All estimate-like commands honor --seed and are reproducible modulo the
wall-time column; --workers (or the WIGNERLAB_WORKERS environment variable)
never changes the counts, only who computes them.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from .kernels import KernelSpectrum, master_residuals, moments
from .montecarlo import (
    KernelSelector,
    SweepConfig,
    SweepRecord,
    estimate_global,
    estimate_state,
    run_sweep,
)
from .oracles import OracleResult, cf_inversion_exact, clt_probability, limit_quantumness, two_block_exact

SCHEMA_VERSION = 1
CSV_COLUMNS = [
    "schema_version", "N", "kernel_label", "k", "method", "trials", "negatives",
    "p_hat", "ci_low", "ci_high", "oracle_value", "seed", "wall_time_s",
]
ORACLE_COLUMNS = ["value", "method", "estimated_abs_error"]

# entropy tag mixed into derived seeds for bare "random" kernel tokens,
# distinct from the (seed, point-index) scheme used for sweep points
_KERNEL_TOKEN_TAG = 0x6B65726E


def _default_workers() -> int:
    raw = os.environ.get("WIGNERLAB_WORKERS", "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"WIGNERLAB_WORKERS must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"WIGNERLAB_WORKERS must be >= 1, got {value}")
    return value


def _resolve_workers(args) -> int:
    return args.workers if args.workers is not None else _default_workers()


def _selector_from_args(args) -> KernelSelector:
    if getattr(args, "two_block", None) is not None:
        return KernelSelector.two_block(args.two_block)
    if getattr(args, "random_seed", None) is not None:
        return KernelSelector.random(args.random_seed)
    raise ValueError("choose a kernel family: --two-block K or --random SEED")


def _parse_kernel_token(token: str, master_seed: int, position: int) -> KernelSelector:
    t = token.strip()
    try:
        if t.startswith("k="):
            return KernelSelector.two_block(int(t[2:]))
        if t == "random":
            derived = int(np.random.SeedSequence(
                entropy=(master_seed, _KERNEL_TOKEN_TAG, position)).generate_state(1, np.uint64)[0])
            return KernelSelector.random(derived)
        if t.startswith("random="):
            return KernelSelector.random(int(t.split("=", 1)[1]))
    except ValueError:
        pass
    raise ValueError(f"cannot parse kernel token {token!r}; use k=INT, random, or random=SEED")


def load_state_file(path: str, expected_n: int | None = None) -> np.ndarray:
    """Read a density matrix: first line N, then N^2 lines "re im", row-major.

    Validates Hermiticity (1e-12), unit trace (1e-12), and positive
    semidefiniteness (smallest eigenvalue >= -1e-10).
    """
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"state file {path}: empty")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValueError(f"state file {path}: first line must be the dimension, got {lines[0]!r}") from None
    if n < 1:
        raise ValueError(f"state file {path}: dimension must be >= 1, got {n}")
    if expected_n is not None and n != expected_n:
        raise ValueError(f"state file {path}: dimension {n} does not match --n {expected_n}")
    if len(lines) != 1 + n * n:
        raise ValueError(f"state file {path}: expected {n * n} entry lines, found {len(lines) - 1}")
    entries = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"state file {path}:{lineno}: expected 're im', got {ln!r}")
        try:
            entries.append(complex(float(parts[0]), float(parts[1])))
        except ValueError:
            raise ValueError(f"state file {path}:{lineno}: non-numeric entry {ln!r}") from None
    rho = np.array(entries, dtype=complex).reshape(n, n)
    if np.abs(rho - rho.conj().T).max() > 1e-12:
        raise ValueError(f"state file {path}: matrix is not Hermitian within 1e-12")
    if abs(complex(np.trace(rho)) - 1.0) > 1e-12:
        raise ValueError(f"state file {path}: trace differs from 1 by more than 1e-12")
    smallest = float(np.linalg.eigvalsh(rho).min())
    if smallest < -1e-10:
        raise ValueError(f"state file {path}: negative eigenvalue {smallest:.3e}")
    return rho


def _fmt(x: float) -> str:
    return repr(float(x))


def _record_payload(rec: SweepRecord, oracle_value: float | None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "N": rec.dimension,
        "kernel_label": rec.kernel_label,
        "k": rec.k if rec.k is not None else "random",
        "method": rec.method,
        "trials": rec.trials,
        "negatives": rec.negatives,
        "p_hat": rec.p_hat,
        "ci_low": rec.ci_low,
        "ci_high": rec.ci_high,
        "oracle_value": oracle_value,
        "seed": rec.seed,
        "wall_time_s": rec.wall_time_s,
    }


def _records_text(records: list[SweepRecord], oracle_values: list[float | None],
                  fmt: str, single: bool) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec, ov in zip(records, oracle_values):
            writer.writerow([
                SCHEMA_VERSION, rec.dimension, rec.kernel_label,
                rec.k if rec.k is not None else "random",
                rec.method, rec.trials, rec.negatives,
                _fmt(rec.p_hat), _fmt(rec.ci_low), _fmt(rec.ci_high),
                "" if ov is None else _fmt(ov),
                rec.seed, _fmt(rec.wall_time_s),
            ])
        return buf.getvalue().rstrip("\n")
    payloads = [_record_payload(rec, ov) for rec, ov in zip(records, oracle_values)]
    if fmt == "json":
        return json.dumps(payloads[0] if single and payloads else payloads, indent=2)
    lines = []
    for payload in payloads:
        lines.extend(f"{key:<14} {payload[key]}" for key in CSV_COLUMNS
                     if not (key == "oracle_value" and payload[key] is None))
        lines.append("")
    return "\n".join(lines).rstrip("\n") if lines else "(no records)"


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _kernel_oracle(selector: KernelSelector, spectrum: KernelSpectrum) -> float:
    if selector.kind == "two-block":
        return two_block_exact(spectrum.dimension, selector.k).value
    return cf_inversion_exact(spectrum).value


def _cmd_kernel(args) -> int:
    selector = _selector_from_args(args)
    spectrum = selector.build(args.n)
    r1, r2 = master_residuals(spectrum)
    mom = moments(spectrum)
    if args.format == "json":
        payload = {
            "dimension": spectrum.dimension,
            "label": spectrum.label,
            "eigenvalues": [[v, m] for v, m in spectrum.eigenvalues],
            "residuals": {"trace": r1, "square_trace": r2},
            "moments": {
                "pos_sum": mom.pos_sum, "neg_abs_sum": mom.neg_abs_sum,
                "pos_sq_sum": mom.pos_sq_sum, "neg_sq_sum": mom.neg_sq_sum,
                "num_nonneg": mom.num_nonneg, "sigma_ratio": mom.sigma_ratio,
            },
        }
        _emit(json.dumps(payload, indent=2), args.out)
        return 0
    lines = [
        f"dimension      {spectrum.dimension}",
        f"label          {spectrum.label}",
        "eigenvalues    (value x multiplicity)",
    ]
    lines.extend(f"    {v!r} x {m}" for v, m in spectrum.eigenvalues)
    lines.append(f"residuals      trace {r1:.3e}, square-trace {r2:.3e}")
    lines.append(f"moments        pos_sum={mom.pos_sum!r} neg_abs_sum={mom.neg_abs_sum!r}")
    lines.append(f"               pos_sq_sum={mom.pos_sq_sum!r} neg_sq_sum={mom.neg_sq_sum!r}")
    lines.append(f"               num_nonneg={mom.num_nonneg} sigma_ratio={mom.sigma_ratio!r}")
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_estimate(args) -> int:
    selector = _selector_from_args(args)
    spectrum = selector.build(args.n)
    workers = _resolve_workers(args)
    start = time.perf_counter()
    est = estimate_global(spectrum, args.trials, args.seed,
                          method=args.method, workers=workers, z=args.z)
    wall = time.perf_counter() - start
    oracle_value = _kernel_oracle(selector, spectrum) if args.oracle else None
    rec = SweepRecord(dimension=args.n, kernel_label=spectrum.label, k=selector.k,
                      method=est.method, trials=est.trials, negatives=est.negatives,
                      p_hat=est.p_hat, ci_low=est.ci_low, ci_high=est.ci_high,
                      seed=est.seed, wall_time_s=wall)
    _emit(_records_text([rec], [oracle_value], args.format, single=True), args.out)
    return 0


def _parse_dimensions(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise ValueError(f"cannot parse dimension list {text!r}; use e.g. 2,4,8") from None


_SWEEP_CONFIG_KEYS = {"dimensions", "kernels", "trials", "seed", "workers", "z", "method"}


def _cmd_sweep(args) -> int:
    fileconf: dict = {}
    if args.config:
        with open(args.config) as fh:
            fileconf = json.load(fh)
        if not isinstance(fileconf, dict):
            raise ValueError(f"config file {args.config}: expected a JSON object")
        unknown = set(fileconf) - _SWEEP_CONFIG_KEYS
        if unknown:
            raise ValueError(f"config file {args.config}: unknown keys {sorted(unknown)}")

    if args.n is not None:
        dimensions = _parse_dimensions(args.n)
    elif "dimensions" in fileconf:
        dimensions = tuple(int(n) for n in fileconf["dimensions"])
    else:
        raise ValueError("sweep needs --n or a config file with 'dimensions'")

    seed = args.seed if args.seed is not None else int(fileconf.get("seed", 0))

    if args.kernels is not None:
        tokens = [t for t in args.kernels.split(",") if t.strip()]
    elif "kernels" in fileconf:
        tokens = [str(t) for t in fileconf["kernels"]]
    else:
        raise ValueError("sweep needs --kernels or a config file with 'kernels'")
    selectors = tuple(_parse_kernel_token(tok, seed, pos) for pos, tok in enumerate(tokens))

    trials = args.trials if args.trials is not None else fileconf.get("trials")
    if trials is None:
        raise ValueError("sweep needs --trials or a config file with 'trials'")
    workers = args.workers if args.workers is not None else fileconf.get("workers")
    if workers is None:
        workers = _default_workers()
    z = args.z if args.z is not None else float(fileconf.get("z", 1.96))
    method = args.method if args.method is not None else str(fileconf.get("method", "fast-gamma"))

    config = SweepConfig(dimensions=dimensions, kernels=selectors, trials=int(trials),
                         seed=int(seed), workers=int(workers), z=z, method=method)
    records = run_sweep(config)

    oracle_values: list[float | None] = [None] * len(records)
    if args.oracle:
        by_label = {sel.describe(): sel for sel in selectors}
        for i, rec in enumerate(records):
            sel = by_label[rec.kernel_label]
            oracle_values[i] = _kernel_oracle(sel, sel.build(rec.dimension))

    _emit(_records_text(records, oracle_values, args.format, single=False), args.out)
    return 0


def _cmd_oracle(args) -> int:
    chosen = [bool(args.limit), args.clt is not None,
              args.two_block is not None or args.random_seed is not None]
    if sum(chosen) != 1:
        raise ValueError("choose exactly one of --limit, --clt T, or a kernel family with --n")
    if args.limit:
        result = limit_quantumness()
    elif args.clt is not None:
        result = clt_probability(args.clt)
    else:
        if args.n is None:
            raise ValueError("kernel-family oracles need --n")
        selector = _selector_from_args(args)
        spectrum = selector.build(args.n)
        if selector.kind == "two-block" and not args.cf:
            result = two_block_exact(args.n, selector.k)
        else:
            result = cf_inversion_exact(spectrum, tol=args.tol)
    _emit(_oracle_text(result, args.format), args.out)
    return 0


def _oracle_text(result: OracleResult, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(ORACLE_COLUMNS)
        writer.writerow([_fmt(result.value), result.method, _fmt(result.estimated_abs_error)])
        return buf.getvalue().rstrip("\n")
    if fmt == "json":
        return json.dumps({"value": result.value, "method": result.method,
                           "estimated_abs_error": result.estimated_abs_error}, indent=2)
    return "\n".join([
        f"value                {result.value!r}",
        f"method               {result.method}",
        f"estimated_abs_error  {result.estimated_abs_error!r}",
    ])


def _cmd_state(args) -> int:
    selector = _selector_from_args(args)
    spectrum = selector.build(args.n)
    if args.maximally_mixed:
        rho = np.eye(args.n, dtype=complex) / args.n
    elif args.pure_basis is not None:
        j = args.pure_basis
        if not 1 <= j <= args.n:
            raise ValueError(f"basis index must be in [1, {args.n}], got {j}")
        rho = np.zeros((args.n, args.n), dtype=complex)
        rho[j - 1, j - 1] = 1.0
    else:
        rho = load_state_file(args.state_file, expected_n=args.n)
    workers = _resolve_workers(args)
    start = time.perf_counter()
    est = estimate_state(rho, spectrum, args.trials, args.seed, workers=workers, z=args.z)
    wall = time.perf_counter() - start
    rec = SweepRecord(dimension=args.n, kernel_label=spectrum.label, k=selector.k,
                      method=est.method, trials=est.trials, negatives=est.negatives,
                      p_hat=est.p_hat, ci_low=est.ci_low, ci_high=est.ci_high,
                      seed=est.seed, wall_time_s=wall)
    _emit(_records_text([rec], [None], args.format, single=True), args.out)
    return 0


def _add_family_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--two-block", dest="two_block", type=int, metavar="K",
                       help="two-block kernel; K is the negative-block multiplicity")
    group.add_argument("--random", dest="random_seed", type=int, metavar="SEED",
                       help="random kernel spectrum drawn deterministically from SEED")


def _add_output_flags(parser: argparse.ArgumentParser, default_format: str = "csv") -> None:
    parser.add_argument("--format", choices=["csv", "json", "pretty"], default=default_format)
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="write output to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wignerlab",
        description="Monte Carlo and exact negativity probabilities for "
                    "phase-space kernels of N-level systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_kernel = sub.add_parser("kernel", help="print a kernel spectrum with residuals and moments")
    p_kernel.add_argument("--n", type=int, required=True, metavar="N")
    _add_family_flags(p_kernel, required=True)
    p_kernel.add_argument("--format", choices=["pretty", "json"], default="pretty")
    p_kernel.add_argument("--out", metavar="PATH", default=None)
    p_kernel.set_defaults(handler=_cmd_kernel)

    p_est = sub.add_parser("estimate", help="Monte Carlo negativity probability of random states")
    p_est.add_argument("--n", type=int, required=True, metavar="N")
    _add_family_flags(p_est, required=True)
    p_est.add_argument("--trials", type=int, required=True)
    p_est.add_argument("--seed", type=int, default=0)
    p_est.add_argument("--method", choices=["fast-gamma", "full-ginibre"], default="fast-gamma")
    p_est.add_argument("--workers", type=int, default=None,
                       help="process count (default: WIGNERLAB_WORKERS or 1)")
    p_est.add_argument("--z", type=float, default=1.96)
    p_est.add_argument("--oracle", action="store_true", help="fill the oracle_value column")
    _add_output_flags(p_est)
    p_est.set_defaults(handler=_cmd_estimate)

    p_sweep = sub.add_parser("sweep", help="estimate a grid of (N, kernel) points")
    p_sweep.add_argument("--config", metavar="FILE", default=None,
                         help="JSON file with dimensions/kernels/trials/seed/workers/z/method")
    p_sweep.add_argument("--n", metavar="LIST", default=None,
                         help="comma-separated dimensions, e.g. 2,4,8 (empty for none)")
    p_sweep.add_argument("--kernels", metavar="LIST", default=None,
                         help="comma-separated kernel tokens: k=INT, random, random=SEED")
    p_sweep.add_argument("--trials", type=int, default=None)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--method", choices=["fast-gamma", "full-ginibre"], default=None)
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.add_argument("--z", type=float, default=None)
    p_sweep.add_argument("--oracle", action="store_true",
                         help="add exact oracle values per row (beta closed form or CF inversion)")
    _add_output_flags(p_sweep)
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_oracle = sub.add_parser("oracle", help="exact negativity probabilities, no sampling")
    p_oracle.add_argument("--limit", action="store_true", help="infinite-dimension limit value")
    p_oracle.add_argument("--clt", type=float, default=None, metavar="T",
                          help="normal-reduction quadrature at parameter T")
    p_oracle.add_argument("--n", type=int, default=None, metavar="N")
    _add_family_flags(p_oracle, required=False)
    p_oracle.add_argument("--cf", action="store_true",
                          help="force characteristic-function inversion for two-block kernels")
    p_oracle.add_argument("--tol", type=float, default=1e-10,
                          help="error tolerance for CF inversion")
    _add_output_flags(p_oracle)
    p_oracle.set_defaults(handler=_cmd_oracle)

    p_state = sub.add_parser("state", help="phase-space negativity volume of one state")
    p_state.add_argument("--n", type=int, required=True, metavar="N")
    state_group = p_state.add_mutually_exclusive_group(required=True)
    state_group.add_argument("--maximally-mixed", action="store_true")
    state_group.add_argument("--pure-basis", type=int, metavar="J",
                             help="basis projector |j><j|, 1-based index")
    state_group.add_argument("--state-file", metavar="PATH",
                             help="text file: first line N, then N^2 lines 're im' row-major")
    _add_family_flags(p_state, required=True)
    p_state.add_argument("--trials", type=int, required=True)
    p_state.add_argument("--seed", type=int, default=0)
    p_state.add_argument("--workers", type=int, default=None)
    p_state.add_argument("--z", type=float, default=1.96)
    _add_output_flags(p_state)
    p_state.set_defaults(handler=_cmd_state)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

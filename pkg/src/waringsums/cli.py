"""Command-line front end: experiment orchestration and CSV/JSON output.

Every subcommand writes one table, CSV by default (comma separated,
`.` decimal, `#`-prefixed comment header carrying the tool version and
the full parameter set) or a JSON mirror behind --json.  Floats are
printed with 15 significant digits.  Reductions in the library are
deterministic, so identical configuration gives byte-identical output
regardless of --threads.

Exit codes: 0 success, 2 parameter/usage error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np

from . import __version__, arith, eulermac, expansion, expsums, oracle, series

__all__ = ["build_parser", "run", "main"]


# ----------------------------- plumbing -----------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        if value == 0.0:
            value = 0.0  # normalize negative zero
        return f"{value:.15g}"
    return str(value)


def _emit(args, meta: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    rows = [list(r) for r in rows]
    if getattr(args, "json", False):
        payload = {
            "tool": "waringsums",
            "version": __version__,
            "meta": {k: meta[k] for k in sorted(meta)},
            "columns": list(columns),
            "rows": [[(v if not isinstance(v, float) else float(_fmt(v))) for v in r]
                     for r in rows],
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = [f"# waringsums {__version__}"]
        lines.append("# " + " ".join(f"{k}={_fmt(meta[k])}" for k in sorted(meta)))
        lines.append(",".join(columns))
        for r in rows:
            lines.append(",".join(_fmt(v) for v in r))
        text = "\n".join(lines) + "\n"
    out = getattr(args, "output", "-")
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _pool_map(fn: Callable, items: Sequence, threads: int) -> List:
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _parse_int_list(text: str) -> List[int]:
    """Accepts '2..5' (inclusive range) or '2,3,4' (comma list)."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ValueError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(t) for t in text.split(",") if t]


def _load_config(path: str) -> dict:
    values = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = val
    return values


def _apply_config(args: argparse.Namespace, argv: Sequence[str]) -> None:
    if not getattr(args, "config", None):
        return
    explicit = set()
    for token in argv:
        if token.startswith("--"):
            explicit.add(token[2:].split("=", 1)[0].replace("-", "_"))
    for key, raw in _load_config(args.config).items():
        if key in explicit or not hasattr(args, key):
            continue
        current = getattr(args, key)
        if isinstance(current, bool):
            value = raw.lower() in ("1", "true", "yes", "on")
        elif isinstance(current, int):
            value = int(raw)
        elif isinstance(current, float):
            value = float(raw)
        elif isinstance(current, str):
            value = raw
        else:
            value = _infer_scalar(raw)
        setattr(args, key, value)


def _infer_scalar(raw: str):
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    return raw


def _cached_table(k: int, s: int, N: int, cache_dir: Optional[str]) -> oracle.RepCountTable:
    if cache_dir:
        name = f"wrc_k{k}_s{s}_N{N}_unsigned.bin"
        path = Path(cache_dir) / name
        if path.exists():
            table = oracle.read_binary(str(path))
            if (table.k, table.s, table.N, table.signed) == (k, s, N, False):
                return table
        table = oracle.count_representations(k, s, N)
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        oracle.write_binary(table, str(path))
        return table
    return oracle.count_representations(k, s, N)


# ----------------------------- subcommands --------------------------------

def _cmd_expsum(args) -> int:
    meta = {"subcommand": "expsum", "k": args.k, "q": args.q, "a": args.a}
    columns = ["q", "a", "S_re", "S_im", "T_re", "T_im"]
    if args.a is not None:
        sv = expsums.complete_sum(args.q, args.a, args.k)
        tv = expsums.weighted_sum(args.q, args.a, args.k)
        rows = [[args.q, args.a, sv.real, sv.imag, tv.real, tv.imag]]
    else:
        svals = expsums.batch_values(args.q, args.k)
        tvals = expsums.batch_weighted_values(args.q, args.k)
        rows = [
            [args.q, a, svals[a].real, svals[a].imag, tvals[a].real, tvals[a].imag]
            for a in range(args.q)
        ]
    _emit(args, meta, columns, rows)
    return 0


def _cmd_series(args) -> int:
    meta = {"subcommand": "series", "k": args.k, "s": args.s, "j": args.j,
            "Q": args.Q}
    if args.n is not None:
        spec = series.TruncationSpec(args.k, args.s, args.n, j=args.j, Q=args.Q)
        val = series.modified_series_truncated(spec)
        meta["Q"] = spec.Q
        _emit(args, meta, ["n", "value_re", "value_im", "term_count", "tail_estimate"],
              [[args.n, val.value.real, val.value.imag, val.term_count,
                val.tail_estimate]])
        return 0
    if args.n_min is None or args.n_max is None or args.Q is None:
        raise ValueError("range mode needs --n-min, --n-max and --Q")
    ns = np.arange(args.n_min, args.n_max + 1, dtype=np.int64)
    vals = series.series_over_range(args.k, args.s, args.j, ns, args.Q)
    meta.update(n_min=args.n_min, n_max=args.n_max)
    _emit(args, meta, ["n", "value_re", "value_im"],
          [[int(n), v.real, v.imag] for n, v in zip(ns, vals)])
    return 0


def _cmd_expansion(args) -> int:
    if args.k % 2 == 0:
        coeffs = expansion.coefficients_even(args.s, args.J, args.n, args.k, args.Q)
    else:
        coeffs = expansion.coefficients_odd(args.s, args.J, args.n, args.k, args.Q)
    meta = {"subcommand": "expansion", "k": args.k, "s": args.s, "J": args.J,
            "n": args.n, "Q": args.Q, "parity": coeffs.parity}
    rows = [
        [j, coeffs.binomials[j], coeffs.gamma_factors[j], coeffs.series_values[j],
         coeffs.coefficients[j]]
        for j in range(args.J + 1)
    ]
    _emit(args, meta, ["j", "binomial", "gamma_factor", "series_value", "c_j"], rows)
    return 0


def _cmd_oracle(args) -> int:
    if args.signed:
        table = oracle.count_representations_signed(args.k, args.s, args.n_max)
    else:
        table = _cached_table(args.k, args.s, args.n_max, args.cache_dir)
    if args.binary_out:
        oracle.write_binary(table, args.binary_out)
    meta = {"subcommand": "oracle", "k": args.k, "s": args.s, "n_max": args.n_max,
            "signed": args.signed, "width_bits": table.width_bits}
    _emit(args, meta, ["n", "count"],
          [[n, c] for n, c in enumerate(table.counts)])
    return 0


def _cmd_residuals(args) -> int:
    table = _cached_table(args.k, args.s, args.n_max, args.cache_dir)
    records = oracle.residual_table(
        args.k, args.s, args.J, args.n_min, args.n_max, args.Q, counts=table
    )
    meta = {"subcommand": "residuals", "k": args.k, "s": args.s, "J": args.J,
            "n_min": args.n_min, "n_max": args.n_max, "Q": args.Q}
    columns = (["n", "exact"] + [f"pred{j}" for j in range(args.J + 1)]
               + [f"E{j}" for j in range(args.J + 1)])
    rows = [
        [rec.n, rec.exact, *rec.predicted, *rec.residuals] for rec in records
    ]
    _emit(args, meta, columns, rows)
    return 0


def _cmd_em_verify(args) -> int:
    xs = _parse_int_list(args.X)

    def one(x: int):
        spec = eulermac.LatticeSumSpec(args.q, args.r, x, args.theta, args.k, args.N)
        direct = eulermac.progression_power_sum(spec, args.variant)
        main, psi, scale = eulermac.progression_power_sum_asymptotic(spec, args.variant)
        return [x, direct, main, psi, (direct - main - psi) / scale]

    rows = _pool_map(one, xs, args.threads)
    meta = {"subcommand": "em-verify", "k": args.k, "theta": args.theta,
            "q": args.q, "r": args.r, "N": args.N, "variant": args.variant}
    _emit(args, meta, ["X", "direct", "main", "psi", "scaled_error"], rows)
    return 0


def _cmd_thm14(args) -> int:
    qs = _parse_int_list(args.Q)

    def one(Q: int):
        n = math.factorial(Q) * args.m
        disc = series.factorial_multiple_discrepancy(args.s, args.k, Q, args.m,
                                                     args.trunc)
        return [Q, n, disc]

    rows = _pool_map(one, qs, args.threads)
    meta = {"subcommand": "thm14", "k": args.k, "s": args.s, "m": args.m,
            "trunc": args.trunc}
    _emit(args, meta, ["Q", "n", "discrepancy"], rows)
    return 0


def _cmd_thm15(args) -> int:
    qs = _parse_int_list(args.Q)
    threshold = args.C
    if threshold is None:
        ns = np.arange(1, args.x + 1, dtype=np.int64)
        mags = np.abs(series.series_over_range(args.k, args.s, args.j, ns, qs[0]))
        threshold = float(np.median(mags)) / 2.0
    rows = []
    for Q in qs:
        count, fraction = series.nonvanishing_census(
            args.s, args.j, args.k, args.x, Q, threshold
        )
        rows.append([Q, threshold, count, fraction])
    meta = {"subcommand": "thm15", "k": args.k, "s": args.s, "j": args.j,
            "x": args.x}
    _emit(args, meta, ["Q", "C", "count", "fraction"], rows)
    return 0


def _selftest_checks(seed: int):
    rng = np.random.default_rng(seed)

    def bernoulli_recurrence():
        table = arith.bernoulli_numbers(40)
        for kappa in range(2, 41):
            residual = sum(
                math.comb(kappa + 1, j) * table[kappa + 1 - j]
                for j in range(1, kappa + 2)
            )
            if residual != 0:
                return f"recurrence residual {residual} at index {kappa}"
        return None

    def even_collapse():
        worst = 0.0
        for k in (2, 4):
            for q in range(1, 121):
                a = expsums.coprime_residues(q)
                tv = expsums.batch_weighted_values(q, k)[a]
                worst = max(worst, float(np.max(np.abs(tv + 0.5))))
        return None if worst <= 1e-9 else f"max |T+1/2| = {worst:g}"

    def odd_structure():
        for k in (3, 5):
            for q in range(1, 121):
                a = expsums.coprime_residues(q)
                sv = expsums.batch_values(q, k)[a]
                if float(np.max(np.abs(sv.imag))) > 1e-9 * q:
                    return f"Im S too large at q={q}, k={k}"
                tv = expsums.batch_weighted_values(q, k)[a] + 0.5
                if float(np.max(np.abs(tv.real))) > 1e-9 * q:
                    return f"Re T-augmented too large at q={q}, k={k}"
        return None

    def reflection_identity():
        for k, s, n, Q in ((3, 9, 5, 40), (3, 9, 17, 40), (5, 12, 100, 25)):
            terms = sum(expsums.coprime_residues(q).size for q in range(1, Q + 1))
            residual = series.negation_identity_residual(s, n, Q, k)
            if residual > 1e-8 * terms:
                return f"residual {residual:g} at (k={k}, s={s}, n={n}, Q={Q})"
        return None

    def batch_vs_direct():
        qs = [1, 2, 4, 7] + sorted(int(q) for q in rng.integers(8, 801, size=8))
        for q in qs:
            batch = expsums.batch_values(q, 3)
            for a in range(0, q, max(1, q // 17)):
                direct = expsums.complete_sum(q, a, 3).value
                if abs(batch[a] - direct) > 1e-9 * q:
                    return f"batch mismatch at (q={q}, a={a})"
        return None

    def inversion():
        for s in (2, 3, 4):
            result = oracle.verify_inversion(2, s, 400)
            if not result:
                return f"inversion failed: {result.first_failure}"
        return None

    def convolution_vs_enumeration():
        for k in (2, 3):
            for s in (2, 3):
                conv = oracle.count_representations(k, s, 300)
                enum = oracle.count_by_enumeration(k, s, 300)
                if conv.counts != enum.counts:
                    return f"mismatch at (k={k}, s={s})"
        signed_conv = oracle.count_representations_signed(2, 2, 200)
        signed_enum = oracle.count_by_enumeration(2, 2, 200, signed=True)
        if signed_conv.counts != signed_enum.counts:
            return "signed mismatch at (k=2, s=2)"
        return None

    def packed_vs_schoolbook():
        fast = oracle.count_representations(3, 4, 500, method="packed")
        slow = oracle.count_representations(3, 4, 500, method="schoolbook")
        return None if fast.counts == slow.counts else "packed != schoolbook"

    return [
        ("bernoulli-recurrence", bernoulli_recurrence),
        ("even-k-collapse", even_collapse),
        ("odd-k-structure", odd_structure),
        ("reflection-identity", reflection_identity),
        ("batch-vs-direct", batch_vs_direct),
        ("inversion-identities", inversion),
        ("convolution-vs-enumeration", convolution_vs_enumeration),
        ("packed-vs-schoolbook", packed_vs_schoolbook),
    ]


def _cmd_selftest(args) -> int:
    rows = []
    failed = 0
    for name, check in _selftest_checks(args.seed):
        detail = check()
        status = "PASS" if detail is None else "FAIL"
        if detail is not None:
            failed += 1
        print(f"# {status} {name}" + (f" ({detail})" if detail else ""),
              file=sys.stderr)
        rows.append([name, status, detail or ""])
    meta = {"subcommand": "selftest", "seed": args.seed, "failed": failed}
    _emit(args, meta, ["check", "status", "detail"], rows)
    return 0 if failed == 0 else 1


# ----------------------------- parser --------------------------------------

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("-o", "--output", default="-",
                     help="output path, '-' for stdout (default)")
    sub.add_argument("--json", action="store_true",
                     help="emit a JSON mirror instead of CSV")
    sub.add_argument("--threads", type=int,
                     default=int(os.environ.get("WARINGSUMS_THREADS", "1")),
                     help="worker pool size for independent work items")
    sub.add_argument("--config", default=None,
                     help="key=value file supplying defaults; flags win")
    sub.add_argument("--seed", type=int, default=12345,
                     help="seed for any sampled checks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="waringsums",
        description="Exponential sums, singular series, expansions, and "
                    "exact counting experiments for sums of k-th powers.",
    )
    parser.add_argument("--version", action="version",
                        version=f"waringsums {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("expsum", help="complete/weighted exponential sums")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=int, default=None,
                   help="single numerator; all residues when omitted")
    _add_common(p)
    p.set_defaults(handler=_cmd_expsum)

    p = subs.add_parser("series", help="truncated (modified) singular series")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--n-min", type=int, default=None)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--Q", type=int, default=None,
                   help="truncation level; defaults to floor(n^(1/k))")
    _add_common(p)
    p.set_defaults(handler=_cmd_series)

    p = subs.add_parser("expansion", help="asymptotic expansion coefficients")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--J", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_expansion)

    p = subs.add_parser("oracle", help="exact representation-count tables")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--signed", action="store_true")
    p.add_argument("--binary-out", default=None,
                   help="also write the table in the flat binary format")
    p.add_argument("--cache-dir", default=None)
    _add_common(p)
    p.set_defaults(handler=_cmd_oracle)

    p = subs.add_parser("residuals",
                        help="exact counts minus cumulative expansion predictions")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--J", type=int, required=True)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--cache-dir", default=None)
    _add_common(p)
    p.set_defaults(handler=_cmd_residuals)

    p = subs.add_parser("em-verify",
                        help="lattice power sums against their asymptotics")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--variant", choices=eulermac.VARIANTS, default="two_sided")
    p.add_argument("--X", required=True,
                   help="comma list or lo..hi range of X values")
    _add_common(p)
    p.set_defaults(handler=_cmd_em_verify)

    p = subs.add_parser("thm14",
                        help="half-series discrepancy at factorial multiples")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--Q", required=True, help="comma list or lo..hi range")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--trunc", type=int, required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_thm14)

    p = subs.add_parser("thm15", help="non-vanishing census of the modified series")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--Q", required=True, help="comma list or lo..hi range")
    p.add_argument("--C", type=float, default=None,
                   help="census threshold; default half the pilot median")
    _add_common(p)
    p.set_defaults(handler=_cmd_thm15)

    p = subs.add_parser("selftest", help="run the exact-identity suite")
    _add_common(p)
    p.set_defaults(handler=_cmd_selftest)

    return parser


def run(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config(args, argv)
        return args.handler(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure, not a usage problem
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""Exact counting of representations by sums of k-th powers.

Tables are built by iterated convolution of the k-th-power indicator
sequence, in exact integer arithmetic throughout.  The default engine
packs each table into one Python big integer with a fixed byte width per
entry, so a convolution step is a handful of shifted additions; since
every true entry is a tuple count bounded well below the slot width,
packed arithmetic is exact positional arithmetic, not an approximation.
A schoolbook engine and a brute-force enumerator are kept alongside as
independent routes for verification.

Counts are ordered-tuple counts.  The unsigned table counts solutions in
positive integers; the signed table (even k only) counts solutions in
all integers, built from the weight 2 per nonzero k-th power plus 1 at 0.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import expansion as _expansion
from . import series as _series

__all__ = [
    "RepCountTable",
    "WidthOverflowError",
    "count_representations",
    "count_representations_signed",
    "count_by_enumeration",
    "InversionResult",
    "verify_inversion",
    "ResidualRecord",
    "residual_table",
    "write_binary",
    "read_binary",
    "write_csv",
]

MAGIC = b"WRC1"
_HEADER = struct.Struct("<4sIIQIB")
MIN_WIDTH_BITS = 128


class WidthOverflowError(OverflowError):
    """A count does not fit the table's declared entry width."""


@dataclass(frozen=True)
class RepCountTable:
    """Exact counts indexed 0..N; immutable and safe to share."""

    k: int
    s: int
    N: int
    signed: bool
    width_bits: int
    counts: tuple

    def __post_init__(self):
        if len(self.counts) != self.N + 1:
            raise ValueError("counts must cover 0..N")

    def __getitem__(self, n: int) -> int:
        return self.counts[n]


def kth_powers(k: int, N: int) -> List[int]:
    """All y^k <= N with y >= 1."""
    out = []
    y = 1
    while y**k <= N:
        out.append(y**k)
        y += 1
    return out


def _width_bits_for(k: int, s: int, N: int, signed: bool) -> int:
    # Every entry is at most the total number of admissible tuples, itself
    # at most (#values per slot)^s; round up to whole bytes, floor 128.
    per_slot = (2 if signed else 1) * len(kth_powers(k, N)) + 1
    bound_bits = (per_slot**s).bit_length() + 1
    return max(MIN_WIDTH_BITS, 8 * ((bound_bits + 7) // 8))


def _pack(counts: Sequence[int], wbytes: int) -> int:
    buf = bytearray(len(counts) * wbytes)
    for i, c in enumerate(counts):
        if c:
            buf[i * wbytes : (i + 1) * wbytes] = int(c).to_bytes(wbytes, "little")
    return int.from_bytes(bytes(buf), "little")

def _unpack(acc: int, entries: int, wbytes: int) -> List[int]:
    raw = acc.to_bytes(entries * wbytes, "little")
    return [
        int.from_bytes(raw[i * wbytes : (i + 1) * wbytes], "little")
        for i in range(entries)
    ]


def _convolve_packed(acc: int, powers: Sequence[int], N: int, wbytes: int,
                     signed: bool) -> int:
    mask = (1 << (8 * wbytes * (N + 1))) - 1
    shifted = 0
    for yk in powers:
        shifted += acc << (8 * wbytes * yk)
    if signed:
        acc = acc + 2 * shifted
    else:
        acc = shifted
    return acc & mask


def _convolve_schoolbook(prev: Sequence[int], powers: Sequence[int], N: int,
                         signed: bool) -> List[int]:
    out = list(prev) if signed else [0] * (N + 1)
    w = 2 if signed else 1
    for yk in powers:
        for i in range(N + 1 - yk):
            c = prev[i]
            if c:
                out[i + yk] += w * c
    return out


def _base_sequence(powers: Sequence[int], N: int, signed: bool) -> List[int]:
    base = [0] * (N + 1)
    if signed:
        base[0] = 1
    for yk in powers:
        base[yk] = 2 if signed else 1
    return base


def _build_table(k: int, s: int, N: int, signed: bool, method: str) -> RepCountTable:
    if s < 1:
        raise ValueError("s must be >= 1")
    if N < 1:
        raise ValueError("N must be >= 1")
    if k < 2:
        raise ValueError("k must be >= 2")
    powers = kth_powers(k, N)
    width_bits = _width_bits_for(k, s, N, signed)
    if method == "packed":
        wbytes = width_bits // 8
        acc = _pack(_base_sequence(powers, N, signed), wbytes)
        for _ in range(s - 1):
            acc = _convolve_packed(acc, powers, N, wbytes, signed)
        counts = _unpack(acc, N + 1, wbytes)
    elif method == "schoolbook":
        counts = _base_sequence(powers, N, signed)
        for _ in range(s - 1):
            counts = _convolve_schoolbook(counts, powers, N, signed)
    else:
        raise ValueError(f"unknown method {method!r}")
    if max(counts).bit_length() > width_bits:
        raise WidthOverflowError("count exceeds declared entry width")
    return RepCountTable(k, s, N, signed, width_bits, tuple(counts))


def count_representations(k: int, s: int, N: int, method: str = "packed") -> RepCountTable:
    """counts[n] = #{(x_1..x_s), x_i >= 1 : sum x_i^k = n} for n <= N."""
    return _build_table(k, s, N, signed=False, method=method)


def count_representations_signed(k: int, s: int, N: int, method: str = "packed") -> RepCountTable:
    """counts[n] = #{(x_1..x_s), x_i in Z : sum x_i^k = n} for n <= N.

    Only for even k, where |x_i| <= n^(1/k) holds automatically; for odd
    k the analogous count needs an explicit window and is not a plain
    convolution, so it is rejected.
    """
    if k % 2 != 0:
        raise ValueError("signed counting requires even k")
    return _build_table(k, s, N, signed=True, method=method)


def count_by_enumeration(k: int, s: int, N: int, signed: bool = False) -> RepCountTable:
    """Brute-force nested enumeration of ordered tuples; the slow oracle.

    Signed slots are folded as weights (0 contributes once, each nonzero
    magnitude twice), which counts ordered sign choices exactly.
    """
    if signed and k % 2 != 0:
        raise ValueError("signed counting requires even k")
    if s < 1 or N < 1:
        raise ValueError("s and N must be >= 1")
    powers = kth_powers(k, N)
    items = ([(0, 1)] if signed else []) + [(yk, 2 if signed else 1) for yk in powers]
    counts = [0] * (N + 1)

    def recurse(depth: int, total: int, weight: int) -> None:
        if depth == s:
            counts[total] += weight
            return
        for value, w in items:
            if total + value > N:
                break
            recurse(depth + 1, total + value, weight * w)

    recurse(0, 0, 1)
    width_bits = max(MIN_WIDTH_BITS, 8 * ((max(counts).bit_length() + 8) // 8))
    return RepCountTable(k, s, N, signed, width_bits, tuple(counts))


@dataclass(frozen=True)
class InversionResult:
    """Outcome of the signed/unsigned inversion check; truthy iff it held."""

    ok: bool
    checked_up_to: int
    first_failure: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_inversion(k: int, s: int, N: int) -> InversionResult:
    """Exactly check, for all n <= N, the pair of identities

        signed_s(n)        = sum_r 2^(s-r) C(s,r) unsigned_{s-r}(n)
        2^s unsigned_s(n)  = sum_r (-1)^r C(s,r) signed_{s-r}(n)

    with the order-0 tables equal to the indicator of n = 0.
    """
    if k % 2 != 0:
        raise ValueError("inversion check requires even k")
    unsigned = {0: [1] + [0] * N}
    signed = {0: [1] + [0] * N}
    for t in range(1, s + 1):
        unsigned[t] = list(count_representations(k, t, N).counts)
        signed[t] = list(count_representations_signed(k, t, N).counts)
    for n in range(N + 1):
        lhs = signed[s][n]
        rhs = sum(2 ** (s - r) * math.comb(s, r) * unsigned[s - r][n] for r in range(s + 1))
        if lhs != rhs:
            return InversionResult(False, N, (n, "signed-from-unsigned", lhs, rhs))
        lhs2 = 2**s * unsigned[s][n]
        rhs2 = sum((-1) ** r * math.comb(s, r) * signed[s - r][n] for r in range(s + 1))
        if lhs2 != rhs2:
            return InversionResult(False, N, (n, "unsigned-from-signed", lhs2, rhs2))
    return InversionResult(True, N)


@dataclass(frozen=True)
class ResidualRecord:
    n: int
    exact: int
    predicted: tuple
    residuals: tuple


def residual_table(
    k: int,
    s: int,
    J: int,
    n_min: int,
    n_max: int,
    Q: int,
    counts: Optional[RepCountTable] = None,
) -> List[ResidualRecord]:
    """Exact counts against cumulative expansion predictions.

    predicted_j(n) sums the expansion through order j with coefficients
    truncated at level Q; residuals are exact - predicted_j.  A
    precomputed unsigned table may be passed to skip the convolution.
    """
    if not 1 <= n_min <= n_max:
        raise ValueError("need 1 <= n_min <= n_max")
    if counts is None:
        counts = count_representations(k, s, n_max)
    if counts.N < n_max or counts.k != k or counts.s != s or counts.signed:
        raise ValueError("supplied table does not match the experiment")
    parity = "even" if k % 2 == 0 else "odd"
    prefactors = _expansion.coefficient_prefactors(s, J, k, parity)
    ns = np.arange(n_min, n_max + 1, dtype=np.int64)
    nf = ns.astype(np.float64)
    term = np.zeros((J + 1, ns.size))
    for j in range(J + 1):
        if parity == "even":
            vals = _series.series_over_range(k, s - j, 0, ns, Q).real
        else:
            vals = _series.series_over_range(k, s, j, ns, Q).real
        term[j] = prefactors[j] * vals * nf ** ((s - j) / k - 1.0)
    predicted = np.cumsum(term, axis=0)
    records = []
    for i, n in enumerate(ns):
        exact = counts[int(n)]
        preds = tuple(float(predicted[j, i]) for j in range(J + 1))
        records.append(
            ResidualRecord(int(n), exact, preds, tuple(exact - p for p in preds))
        )
    return records


def write_binary(table: RepCountTable, path: str) -> None:
    """Flat binary layout: magic, k, s, N, entry width in bits, signed
    flag (header little-endian), then N+1 raw little-endian entries."""
    wbytes = table.width_bits // 8
    with open(path, "wb") as fh:
        fh.write(
            _HEADER.pack(MAGIC, table.k, table.s, table.N, table.width_bits,
                         1 if table.signed else 0)
        )
        for c in table.counts:
            if c.bit_length() > table.width_bits:
                raise WidthOverflowError("count exceeds declared entry width")
            fh.write(int(c).to_bytes(wbytes, "little"))


def read_binary(path: str) -> RepCountTable:
    with open(path, "rb") as fh:
        magic, k, s, N, width_bits, signed = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != MAGIC:
            raise ValueError(f"not a count-table file: bad magic {magic!r}")
        wbytes = width_bits // 8
        raw = fh.read((N + 1) * wbytes)
    if len(raw) != (N + 1) * wbytes:
        raise ValueError("truncated count-table file")
    counts = tuple(
        int.from_bytes(raw[i * wbytes : (i + 1) * wbytes], "little")
        for i in range(N + 1)
    )
    return RepCountTable(k, s, N, bool(signed), width_bits, counts)


def write_csv(table: RepCountTable, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# k={table.k} s={table.s} N={table.N} signed={int(table.signed)}\n")
        fh.write("n,count\n")
        for n, c in enumerate(table.counts):
            fh.write(f"{n},{c}\n")

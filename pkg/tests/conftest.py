"""Shared brute-force oracles for the test suite.

Everything here recomputes values from definitions with plain Python
loops (or one vectorized gather), deliberately independent of the
library's FFT/packing fast paths.
"""

from __future__ import annotations

import cmath
import math

import numpy as np


def direct_S(q: int, a: int, k: int) -> complex:
    return sum(
        cmath.exp(2j * math.pi * ((a * pow(r, k, q)) % q) / q)
        for r in range(1, q + 1)
    )


def direct_T(q: int, a: int, k: int) -> complex:
    return sum(
        (0.5 - r / q) * cmath.exp(2j * math.pi * ((a * pow(r, k, q)) % q) / q)
        for r in range(1, q + 1)
    )


def direct_batch_S(q: int, k: int) -> np.ndarray:
    """S(q, a) for all a, via exact integer exponents and a phase table."""
    rk = np.array([pow(r, k, q) for r in range(1, q + 1)], dtype=np.int64)
    table = np.exp(2j * np.pi * np.arange(q) / q)
    out = np.empty(q, dtype=np.complex128)
    chunk = max(1, 2_000_000 // max(q, 1))
    for lo in range(0, q, chunk):
        a = np.arange(lo, min(lo + chunk, q), dtype=np.int64)
        idx = (a[:, None] * rk[None, :]) % q
        out[lo : lo + chunk] = table[idx].sum(axis=1)
    return out


def direct_modified_series(k: int, s: int, j: int, n: int, Q: int) -> complex:
    """Double-loop truncated series straight from the definition."""
    total = 0.0 + 0.0j
    for q in range(1, Q + 1):
        for a in range(1, q + 1):
            if math.gcd(a, q) != 1:
                continue
            phase = cmath.exp(-2j * math.pi * ((n * a) % q) / q)
            term = (direct_S(q, a, k) / q) ** (s - j)
            if j:
                term *= direct_T(q, a, k) ** j
            total += term * phase
    return total


def direct_power_moment(lo: int, hi: int, u: int, theta: float, k: int) -> float:
    """Double-loop moment sum over lo <= q < hi."""
    total = 0.0
    for q in range(lo, hi):
        for a in range(1, q + 1):
            if math.gcd(a, q) == 1:
                total += q**theta * abs(direct_S(q, a, k) / q) ** u
    return total


def loglog_slope(xs, ys) -> float:
    xs = np.log(np.asarray(xs, dtype=np.float64))
    ys = np.log(np.asarray(ys, dtype=np.float64))
    return float(np.polyfit(xs, ys, 1)[0])


def totient_sum(Q: int) -> int:
    """Number of reduced fractions a/q with q <= Q."""
    return sum(
        1
        for q in range(1, Q + 1)
        for a in range(1, q + 1)
        if math.gcd(a, q) == 1
    )

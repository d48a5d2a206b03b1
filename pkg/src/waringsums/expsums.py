"""Complete and weighted exponential sums over residues of k-th powers.

The three point evaluators reduce every exponent a*r^k mod q in exact
integer arithmetic before any trigonometric call, so the phase carries no
accumulated power error even for moduli near 1e5.  The batch evaluator
bins residues into a histogram and applies one length-q discrete Fourier
transform, giving all residues a in O(q log q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "ExpSumValue",
    "complete_sum",
    "weighted_sum",
    "weighted_sum_augmented",
    "batch_complete_sum",
    "coprime_residues",
]

TWO_PI = 2.0 * math.pi

# Values are memoized per (q, k) because series truncations revisit the
# same moduli constantly; above this q the arrays are large and reuse is
# unlikely (tail scans walk q upward once), so caching is bypassed.
CACHE_LIMIT = 4096


@dataclass(frozen=True)
class ExpSumValue:
    """One exponential-sum value at modulus q, numerator a, power k."""

    value: complex
    q: int
    a: int
    k: int

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag


def _validate(q: int, k: int) -> None:
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")


def power_residues(q: int, k: int) -> np.ndarray:
    """r^k mod q for r = 1..q, as int64, via exact repeated multiply-mod."""
    r = np.arange(1, q + 1, dtype=np.int64) % q
    res = np.ones(q, dtype=np.int64)
    for _ in range(k):
        res = (res * r) % q
    return res


@lru_cache(maxsize=512)
def _power_residues_small(q: int, k: int) -> np.ndarray:
    res = power_residues(q, k)
    res.flags.writeable = False
    return res


def _power_residues_cached(q: int, k: int) -> np.ndarray:
    if q <= CACHE_LIMIT:
        return _power_residues_small(q, k)
    return power_residues(q, k)


def coprime_residues(q: int) -> np.ndarray:
    """Indices a mod q with 1 <= a <= q and gcd(a, q) = 1 (q=1 gives [0])."""
    if q == 1:
        return np.array([0], dtype=np.int64)
    a = np.arange(1, q, dtype=np.int64)
    return a[np.gcd(a, q) == 1]


@lru_cache(maxsize=512)
def _coprime_residues_small(q: int) -> np.ndarray:
    res = coprime_residues(q)
    res.flags.writeable = False
    return res


def _coprime_residues_cached(q: int) -> np.ndarray:
    if q <= CACHE_LIMIT:
        return _coprime_residues_small(q)
    return coprime_residues(q)


def _phases(q: int, exponents: np.ndarray) -> np.ndarray:
    return np.exp(1j * (TWO_PI * (exponents / q)))


def _fsum_complex(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real), math.fsum(values.imag))


def complete_sum(q: int, a: int, k: int) -> ExpSumValue:
    """S = sum_{r=1}^{q} e(a r^k / q), e(z) = exp(2 pi i z)."""
    _validate(q, k)
    residues = (int(a) % q) * _power_residues_cached(q, k) % q
    return ExpSumValue(_fsum_complex(_phases(q, residues)), q, a, k)


def weighted_sum(q: int, a: int, k: int) -> ExpSumValue:
    """T = sum_{r=1}^{q} (1/2 - r/q) e(a r^k / q).

    Identically -1/2 for even k: the substitution r -> q - r flips the
    weight's sign while fixing the phase, forcing T = -1 - T.
    """
    _validate(q, k)
    residues = (int(a) % q) * _power_residues_cached(q, k) % q
    weights = 0.5 - np.arange(1, q + 1, dtype=np.float64) / q
    return ExpSumValue(_fsum_complex(weights * _phases(q, residues)), q, a, k)


def weighted_sum_augmented(q: int, a: int, k: int) -> ExpSumValue:
    """The weighted sum extended over r = 0..q, equal to T + 1/2.

    Purely imaginary when k is odd (the r -> q - r pairing conjugates and
    negates it), which is why even k is rejected.
    """
    if k % 2 == 0:
        raise ValueError("augmented weighted sum requires odd k")
    t = weighted_sum(q, a, k)
    return ExpSumValue(t.value + 0.5, q, a, k)


def _residue_histogram(q: int, k: int) -> np.ndarray:
    return np.bincount(_power_residues_cached(q, k), minlength=q).astype(np.float64)


def _batch_values_impl(q: int, k: int) -> np.ndarray:
    _validate(q, k)
    out = np.conj(np.fft.fft(_residue_histogram(q, k)))
    out.flags.writeable = False
    return out


_batch_values_small = lru_cache(maxsize=512)(_batch_values_impl)


def batch_values(q: int, k: int) -> np.ndarray:
    """S(q, a) for all a = 0..q-1 as one complex array.

    Computed as the conjugated DFT of the residue histogram
    c(m) = #{1 <= r <= q : r^k = m mod q}:
    S(q, a) = sum_m c(m) e(a m / q) = conj(FFT(c))[a].
    """
    if q <= CACHE_LIMIT:
        return _batch_values_small(q, k)
    return _batch_values_impl(q, k)


def _batch_weighted_impl(q: int, k: int) -> np.ndarray:
    _validate(q, k)
    r = np.arange(1, q + 1, dtype=np.float64)
    binned = np.bincount(
        _power_residues_cached(q, k), weights=0.5 - r / q, minlength=q
    )
    out = np.conj(np.fft.fft(binned))
    out.flags.writeable = False
    return out


_batch_weighted_small = lru_cache(maxsize=512)(_batch_weighted_impl)


def batch_weighted_values(q: int, k: int) -> np.ndarray:
    """T(q, a) for all a = 0..q-1, by binning the weights 1/2 - r/q."""
    if q <= CACHE_LIMIT:
        return _batch_weighted_small(q, k)
    return _batch_weighted_impl(q, k)


def batch_complete_sum(q: int, k: int) -> list[ExpSumValue]:
    """S(q, a) for every a in {0, ..., q-1}."""
    vals = batch_values(q, k)
    return [ExpSumValue(complex(v), q, a, k) for a, v in enumerate(vals)]

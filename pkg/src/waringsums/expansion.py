"""Multi-term asymptotic expansion coefficients for k-th power counts.

The count of representations by s positive k-th powers expands as
n^(s/k-1) * (c_0 + c_1 n^(-1/k) + ... + c_J n^(-J/k)).  For even k every
c_j is an alternating half-power of the classical truncated series with
exponent s-j; for odd k the j-th coefficient uses the order-j modified
series instead.  Coefficients here always carry the series truncated at
an explicit level Q: the infinite series is not finitely computable, so
the Q-dependence is surfaced rather than hidden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .arith import log_gamma
from .series import TruncationSpec, modified_series_truncated, singular_series_truncated

__all__ = [
    "ExpansionCoefficients",
    "gamma_factor",
    "coefficient_prefactors",
    "coefficients_even",
    "coefficients_odd",
    "evaluate_expansion",
    "admissibility_threshold",
]


@dataclass(frozen=True)
class ExpansionCoefficients:
    k: int
    s: int
    J: int
    n: int
    Q: int
    parity: Literal["even", "odd"]
    coefficients: tuple
    binomials: tuple
    gamma_factors: tuple
    series_values: tuple

    def __post_init__(self):
        if len(self.coefficients) != self.J + 1:
            raise ValueError("need exactly J+1 coefficients")


def gamma_factor(s: int, j: int, k: int) -> float:
    """Gamma(1 + 1/k)^(s-j) / Gamma((s-j)/k), evaluated in the log domain.

    This is the closed form of the singular integral scale factor for
    exponent u = s - j.
    """
    u = s - j
    if u < 1:
        raise ValueError(f"requires s - j >= 1, got {u}")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    return math.exp(u * log_gamma(1.0 + 1.0 / k) - log_gamma(u / k))


def _reject_integer_ratio_overrun(s: int, J: int, k: int) -> None:
    # When k divides s and J exceeds s/k - 1, the expansion picks up extra
    # terms of a form with no closed formula here; refuse rather than guess.
    if s % k == 0 and J > s // k - 1:
        raise ValueError(
            f"J={J} with s={s} divisible by k={k} exceeds the supported "
            f"order s/k - 1 = {s // k - 1}; coefficients beyond that order "
            "are not represented by this expansion"
        )


def coefficient_prefactors(
    s: int, J: int, k: int, parity: Literal["even", "odd"]
) -> list[float]:
    """Per-order scalar prefactors multiplying the truncated series value.

    Order j carries C(s, j) * gamma_factor(s, j, k), with an extra
    (-1/2)^j for even k.  Binomials are computed exactly before the
    float conversion.  Validates every structural requirement on
    (s, J, k), so callers assembling coefficients elsewhere inherit the
    same guards.
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    if (k % 2 == 0) != (parity == "even"):
        raise ValueError(f"k={k} does not match parity={parity!r}")
    if J < 0:
        raise ValueError("J must be >= 0")
    if s - J < 1:
        raise ValueError(f"need s - J >= 1, got s={s}, J={J}")
    if parity == "odd" and J > k:
        raise ValueError(f"odd-k coefficients need 0 <= J <= k, got J={J}")
    _reject_integer_ratio_overrun(s, J, k)
    out = []
    for j in range(J + 1):
        factor = float(math.comb(s, j)) * gamma_factor(s, j, k)
        if parity == "even":
            factor *= (-0.5) ** j
        out.append(factor)
    return out


def _validate_point(n: int, Q: int) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if Q < 1:
        raise ValueError("Q must be >= 1")


def coefficients_even(s: int, J: int, n: int, k: int, Q: int) -> ExpansionCoefficients:
    """c_j = (-1/2)^j C(s,j) gamma_factor(s,j,k) * classical series(s-j; n, Q)."""
    if k % 2 != 0:
        raise ValueError("coefficients_even requires even k")
    _validate_point(n, Q)
    prefactors = coefficient_prefactors(s, J, k, "even")
    binomials, gammas, series_vals, coeffs = [], [], [], []
    for j in range(J + 1):
        binomials.append(math.comb(s, j))
        gammas.append(gamma_factor(s, j, k))
        val = singular_series_truncated(TruncationSpec(k, s - j, n, j=0, Q=Q))
        series_vals.append(val.value.real)
        coeffs.append(prefactors[j] * series_vals[-1])
    return ExpansionCoefficients(
        k, s, J, n, Q, "even",
        tuple(coeffs), tuple(binomials), tuple(gammas), tuple(series_vals),
    )


def coefficients_odd(s: int, J: int, n: int, k: int, Q: int) -> ExpansionCoefficients:
    """c_j = C(s,j) gamma_factor(s,j,k) * modified series(s, j; n, Q)."""
    if k % 2 == 0:
        raise ValueError("coefficients_odd requires odd k")
    _validate_point(n, Q)
    prefactors = coefficient_prefactors(s, J, k, "odd")
    binomials, gammas, series_vals, coeffs = [], [], [], []
    for j in range(J + 1):
        binomials.append(math.comb(s, j))
        gammas.append(gamma_factor(s, j, k))
        val = modified_series_truncated(TruncationSpec(k, s, n, j=j, Q=Q))
        series_vals.append(val.value.real)
        coeffs.append(prefactors[j] * series_vals[-1])
    return ExpansionCoefficients(
        k, s, J, n, Q, "odd",
        tuple(coeffs), tuple(binomials), tuple(gammas), tuple(series_vals),
    )


def evaluate_expansion(n: int, coeffs: ExpansionCoefficients) -> float:
    """n^(s/k-1) * sum_j c_j n^(-j/k); defined for n >= 1 only."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k, s = coeffs.k, coeffs.s
    total = 0.0
    for j, c in enumerate(coeffs.coefficients):
        total += c * float(n) ** ((s - j) / k - 1.0)
    return total


def admissibility_threshold(k: int, nu: float) -> float:
    """Sufficient exponent threshold above which s is nu-admissible for k.

    Advisory metadata only: nothing here proves admissibility.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if nu < 1:
        raise ValueError(f"nu must be >= 1, got {nu}")
    if k <= 5:
        return 2.0**k + 2.0 ** (k - 1) * nu
    if k <= 7:
        return 2.0 * k * k - 2.0 + 2.0 ** (k - 1) * (nu - 1.0)
    return 4.0 * k - 2.0 + 2.0 * k * (k - 2) * nu

"""Lattice power sums over arithmetic progressions and their asymptotics.

The direct evaluators sum (X^k - x_1^k - ... - x_l^k)^theta over lattice
points x_i = r_i mod q, either two-sided (|x_i| <= X) or positive
(0 < x_i <= X), with the final power nonnegative.  Endpoint membership
is decided in exact rational arithmetic: ints, Fractions, and binary
floats are all exact rationals, so the half-open/closed range boundaries
never depend on a float comparison.

The asymptotic evaluators return the corresponding main terms, the
boundary correction Psi that appears in the positive variant when k is
odd, and the scale of the error term, so scaling experiments can check
|direct - prediction| / error_scale directly.

euler_maclaurin_sum is the generic engine behind those expansions: a sum
over integers in (a, b] reconstructed from an integral, Bernoulli
boundary terms, and a remainder integral evaluated by adaptive
quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence, Tuple, Union

from .arith import bernoulli_polynomial, log_gamma, periodic_bernoulli

__all__ = [
    "LatticeSumSpec",
    "SymmetricBernoulliValue",
    "QuadratureError",
    "progression_power_sum",
    "progression_power_sum_asymptotic",
    "lattice_power_sum",
    "lattice_power_sum_asymptotic",
    "symmetric_bernoulli",
    "euler_maclaurin_sum",
]

VARIANTS = ("two_sided", "positive")


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class LatticeSumSpec:
    """Parameters of one lattice power sum.

    r is a single residue for the one-dimensional sums or a tuple of
    residues for the multidimensional ones; N is the asymptotic order
    parameter controlling the error scale.
    """

    q: int
    r: Union[int, Tuple[int, ...]]
    X: Union[int, float, Fraction]
    theta: float
    k: int
    N: int = 1

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if not self.X > 0:
            raise ValueError("X must be positive")
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if self.N < 1:
            raise ValueError("N must be >= 1")

    @property
    def l(self) -> int:
        return len(self.r) if isinstance(self.r, tuple) else 1

    @property
    def residues(self) -> Tuple[int, ...]:
        return self.r if isinstance(self.r, tuple) else (self.r,)


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def _scalar_residue(spec: LatticeSumSpec) -> int:
    if isinstance(spec.r, tuple):
        if len(spec.r) != 1:
            raise ValueError("one-dimensional sum needs a scalar residue")
        return spec.r[0]
    return spec.r


def _h_range(spec: LatticeSumSpec, variant: str) -> Tuple[int, int]:
    """Integer h with x = qh + r admissible: closed [-(X+r)/q, (X-r)/q]
    for two_sided, half-open (-r/q, (X-r)/q] for positive."""
    r = _scalar_residue(spec)
    q, Xf = spec.q, Fraction(spec.X)
    hmax = math.floor((Xf - r) / q)
    if variant == "two_sided":
        hmin = math.ceil(-(Xf + r) / q)
    else:
        hmin = math.floor(Fraction(-r, q)) + 1
    return hmin, hmax


def progression_power_sum(spec: LatticeSumSpec, variant: str = "two_sided") -> float:
    """sum over admissible h of (X^k - (qh + r)^k)^theta."""
    _check_variant(variant)
    r, q, k, theta = _scalar_residue(spec), spec.q, spec.k, spec.theta
    hmin, hmax = _h_range(spec, variant)
    Xf = Fraction(spec.X)
    exact_int = Xf.denominator == 1
    Xk = int(Xf) ** k if exact_int else Xf**k

    def terms() -> Iterator[float]:
        for h in range(hmin, hmax + 1):
            base = Xk - (q * h + r) ** k
            fb = float(base)
            if fb < 0.0:
                fb = 0.0
            yield fb**theta

    return math.fsum(terms())


def _gamma_ratio(theta: float, k: int, dims: int = 1) -> float:
    """Gamma(1+theta) Gamma(1+1/k)^dims / Gamma(1+theta+dims/k)."""
    return math.exp(
        log_gamma(1.0 + theta)
        + dims * log_gamma(1.0 + 1.0 / k)
        - log_gamma(1.0 + theta + dims / k)
    )


def _check_order(N: int, theta: float, cap: float = math.inf) -> None:
    # The expansions hold for 1 <= N <= ceil(theta) (and <= k+1 for the
    # multidimensional positive variant); N = 1 is always accepted since
    # the corresponding error scale X^{k theta} is trivially valid.
    limit = max(1, min(math.ceil(theta), cap))
    if not 1 <= N <= limit:
        raise ValueError(f"order N={N} outside the valid range [1, {limit}]")


def _falling_factorial(theta: float, nu: int) -> float:
    out = 1.0
    for i in range(nu):
        out *= theta - i
    return out


def progression_power_sum_asymptotic(
    spec: LatticeSumSpec, variant: str = "two_sided"
) -> Tuple[float, float, float]:
    """(main, psi, error_scale) for the one-dimensional sum.

    two_sided: main = (2X/q) X^{k theta} * gamma ratio, psi = 0.
    positive (odd k only): main covers half the range, and psi collects
    the boundary terms
        X^{k theta} * sum_{0 <= nu <= (N-1)/k}
            theta falling-factorial(nu) / (nu! (nu k + 1))
            * B_{nu k + 1}({-r/q}) * (q/X)^{k nu}.
    The true error is O(error_scale) = O(X^{k theta} (q/X)^{N-1}).
    """
    _check_variant(variant)
    r, q, k, theta, N = _scalar_residue(spec), spec.q, spec.k, spec.theta, spec.N
    X = float(spec.X)
    xkt = X ** (k * theta)
    ratio = _gamma_ratio(theta, k)
    error_scale = xkt * (q / X) ** (N - 1)
    if variant == "two_sided":
        _check_order(N, theta)
        return (2.0 * X / q) * xkt * ratio, 0.0, error_scale
    if k % 2 == 0:
        raise ValueError("positive-variant asymptotics require odd k")
    _check_order(N, theta)
    main = xkt * X / q * ratio
    psi = 0.0
    for nu in range((N - 1) // k + 1):
        psi += (
            _falling_factorial(theta, nu)
            / (math.factorial(nu) * (nu * k + 1))
            * periodic_bernoulli(nu * k + 1, -r / q)
            * (q / X) ** (k * nu)
        )
    return main, xkt * psi, error_scale


def lattice_power_sum(spec: LatticeSumSpec, variant: str = "two_sided") -> float:
    """sum of (X^k - x_1^k - ... - x_l^k)^theta over x_i = r_i mod q in
    the variant's window, subject to sum x_i^k <= X^k.

    Cost grows as (X/q)^l; meant for desk-scale l <= 3.
    """
    _check_variant(variant)
    rs = spec.residues
    q, k, theta = spec.q, spec.k, spec.theta
    Xf = Fraction(spec.X)
    P = math.floor(Xf)
    exact_int = Xf.denominator == 1
    Xk = int(Xf) ** k if exact_int else Xf**k
    lower = 1 if variant == "positive" else -P
    can_prune = k % 2 == 0 or variant == "positive"

    def values(ri: int) -> range:
        start = lower + ((ri - lower) % q)
        return range(start, P + 1, q)

    def recurse(depth: int, remaining) -> Iterator[float]:
        if depth == len(rs):
            fb = float(remaining)
            if fb >= 0.0:
                yield fb**theta
            return
        for x in values(rs[depth]):
            nxt = remaining - x**k
            if can_prune and nxt < 0:
                if x >= 0:
                    break  # later x in the ascending scan only sink deeper
                continue
            yield from recurse(depth + 1, nxt)

    return math.fsum(recurse(0, Xk))


def lattice_power_sum_asymptotic(
    spec: LatticeSumSpec, variant: str = "two_sided"
) -> Tuple[Tuple[float, ...], float]:
    """(terms, error_scale) for the l-dimensional sum.

    two_sided: the single term (2X/q)^l X^{k theta} * gamma ratio.
    positive (odd k): terms m = 0..l, the m-th carrying the symmetric
    Bernoulli value of order m and a factor (X/q)^(l-m).
    """
    _check_variant(variant)
    rs = spec.residues
    q, k, theta, N, l = spec.q, spec.k, spec.theta, spec.N, len(rs)
    X = float(spec.X)
    xkt = X ** (k * theta)
    error_scale = xkt * (q / X) ** (N - 1) * (1.0 + X / q) ** (l - 1)
    if variant == "two_sided":
        _check_order(N, theta)
        return ((2.0 * X / q) ** l * xkt * _gamma_ratio(theta, k, l),), error_scale
    if k % 2 == 0:
        raise ValueError("positive-variant asymptotics require odd k")
    _check_order(N, theta, cap=k + 1)
    terms = []
    for m in range(l + 1):
        b_m = symmetric_bernoulli(q, rs, m).value
        terms.append(
            xkt * _gamma_ratio(theta, k, l - m) * b_m * (X / q) ** (l - m)
        )
    return tuple(terms), error_scale


@dataclass(frozen=True)
class SymmetricBernoulliValue:
    """sigma_m evaluated at the first periodic Bernoulli values
    B_1({-r_i/q}); order -1 is 0 and order 0 is 1 by convention."""

    m: int
    value: float


def symmetric_bernoulli(q: int, rs: Sequence[int], m: int) -> SymmetricBernoulliValue:
    """Elementary symmetric polynomial of (B_1({-r_1/q}), ..., B_1({-r_l/q})).

    Evaluated by the stable ascending recurrence for elementary symmetric
    polynomials rather than root expansion.
    """
    l = len(rs)
    if not -1 <= m <= l:
        raise ValueError(f"need -1 <= m <= {l}, got {m}")
    if m == -1:
        return SymmetricBernoulliValue(-1, 0.0)
    ys = [periodic_bernoulli(1, -ri / q) for ri in rs]
    esp = [1.0] + [0.0] * m
    for i, y in enumerate(ys):
        for j in range(min(i + 1, m), 0, -1):
            esp[j] += y * esp[j - 1]
    return SymmetricBernoulliValue(m, esp[m])


def _adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    abs_tol: float,
    max_depth: int = 48,
) -> float:
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0

    def step(a, m, b, fa, fm, fb, whole, tol, depth):
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
        right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
        diff = left + right - whole
        if abs(diff) <= 15.0 * tol:
            return left + right + diff / 15.0
        if depth == 0:
            raise QuadratureError(
                f"no convergence on [{a}, {b}] at tolerance {tol:g}"
            )
        half = 0.5 * tol
        return step(a, lm, m, fa, flm, fm, left, half, depth - 1) + step(
            m, rm, b, fm, frm, fb, right, half, depth - 1
        )

    return step(a, m, b, fa, fm, fb, whole, abs_tol, max_depth)


def _segments(a: float, b: float, split_integers: bool) -> list:
    points = [a, b]
    if split_integers:
        points = [a] + [float(t) for t in range(math.floor(a) + 1, math.ceil(b))] + [b]
        points = [p for i, p in enumerate(points) if i == 0 or p > points[i - 1]]
    return list(zip(points[:-1], points[1:]))


def _integrate_segments(
    make_f: Callable[[float, float], Callable[[float], float]],
    segments: Sequence[Tuple[float, float]],
    rel_tol: float,
) -> float:
    """Adaptive Simpson over prepared segments; make_f(lo, hi) returns the
    integrand to use on that segment (so piecewise definitions can pick
    the branch that is smooth up to both endpoints)."""
    coarse = []
    fns = []
    for lo, hi in segments:
        f = make_f(lo, hi)
        fns.append(f)
        mid = 0.5 * (lo + hi)
        coarse.append(abs((hi - lo) * (f(lo) + 4.0 * f(mid) + f(hi)) / 6.0))
    scale = max(math.fsum(coarse), 1e-30)
    tol_per_segment = rel_tol * scale / len(segments)
    return math.fsum(
        _adaptive_simpson(f, lo, hi, tol_per_segment)
        for f, (lo, hi) in zip(fns, segments)
    )


def _integrate(
    f: Callable[[float], float], a: float, b: float, rel_tol: float = 1e-11
) -> float:
    if a == b:
        return 0.0
    return _integrate_segments(lambda lo, hi: f, _segments(a, b, False), rel_tol)


def euler_maclaurin_sum(
    derivatives: Sequence[Callable[[float], float]],
    a: float,
    b: float,
    K: int,
    rel_tol: float = 1e-11,
) -> Tuple[float, float]:
    """Reconstruct sum_{a < n <= b} F(n) through order K.

    derivatives[m] must evaluate F^(m) for m = 0..K.  Returns the
    reconstructed sum together with the raw remainder integral
    integral_a^b B_K({x}) F^(K)(x) dx (whose signed multiple
    -(-1)^K / K! is already folded into the first component).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if not a < b:
        raise ValueError("need a < b")
    if len(derivatives) < K + 1:
        raise ValueError(f"need derivative callables for orders 0..{K}")
    F = derivatives[0]
    value = _integrate(F, float(a), float(b), rel_tol)
    for kappa in range(1, K + 1):
        sign = -1.0 if kappa % 2 else 1.0
        value += (sign / math.factorial(kappa)) * (
            periodic_bernoulli(kappa, b) * derivatives[kappa - 1](b)
            - periodic_bernoulli(kappa, a) * derivatives[kappa - 1](a)
        )
    # B_K({x}) is only piecewise smooth (discontinuous for K = 1) across
    # integers: split there and evaluate the polynomial in the segment's
    # local coordinate, so each piece is smooth through its endpoints.
    def local_form(lo: float, hi: float) -> Callable[[float], float]:
        base = math.floor(lo)
        deriv_k = derivatives[K]
        return lambda x: bernoulli_polynomial(K, x - base) * deriv_k(x)

    remainder = _integrate_segments(
        local_form, _segments(float(a), float(b), True), rel_tol
    )
    sign_k = -1.0 if K % 2 else 1.0
    value -= (sign_k / math.factorial(K)) * remainder
    return value, remainder

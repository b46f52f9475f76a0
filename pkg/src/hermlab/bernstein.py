"""Coefficient-space operator bounds on finite Hermite spans.

Three layers: the explicit factorial bound on ||x^alpha d^beta f|| over the
degree-N span (checked exactly, ratio <= 1), envelope fits for the sharper
Gamma-shaped bounds whose constants are only known to exist, and the exact
expansion of powers of the shifted oscillator (H + n)^k into x^alpha d^beta
terms with per-coefficient growth bounds.

Everything here works on coefficients through the ladder calculus; no
quadrature enters except the optional non-integer weight seminorm.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np
from scipy.special import gammaln

from .hermite import (
    DEGREE_CAP,
    HermiteExpansion,
    apply_harmonic_oscillator,
    apply_position_derivative,
    evaluate,
)

__all__ = [
    "BernsteinCheck",
    "crude_bernstein_check",
    "GammaEnvelopeFit",
    "gamma_envelope_fit",
    "GammaReport",
    "gamma_inequality_check",
    "OperatorExpansion",
    "harmonic_power_expand",
    "weight_seminorm",
]

_MAX_POWER = 12


# -- exact factorial bound ----------------------------------------------------


@dataclass(frozen=True)
class BernsteinCheck:
    """One instance of the factorial bound; ratio <= 1 up to 1e-10 slack."""

    N: int
    alpha: tuple
    beta: tuple
    lhs: float
    rhs: float
    ratio: float


def crude_bernstein_check(f: HermiteExpansion, alpha, beta) -> BernsteinCheck:
    """Check ||x^a d^b f|| <= 2^{(|a|+|b|)/2} sqrt((N+|a|+|b|)!/N!) ||f||.

    The left side is exact ladder calculus; the right side is evaluated in
    log space so the factorial quotient never overflows. The inequality is
    mathematically exact on the degree-N span, so a ratio above 1 + 1e-10
    indicates an implementation bug, not a sharpness failure.
    """
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    beta = tuple(int(b) for b in np.atleast_1d(beta))
    order = sum(alpha) + sum(beta)
    if f.degree + order > DEGREE_CAP:
        raise ValueError("total order exceeds the degree cap")
    lhs = apply_position_derivative(f, alpha, beta).norm()
    fnorm = f.norm()
    if fnorm == 0.0:
        return BernsteinCheck(f.degree, alpha, beta, 0.0, 0.0, 0.0)
    N = f.degree
    log_rhs = (
        0.5 * order * math.log(2.0)
        + 0.5 * (gammaln(N + order + 1) - gammaln(N + 1))
        + math.log(fnorm)
    )
    rhs = math.exp(log_rhs)
    return BernsteinCheck(N, alpha, beta, lhs, rhs, lhs / rhs)


# -- envelope fit for the Gamma-shaped bound ----------------------------------


@dataclass(frozen=True)
class GammaEnvelopeFit:
    """Smallest empirical constants making the Gamma-shaped bound hold.

    The bound has the form
        ||x^a d^b f|| <= K_outer (delta K_base)^{|a|+|b|}
                         Gamma((|a|+|b|)/(2-eps) + 2)
                         exp(N^{1-eps/2} / delta^{2-eps}) ||f||,
    with constants known to exist but not given; K_outer is fitted on the
    order-zero terms and K_base on the envelope of the rest.
    """

    epsilon: float
    delta: float
    K_outer: float
    K_base: float
    max_order: int
    samples: int
    certified: bool


def _log_shape(order: int, degree: int, epsilon: float, delta: float) -> float:
    return float(
        gammaln(order / (2.0 - epsilon) + 2.0)
        + degree ** (1.0 - epsilon / 2.0) / delta ** (2.0 - epsilon)
    )


def gamma_envelope_fit(fs, epsilon: float, delta: float, max_order: int = 6) -> GammaEnvelopeFit:
    """Fit the two free constants of the Gamma-shaped derivative bound.

    For every sample expansion and every (alpha, beta) up to the given total
    order, the exact left side is compared with the bound's shape. The
    order-zero excess pins K_outer; the remaining excess per unit order,
    divided by delta, pins K_base (floored at 1). The returned fit is then
    re-certified against the whole sample.
    """
    if not 0 < epsilon <= 1:
        raise ValueError("ε must lie in (0,1]")
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    fs = list(fs)
    if not fs:
        raise ValueError("need at least one sample expansion")
    rows = []  # (order, log excess over the shape factor)
    for f in fs:
        fnorm = f.norm()
        if fnorm == 0.0:
            continue
        for alpha, beta in _index_pairs(f.dim, max_order):
            order = sum(alpha) + sum(beta)
            lhs = apply_position_derivative(f, alpha, beta).norm()
            if lhs == 0.0:
                continue
            excess = math.log(lhs / fnorm) - _log_shape(order, f.degree, epsilon, delta)
            rows.append((order, excess))
    log_outer = max((e for o, e in rows if o == 0), default=-math.inf)
    log_outer = max(log_outer, 0.0)
    log_base = 0.0
    for order, excess in rows:
        if order == 0:
            continue
        log_base = max(log_base, (excess - log_outer) / order - math.log(delta))
    K_outer = math.exp(log_outer)
    K_base = math.exp(log_base)
    certified = all(
        excess <= log_outer + order * (math.log(delta) + log_base) + 1e-9
        for order, excess in rows
    )
    return GammaEnvelopeFit(
        epsilon=float(epsilon),
        delta=float(delta),
        K_outer=K_outer,
        K_base=K_base,
        max_order=max_order,
        samples=len(fs),
        certified=certified,
    )


@lru_cache(maxsize=64)
def _index_pairs(dim: int, max_order: int):
    """All (alpha, beta) multi-index pairs with |alpha|+|beta| <= max_order."""
    singles = []
    for total in range(max_order + 1):
        for comp in product(range(total + 1), repeat=dim):
            if sum(comp) == total:
                singles.append(comp)
    pairs = [
        (a, b) for a in singles for b in singles if sum(a) + sum(b) <= max_order
    ]
    pairs.sort(key=lambda ab: (sum(ab[0]) + sum(ab[1]), ab))
    return tuple(pairs)


# -- Gamma-function inequality checks -----------------------------------------


@dataclass(frozen=True)
class GammaReport:
    """Grid verification of the Gamma bounds used by the derivative estimates.

    power_margin and product_margin are the smallest log-space slacks of
    x^y <= Gamma(y+1) e^x on the grid and of
    Gamma(x) Gamma(y) <= B(r,r)/(2r) Gamma(x+y+1) on the r-restricted grid.
    root_constants[p] is the fitted smallest C_p with
    Gamma(x)^{1/p} <= C_p (p^{1/p} e^{1/p})^x Gamma(x/p) for x >= 1.
    """

    grid_points: int
    r: float
    power_ok: bool
    power_margin: float
    product_ok: bool
    product_margin: float
    root_constants: dict


def gamma_inequality_check(grid=None, r: float = 1.0) -> GammaReport:
    """Verify the pointwise Gamma inequalities and fit the root constants.

    grid is an iterable of (x, y) pairs in (0, 50]^2; by default a uniform
    120x120 lattice is used. The product bound is checked on the grid points
    with both coordinates >= r. All comparisons run in log space.
    """
    if grid is None:
        axis = np.linspace(0.05, 50.0, 120)
        grid = [(x, y) for x in axis for y in axis]
    pts = np.asarray(list(grid), dtype=np.float64)
    if pts.size == 0 or np.any(pts <= 0) or np.any(pts > 50):
        raise ValueError("grid points must lie in (0, 50]^2")
    x = pts[:, 0]
    y = pts[:, 1]

    power_margin = float(np.min(gammaln(y + 1.0) + x - y * np.log(x)))

    mask = (x >= r) & (y >= r)
    log_beta_rr = gammaln(r) + gammaln(r) - gammaln(2.0 * r)
    if np.any(mask):
        lhs = gammaln(x[mask]) + gammaln(y[mask])
        rhs = log_beta_rr - math.log(2.0 * r) + gammaln(x[mask] + y[mask] + 1.0)
        product_margin = float(np.min(rhs - lhs))
    else:
        product_margin = math.inf

    xs = np.linspace(1.0, 50.0, 4000)
    root_constants = {}
    for p in (2, 3):
        log_ratio = gammaln(xs) / p - xs * (math.log(p) + 1.0) / p - gammaln(xs / p)
        root_constants[p] = float(np.exp(np.max(log_ratio)))

    return GammaReport(
        grid_points=int(pts.shape[0]),
        r=float(r),
        power_ok=power_margin >= -1e-12,
        power_margin=power_margin,
        product_ok=product_margin >= -1e-12,
        product_margin=product_margin,
        root_constants=root_constants,
    )


# -- powers of the shifted oscillator ------------------------------------------


def _ladder_chain_1d(m: int) -> dict:
    """Coefficients of the alternating chain (x+d)(x-d)(x+d)... with m+1 factors.

    Stage m maps (l1, l2) -> coefficient of x^{l1} d^{l2}; appending the next
    factor on the right multiplies by (x + (-1)^{m+1} d). Each stage obeys
    |coef| <= 3^m (m+1)^{(m+1-l1-l2)/2}, which is asserted as it is built.
    """
    terms = {(1, 0): 1.0, (0, 1): 1.0}
    _assert_chain_bound(terms, 0)
    for m_prev in range(m):
        sign = float((-1) ** (m_prev + 1))
        new: dict = {}
        for (l1, l2), c in terms.items():
            # right-multiply by x: x^{l1} d^{l2} x = x^{l1+1} d^{l2} + l2 x^{l1} d^{l2-1}
            new[(l1 + 1, l2)] = new.get((l1 + 1, l2), 0.0) + c
            if l2 >= 1:
                new[(l1, l2 - 1)] = new.get((l1, l2 - 1), 0.0) + c * l2
            # right-multiply by the signed derivative
            new[(l1, l2 + 1)] = new.get((l1, l2 + 1), 0.0) + sign * c
        terms = {k: v for k, v in new.items() if v != 0.0}
        _assert_chain_bound(terms, m_prev + 1)
    return terms


def _assert_chain_bound(terms: dict, m: int) -> None:
    for (l1, l2), c in terms.items():
        bound = 3.0**m * (m + 1.0) ** ((m + 1 - l1 - l2) / 2.0)
        if abs(c) > bound * (1.0 + 1e-12):
            raise AssertionError(
                f"chain coefficient bound violated at stage {m}: {(l1, l2)} -> {c}"
            )


@lru_cache(maxsize=32)
def _oscillator_power_1d(k: int) -> tuple:
    """1-D terms of (x^2 - d^2 + 1)^k as ((l1, l2), coef) pairs."""
    if k == 0:
        return (((0, 0), 1.0),)
    chain = _ladder_chain_1d(2 * k - 1)
    return tuple(sorted(chain.items()))


@dataclass(frozen=True)
class OperatorExpansion:
    """(H + n)^k written as a combination of x^alpha d^beta terms.

    H is the harmonic oscillator -Laplacian + |x|^2 on R^n. terms maps
    (alpha, beta) pairs of multi-indices to real coefficients; only orders
    |alpha + beta| <= 2k occur.
    """

    k: int
    dim: int
    terms: dict = field(repr=False)

    def coefficient_bound(self, alpha, beta) -> float:
        """A-priori bound 3^{2k-n} n^k (2k)^{(2k-|a+b|)/2} on the coefficient."""
        order = sum(alpha) + sum(beta)
        if self.k == 0:
            return 1.0
        return (
            3.0 ** (2 * self.k - self.dim)
            * self.dim**self.k
            * (2.0 * self.k) ** ((2 * self.k - order) / 2.0)
        )

    def apply(self, f: HermiteExpansion) -> HermiteExpansion:
        """Termwise action; the result has degree f.degree + 2k."""
        target = f.degree + 2 * self.k
        acc = None
        for (alpha, beta), c in sorted(self.terms.items()):
            piece = apply_position_derivative(f, alpha, beta).with_degree(target)
            acc = piece.coeffs * c if acc is None else acc + c * piece.coeffs
        if acc is None:
            acc = np.zeros(1)
        return HermiteExpansion(f.dim, target, acc)


def harmonic_power_expand(k: int, dim: int) -> OperatorExpansion:
    """Exact x^alpha d^beta expansion of (H + n)^k on R^n.

    Built from the 1-D alternating ladder chain, whose stagewise coefficient
    bound is asserted during construction, and tensored across axes with
    multinomial weights: (H+n)^k = sum_{|m|=k} k!/m! prod_j (H_j+1)^{m_j}.
    """
    if k < 0:
        raise ValueError("power must be non-negative")
    if k > _MAX_POWER:
        raise ValueError(f"power {k} exceeds cap {_MAX_POWER}")
    if dim < 1:
        raise ValueError("dimension must be positive")
    terms: dict = {}
    for m in _compositions(k, dim):
        weight = math.factorial(k)
        for mj in m:
            weight //= math.factorial(mj)
        for combo in product(*(_oscillator_power_1d(mj) for mj in m)):
            alpha = tuple(l1 for (l1, _), _ in combo)
            beta = tuple(l2 for (_, l2), _ in combo)
            coef = float(weight)
            for _, c in combo:
                coef *= c
            key = (alpha, beta)
            terms[key] = terms.get(key, 0.0) + coef
    terms = {kk: v for kk, v in terms.items() if v != 0.0}
    return OperatorExpansion(k=k, dim=dim, terms=terms)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def iterated_oscillator_apply(f: HermiteExpansion, k: int) -> HermiteExpansion:
    """Reference action: apply (H + n) k times through the diagonal calculus."""
    out = f
    for _ in range(k):
        shifted = apply_harmonic_oscillator(out).coeffs + out.dim * out.coeffs
        out = HermiteExpansion(out.dim, out.degree, shifted)
    return out.with_degree(f.degree + 2 * k)


# -- weighted seminorms --------------------------------------------------------


def weight_seminorm(f: HermiteExpansion, r: float, beta=None) -> float:
    """||<x>^r d^beta f|| with <x> = sqrt(1 + |x|^2).

    Integer r uses the exact expansion ||<x>^r g||^2 =
    sum_{g0 + |g| = r} r!/(g0! g!) ||x^g g||^2 through the ladder calculus;
    non-integer r falls back to panel quadrature (1-D only).
    """
    beta = tuple(int(b) for b in (beta if beta is not None else (0,) * f.dim))
    g = apply_position_derivative(f, (0,) * f.dim, beta)
    if r < 0:
        raise ValueError("weight power must be non-negative")
    if float(r).is_integer():
        k = int(r)
        total = 0.0
        for comp in _compositions(k, f.dim + 1):
            g0, gamma = comp[0], comp[1:]
            weight = math.factorial(k) / math.factorial(g0)
            for gj in gamma:
                weight /= math.factorial(gj)
            total += weight * apply_position_derivative(g, gamma, (0,) * f.dim).norm() ** 2
        return math.sqrt(total)
    if f.dim != 1:
        raise ValueError("non-integer weight powers are supported in 1-D only")
    R = math.sqrt(4.0 * (g.degree + 1) + 20.0)
    xs, ws = np.polynomial.legendre.leggauss(64)
    edges = np.linspace(-R, R, int(4 * R) + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        pts = (hi + lo) / 2 + (hi - lo) / 2 * xs
        vals = evaluate(g, pts)
        w = (1.0 + pts**2) ** r
        total += (hi - lo) / 2 * float(np.sum(ws * w * np.abs(vals) ** 2))
    return math.sqrt(total)

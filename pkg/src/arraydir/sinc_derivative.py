"""Exact z-derivatives of sin(r)/r with r = sqrt(beta^2 + z^2).

Every derivative is a finite sum of terms ``c * z^a * r^-q * trig(r)`` with
trig in {sin, cos}; the family is closed under d/dz:

    d(z^a)/dz    = a z^(a-1)
    d(r^-q)/dz   = -q z r^(-q-2)
    d(sin r)/dz  =  z r^-1 cos r
    d(cos r)/dz  = -z r^-1 sin r

Coefficients are Fractions (they stay integral, but grow fast). Evaluation
near r = 0 divides by high powers of a small r, so small radii go through
the Maclaurin series of sin(sqrt(w))/sqrt(w) instead. The cancellation in
the term sum worsens with order, so the switch radius grows with p.
"""

from dataclasses import dataclass
import decimal
from fractions import Fraction
from functools import cached_property
import math
import threading

import numpy as np

from .special import sinc_radius

SERIES_SWITCH_RADIUS = 1.0
SERIES_SWITCH_SLOPE = 1.25
# eval_terms refuses radii below this; the dispatch never goes below 1.0
MIN_TERMS_RADIUS = 0.5
SERIES_TOL = 1e-18
_SERIES_MAX_EXTRA = 400


@dataclass(frozen=True, order=True)
class Term:
    zpow: int
    rpow: int
    trig: str
    coeff: Fraction

    def __post_init__(self):
        if self.trig not in ("sin", "cos"):
            raise ValueError(f"trig must be 'sin' or 'cos', got {self.trig!r}")
        if self.zpow < 0 or self.rpow < 1:
            raise ValueError(f"bad powers z^{self.zpow} r^-{self.rpow}")

    @property
    def key(self):
        return self.zpow, self.rpow, self.trig

    def derivative(self):
        c, a, q = self.coeff, self.zpow, self.rpow
        if a:
            yield Term(a - 1, q, self.trig, c * a)
        yield Term(a + 1, q + 2, self.trig, -q * c)
        if self.trig == "sin":
            yield Term(a + 1, q + 1, "cos", c)
        else:
            yield Term(a + 1, q + 1, "sin", -c)

    def __str__(self):
        z = "" if self.zpow == 0 else (" z" if self.zpow == 1 else f" z^{self.zpow}")
        return f"{self.coeff} *{z} r^-{self.rpow} {self.trig}(r)"


@dataclass(frozen=True)
class TermSum:
    """Canonical sum of terms: merged by (zpow, rpow, trig), zeros dropped, sorted."""

    terms: tuple

    @classmethod
    def from_terms(cls, terms):
        merged = {}
        for t in terms:
            merged[t.key] = merged.get(t.key, Fraction(0)) + Fraction(t.coeff)
        return cls(tuple(Term(a, q, trig, c)
                         for (a, q, trig), c in sorted(merged.items()) if c != 0))

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def derivative(self):
        return TermSum.from_terms(d for t in self.terms for d in t.derivative())

    @cached_property
    def _packed(self):
        # coefficients go through str so big integers keep every digit
        coeff = np.array([np.longdouble(str(t.coeff.numerator)) / np.longdouble(str(t.coeff.denominator))
                          for t in self.terms], dtype=np.longdouble)
        zpow = np.array([t.zpow for t in self.terms], dtype=int)
        rpow = np.array([t.rpow for t in self.terms], dtype=int)
        is_sin = np.array([t.trig == "sin" for t in self.terms], dtype=bool)
        return coeff, zpow, rpow, is_sin

    def __str__(self):
        if not self.terms:
            return "0"
        return "\n".join(("+ " if t.coeff > 0 else "- ") + str(Term(t.zpow, t.rpow, t.trig, abs(t.coeff)))
                         for t in self.terms)


SEED = TermSum((Term(0, 1, "sin", Fraction(1)),))

_cache = [SEED]
_cache_lock = threading.Lock()


def derive_terms(order):
    """d^order/dz^order of sin(r)/r as a TermSum (memoised)."""
    if order < 0:
        raise ValueError(f"derivative order must be >= 0, got {order}")
    if order < len(_cache):
        return _cache[order]
    with _cache_lock:
        while len(_cache) <= order:
            _cache.append(_cache[-1].derivative())
        return _cache[order]


def _decimal_sin_cos(x):
    # plain Taylor series; x stays below the dispatch radius, so few terms
    eps = decimal.Decimal(1).scaleb(-decimal.getcontext().prec - 2)
    sin_x, cos_x = decimal.Decimal(0), decimal.Decimal(0)
    term, k = decimal.Decimal(1), 0
    while k < 2 or abs(term) > eps:
        sign = -1 if k % 4 >= 2 else 1
        if k % 2:
            sin_x += sign * term
        else:
            cos_x += sign * term
        k += 1
        term = term * x / k
    return sin_x, cos_x


def _eval_terms_decimal(terms, beta, z):
    r_float = math.hypot(beta, z)
    # digits lost to cancellation ~ log10 of the largest term (the result is O(1))
    loss = max(math.log10(abs(t.coeff)) + t.zpow * math.log10(max(abs(z), 1e-300))
               - t.rpow * math.log10(r_float) for t in terms)
    with decimal.localcontext() as ctx:
        ctx.prec = 34 + max(0, math.ceil(loss))
        b, zd = decimal.Decimal(beta), decimal.Decimal(z)
        r = (b * b + zd * zd).sqrt()
        sin_r, cos_r = _decimal_sin_cos(r)
        total = decimal.Decimal(0)
        for t in terms:
            coeff = decimal.Decimal(t.coeff.numerator) / decimal.Decimal(t.coeff.denominator)
            total += coeff * zd ** t.zpow / r ** t.rpow * (sin_r if t.trig == "sin" else cos_r)
        return float(total)


def eval_terms(terms, beta, z):
    """Evaluate a TermSum at (beta, z) in extended precision.

    Inside the radius where the dispatcher would use the series, the term
    sum cancels heavily; there it is evaluated in decimal arithmetic with
    enough digits to absorb the loss.
    """
    beta_l = np.longdouble(beta)
    z_l = np.longdouble(z)
    r = np.sqrt(beta_l * beta_l + z_l * z_l)
    if r < MIN_TERMS_RADIUS:
        raise ValueError(f"r={float(r):.3g} is below {MIN_TERMS_RADIUS}; use eval_series")
    if not len(terms):
        return 0.0
    # order n carries r^-(2n+1) at most; the engine asks for n = 2p
    p = (max(t.rpow for t in terms) - 1) // 4
    if r < series_radius(p):
        return _eval_terms_decimal(terms, beta, z)
    coeff, zpow, rpow, is_sin = terms._packed
    inv_r = 1 / r
    trig = np.where(is_sin, np.sin(r), np.cos(r))
    values = coeff * z_l ** zpow * inv_r ** rpow * trig
    return float(np.sum(values))


def _series_term(k, p, b2, z2):
    # d^2p/dz^2p of w^k / (2k+1)!, w = b2 + z2; every j-contribution is >= 0
    total = 0.0
    fact = math.factorial(2 * k + 1)
    for j in range(p, k + 1):
        c = math.comb(k, j) * math.perm(2 * j, 2 * p) / fact
        total += c * b2 ** (k - j) * z2 ** (j - p)
    return total


def eval_series(p, beta, z):
    """d^2p/dz^2p of sin(r)/r by differentiating its Maclaurin series in w = r^2.

    sin(sqrt(w))/sqrt(w) = sum_k (-1)^k w^k / (2k+1)!. Meant for r < 1; it
    converges everywhere but cancels badly at large r.
    """
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    b2, z2 = beta * beta, z * z
    parts = []
    previous = math.inf
    for k in range(p, p + _SERIES_MAX_EXTRA):
        term = _series_term(k, p, b2, z2)
        parts.append(-term if k % 2 else term)
        if term < SERIES_TOL and term <= previous:
            break
        previous = term
    return math.fsum(parts)


def series_radius(p):
    """Radius below which sinc_derivative uses the series for order 2p."""
    return max(SERIES_SWITCH_RADIUS, SERIES_SWITCH_SLOPE * p)


def sinc_derivative(p, beta, z):
    """d^2p/dz^2p [sin(r)/r] at r = sqrt(beta^2 + z^2), beta >= 0."""
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    if p == 0:
        return sinc_radius(beta, z)
    if math.hypot(beta, z) < series_radius(p):
        return eval_series(p, beta, z)
    return eval_terms(derive_terms(2 * p), beta, z)

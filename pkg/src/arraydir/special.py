"""Special functions used by the closed-form normalization.

Only what the directivity formula needs: J0 on the real line, the Beta
coefficient B(u+1, v+1/2) for nonnegative integers (exactly, as a
Fraction) and the removable-singularity kernel sin(r)/r.
"""

from fractions import Fraction
import math

import numpy as np

# Double-double power series below this radius, Hankel asymptotics above.
J0_SERIES_LIMIT = 25.0
_HANKEL_TERMS = 40
_SINC_SERIES_RADIUS = 1e-4


# error-free transforms on float64 arrays (Dekker / Knuth)

def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    return _quick_two_sum(s, e + (al + bl))


def _dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    return _quick_two_sum(p, e + (ah * bl + al * bh))


def _dd_div_int(ah, al, d):
    q = ah / d
    p, e = _two_prod(q, float(d))
    return _quick_two_sum(q, ((ah - p) - e + al) / d)


def _j0_series(x):
    # sum (-1)^k q^k / (k!)^2 with q = (x/2)^2, all in double-double
    half = 0.5 * x
    qh, ql = _two_prod(half, half)
    th = np.ones_like(x)
    tl = np.zeros_like(x)
    sh = np.ones_like(x)
    sl = np.zeros_like(x)
    k = 0
    while True:
        k += 1
        th, tl = _dd_mul(th, tl, qh, ql)
        th, tl = _dd_div_int(-th, -tl, k * k)
        sh, sl = _dd_add(sh, sl, th, tl)
        if k > half.max(initial=0.0) and np.all(np.abs(th) < 1e-20):
            break
    return sh + sl


def _j0_hankel(x):
    # DLMF 10.17.3 with nu = 0: a_k = prod_{j<=k} (-(2j-1)^2) / (k! 8^k)
    inv = 1.0 / x
    p = np.ones_like(x)
    q = np.zeros_like(x)
    a = 1.0
    power = np.ones_like(x)
    for k in range(1, _HANKEL_TERMS + 1):
        a *= -((2 * k - 1) ** 2) / (8.0 * k)
        power = power * inv
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sign * a * power
        else:
            q += sign * a * power
    s, c = np.sin(x), np.cos(x)
    # cos(x - pi/4) and sin(x - pi/4) without rounding pi/4 into x
    return np.sqrt(1.0 / (np.pi * x)) * (p * (c + s) - q * (s - c))


def bessel_j0(x):
    """Bessel function of the first kind, order zero.

    Accepts a float or an array. Absolute error is below 1e-12 for
    ``|x| <= 50`` and below 1e-10 up to ``|x| = 1000``.
    """
    arr = np.abs(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(arr)):
        raise ValueError("bessel_j0 requires finite input")
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    small = flat < J0_SERIES_LIMIT
    if small.any():
        out[small] = _j0_series(flat[small])
    if (~small).any():
        out[~small] = _j0_hankel(flat[~small])
    out = out.reshape(arr.shape)
    if np.ndim(x) == 0:
        return float(out)
    return out


def _gamma_half_integer(x):
    """Gamma at a positive integer or half-integer, as (rational, sqrt(pi) power)."""
    x = Fraction(x)
    if x.denominator == 1:
        return Fraction(math.factorial(x.numerator - 1)), 0
    if x.denominator != 2 or x <= 0:
        raise ValueError(f"not a positive half-integer: {x}")
    value = Fraction(1)
    t = Fraction(1, 2)
    while t < x:
        value *= t
        t += 1
    return value, 1


def beta_half(u, v):
    """Exact B(u+1, v+1/2) for integers u, v >= 0.

    The sqrt(pi) factors of Gamma(v+1/2) and Gamma(u+v+3/2) cancel, so the
    result is a Fraction.
    """
    if u < 0 or v < 0:
        raise ValueError(f"beta_half needs u, v >= 0, got u={u}, v={v}")
    ga, pa = _gamma_half_integer(u + 1)
    gb, pb = _gamma_half_integer(Fraction(2 * v + 1, 2))
    gc, pc = _gamma_half_integer(Fraction(2 * (u + v) + 3, 2))
    assert pa + pb == pc
    return ga * gb / gc


def sinc_radius(beta, z):
    """sin(r)/r at r = sqrt(beta^2 + z^2), equal to 1 at r = 0."""
    r = math.hypot(beta, z)
    if r < _SINC_SERIES_RADIUS:
        r2 = r * r
        return 1.0 - r2 / 6.0 + r2 * r2 / 120.0
    return math.sin(r) / r

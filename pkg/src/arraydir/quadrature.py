"""Numerical integration oracle.

Adaptive Gauss-Kronrod (7/15) quadrature and the integrals the closed form
replaces. Nothing here calls the symbolic derivative engine, so agreement
between the two routes is an independent check.
"""

from dataclasses import dataclass
import math

import numpy as np

from .pattern import power_factor
from .special import bessel_j0

DEFAULT_REL_TOL = 1e-10
MAX_DEPTH = 60
MAX_PANELS = 20000

# QUADPACK qk15 abscissae and weights
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:7:2] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[9:14:2] = _WG[2::-1]


class QuadratureError(RuntimeError):
    """Adaptive integration stopped before reaching its tolerance."""


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


def _adaptive(f, a, b, rel_tol, abs_tol, max_depth=MAX_DEPTH, max_panels=MAX_PANELS):
    """Core adaptive loop; ``f`` maps a 1-D node array to values of shape (n, *out).

    All panels that miss their share of the tolerance are bisected together,
    so ``f`` sees a few large batches instead of many 15-point calls.
    Returns (value, error, evaluations) with value/error of shape ``out``.
    """
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    depth = np.zeros(1, dtype=int)
    done_val = 0.0
    done_err = 0.0
    evaluations = 0
    length = b - a
    while True:
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        x = (mid[:, None] + half[:, None] * NODES[None, :]).reshape(-1)
        fx = np.asarray(f(x), dtype=float)
        evaluations += x.size
        fx = fx.reshape((lo.size, 15) + fx.shape[1:])
        kron = np.tensordot(fx, KRONROD_WEIGHTS, axes=([1], [0]))
        gauss = np.tensordot(fx, GAUSS_WEIGHTS, axes=([1], [0]))
        scale = half.reshape((-1,) + (1,) * (kron.ndim - 1))
        # QUADPACK's scaled estimate: resasc * min(1, (200 |K - G| / resasc)^1.5)
        mean = kron / 2.0
        resasc = np.tensordot(np.abs(fx - mean[:, None]), KRONROD_WEIGHTS, axes=([1], [0])) * scale
        kron = kron * scale
        raw = np.abs(kron - gauss * scale)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(resasc > 0, 200.0 * raw / resasc, 0.0)
        err = np.where(resasc > 0, resasc * np.minimum(1.0, ratio ** 1.5), raw)
        panel_err = err.reshape(lo.size, -1).max(axis=1)

        total = done_val + kron.sum(axis=0)
        tol = max(abs_tol, rel_tol * float(np.max(np.abs(total))))
        share = tol * (hi - lo) / length
        ok = panel_err <= share
        done_val = done_val + kron[ok].sum(axis=0)
        done_err = done_err + err[ok].sum(axis=0)
        if ok.all():
            break
        bad = ~ok
        if np.any(depth[bad] >= max_depth):
            raise QuadratureError(f"maximum subdivision depth {max_depth} reached on [{a}, {b}]")
        lo_b, hi_b, mid_b = lo[bad], hi[bad], mid[bad]
        lo = np.concatenate([lo_b, mid_b])
        hi = np.concatenate([mid_b, hi_b])
        depth = np.concatenate([depth[bad], depth[bad]]) + 1
        if lo.size > max_panels:
            raise QuadratureError(f"more than {max_panels} active panels on [{a}, {b}]")
    return done_val, done_err, evaluations


def _check_interval(a, b, rel_tol):
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if not 1e-13 <= rel_tol <= 1e-2:
        raise ValueError(f"rel_tol must lie in [1e-13, 1e-2], got {rel_tol}")


def integrate_1d(f, a, b, rel_tol=DEFAULT_REL_TOL, *, abs_tol=0.0, vectorized=False):
    """Adaptive Gauss-Kronrod integral of a real function over [a, b].

    Converges when the summed (QUADPACK-scaled) |K15 - G7| estimate is below
    ``max(abs_tol, rel_tol * |I|)``. Pass ``abs_tol`` for integrals that
    may vanish. ``vectorized=True`` means ``f`` accepts a node array.
    """
    _check_interval(a, b, rel_tol)
    if vectorized:
        g = f
    else:
        def g(x):
            return np.array([f(float(t)) for t in x])
    value, err, n = _adaptive(g, float(a), float(b), rel_tol, abs_tol)
    return QuadratureResult(float(value), float(err), n)


def normalization_numeric(array, pattern, rel_tol=DEFAULT_REL_TOL):
    """(1/4pi) * double integral of the radiation intensity over the sphere.

    Iterated: for each batch of theta nodes the phi integral of |AF|^2 is
    done as one vector-valued adaptive integral, then weighted by
    sin^(2u+1) cos^(2v) and integrated over theta. |AF|^2 is formed from the
    element sum directly, not from the pair expansion.
    """
    return normalization_numeric_many(array, [pattern], rel_tol)[0]


def normalization_numeric_many(array, patterns, rel_tol=DEFAULT_REL_TOL):
    """normalization_numeric for several patterns of one array.

    The phi integrals do not depend on the pattern, so they are computed
    once per theta node and shared.
    """
    _check_interval(0.0, math.pi, rel_tol)
    inner_tol = max(rel_tol / 10.0, 1e-13)
    floor = 1e-3 * rel_tol * 2.0 * math.pi * float(np.dot(array.amplitudes, array.amplitudes))
    kx, ky, kz = (array.k * array.positions).T
    amp = array.amplitudes.astype(complex)
    alpha = array.phases
    rings = {}
    evaluations = 0

    def ring_integrals(theta):
        nonlocal evaluations
        st = np.sin(theta)[None, :, None]
        axial = (np.cos(theta)[:, None] * kz + alpha)[None, :, :]

        def inner(phi):
            transverse = kx * np.cos(phi)[:, None] + ky * np.sin(phi)[:, None]
            field = np.exp(1j * (st * transverse[:, None, :] + axial)) @ amp
            return field.real ** 2 + field.imag ** 2

        values, _, n = _adaptive(inner, 0.0, 2.0 * math.pi, inner_tol, floor)
        evaluations += n * theta.size
        return values

    def ring(theta):
        missing = np.array(sorted({t for t in theta.tolist() if t not in rings}))
        if missing.size:
            rings.update(zip(missing.tolist(), ring_integrals(missing).tolist()))
        return np.array([rings[t] for t in theta.tolist()])

    results = []
    for pattern in patterns:
        def outer(theta, pattern=pattern):
            return power_factor(pattern, theta) * np.sin(theta) * ring(theta)

        before = evaluations
        value, err, _ = _adaptive(outer, 0.0, math.pi, rel_tol, 0.0)
        scale = 1.0 / (4.0 * math.pi)
        results.append(QuadratureResult(float(value) * scale, float(err) * scale,
                                        evaluations - before))
    return results


def phi_identity_check(a, b, c):
    """Both sides of int_0^2pi cos(a cos phi + b sin phi + c) dphi = 2pi cos(c) J0(sqrt(a^2+b^2))."""
    lhs = integrate_1d(lambda phi: np.cos(a * np.cos(phi) + b * np.sin(phi) + c),
                       0.0, 2.0 * math.pi, 1e-12, abs_tol=1e-13, vectorized=True)
    rhs = 2.0 * math.pi * math.cos(c) * bessel_j0(math.hypot(a, b))
    return lhs.value, rhs


def _weight(u, v, x):
    return x ** (2 * v) * (1.0 - x * x) ** u


def cross_integral_numeric(u, v, beta, z, rel_tol=DEFAULT_REL_TOL, abs_tol=1e-13):
    """int_0^1 x^2v (1-x^2)^u cos(z x) J0(beta sqrt(1-x^2)) dx by quadrature."""
    if u < 0 or v < 0:
        raise ValueError(f"exponents must be >= 0, got u={u}, v={v}")

    def f(x):
        return _weight(u, v, x) * np.cos(z * x) * bessel_j0(beta * np.sqrt(np.maximum(1.0 - x * x, 0.0)))

    return integrate_1d(f, 0.0, 1.0, rel_tol, abs_tol=abs_tol, vectorized=True)


def parity_check(u, v, beta, z, rel_tol=DEFAULT_REL_TOL):
    """int_-1^1 x^2v (1-x^2)^u sin(z x) J0(beta sqrt(1-x^2)) dx, which should vanish."""
    if u < 0 or v < 0:
        raise ValueError(f"exponents must be >= 0, got u={u}, v={v}")

    def f(x):
        return _weight(u, v, x) * np.sin(z * x) * bessel_j0(beta * np.sqrt(np.maximum(1.0 - x * x, 0.0)))

    return integrate_1d(f, -1.0, 1.0, rel_tol, abs_tol=1e-12, vectorized=True).value

"""Closed-form normalization integral and directivity.

The sphere average of the radiation intensity splits into a self term and
a pair (cross) term:

    T = (1/2) B(u+1, v+1/2) sum_n A_n^2
        + 2 (-1)^v sum_{n>m} A_n A_m cos(alpha_mn)
              sum_k C(u, k) d^2(v+u-k)/dz^2(v+u-k) [sin(r)/r]

with r = sqrt(beta_mn^2 + z_mn^2). Directivity is intensity / T.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
import os

import numpy as np

from .pattern import Direction, ElementPattern, intensity_grid, radiation_intensity
from .sinc_derivative import sinc_derivative
from .special import beta_half, sinc_radius

SPECIALIZED_CASES = ("T1", "T2", "T3", "T4")


class NormalizationError(ArithmeticError):
    """The normalization integral came out non-positive."""


@dataclass(frozen=True)
class NormalizationBreakdown:
    self_term: float
    cross_term: float
    total: float


@dataclass(frozen=True)
class DirectivityResult:
    linear: float
    dBi: float
    direction: Direction
    breakdown: NormalizationBreakdown


def to_dbi(linear):
    return 10.0 * math.log10(linear) if linear > 0 else -math.inf


def normalization_self(array, pattern):
    coeff = beta_half(pattern.u, pattern.v) / 2
    return float(coeff) * math.fsum(a * a for a in array.amplitudes)


def pair_kernel(pattern, beta, z):
    """sum_k C(u, k) D_{v+u-k}(beta, z), the pattern-dependent pair factor."""
    u, v = pattern.u, pattern.v
    return math.fsum(math.comb(u, k) * sinc_derivative(v + u - k, beta, z) for k in range(u + 1))


def normalization_cross(array, pattern):
    pairs = array.pair_table
    terms = [
        w * math.cos(a) * pair_kernel(pattern, b, z)
        for w, a, b, z in zip(pairs["weight"], pairs["alpha"], pairs["beta"], pairs["z"])
        if w
    ]
    sign = -1.0 if pattern.v % 2 else 1.0
    return 2.0 * sign * math.fsum(terms)


def normalization(array, pattern):
    self_term = normalization_self(array, pattern)
    cross_term = normalization_cross(array, pattern)
    total = self_term + cross_term
    if not total > 0:
        raise NormalizationError(
            f"normalization total {total!r} is not positive (self {self_term!r}, cross {cross_term!r})")
    return NormalizationBreakdown(self_term, cross_term, total)


def directivity(array, pattern, direction, breakdown=None):
    """Directivity towards ``direction``; pass ``breakdown`` to reuse a normalization."""
    if breakdown is None:
        breakdown = normalization(array, pattern)
    linear = radiation_intensity(array, pattern, direction) / breakdown.total
    linear = max(linear, 0.0)
    return DirectivityResult(linear, to_dbi(linear), direction, breakdown)


# Reference closed forms for the four low-order patterns, kept verbatim
# (including their misprints) for cross-checking. T1: (0,0), T2: (0,1),
# T3: (1,0), T4: (1,1).

def _bracket_t2(b, z):
    b2, z2 = b * b, z * z
    w = b2 + z2
    r = math.sqrt(w)
    return ((b2 - 2 * z2) * math.cos(r) / w ** 2
            - ((b2 - 2) * z2 + b2 + z2 * z2) * math.sin(r) / w ** 2.5)


def _bracket_t3(b, z):
    b2, z2 = b * b, z * z
    w = b2 + z2
    r = math.sqrt(w)
    b4, b6, z4 = b2 * b2, b2 * b2 * b2, z2 * z2
    psi1 = ((b6 * (-(z2 - 2)) - b4 * (4 * z4 + 27 * z2 + 9) - b2 * z2 * (5 * z4 + 15 * z2 - 72)
             - 2 * z4 * (z4 - 7 * z2 + 12)) * math.sin(r) / w ** 4.5)
    psi2 = ((b6 + 3 * b4 * (2 * z2 + 3) - b2 * z2 * (z2 + 72) - 6 * z4 * (z2 - 4))
            * math.cos(r) / w ** 4)
    return psi1 + psi2


def _bracket_t4(b, z):
    b2, z2 = b * b, z * z
    w = b2 + z2
    r = math.sqrt(w)
    b4, b6, b8, b10 = b2 ** 2, b2 ** 3, b2 ** 4, b2 ** 5
    z4, z6 = z2 ** 2, z2 ** 3
    psi3 = math.sin(r) * (
        -3 * b10 + b8 * (z4 - 24 * z2 - 81) + b6 * (5 * z6 + 114 * z4 + 1611 * z2 + 225)
        + 3 * b4 * z2 * (3 * z6 + 82 * z4 - 292 * z2 - 1350)
        + b2 * z4 * (7 * z6 + 69 * z4 - 2184 * z2 + 5400)
        + 2 * z6 * (z6 - 21 * z4 + 192 * z2 - 360)) / w ** 6.5
    psi4 = math.cos(r) * (
        6 * b8 * (z2 - 1) + b6 * (29 * z4 + 336 * z2 + 225) + 6 * b4 * z2 * (5 * z4 - 71 * z2 - 675)
        - (3 * b2 * z4 * (z4 + 208 * z2 - 1800) + 2 * z6 * (5 * z4 - 72 * z2 + 360))) / w ** 6
    return psi3 + psi4


_SPECIALIZED = {
    # case: (self coefficient, cross sign, bracket)
    "T1": (1.0, 2.0, sinc_radius),
    "T2": (1.0 / 3.0, -2.0, _bracket_t2),
    "T3": (2.0 / 3.0, 2.0, _bracket_t3),
    "T4": (2.0 / 15.0, 2.0, _bracket_t4),
}

SPECIALIZED_PATTERNS = {
    "T1": ElementPattern(0, 0),
    "T2": ElementPattern(0, 1),
    "T3": ElementPattern(1, 0),
    "T4": ElementPattern(1, 1),
}


def specialized_normalization(array, case):
    """Normalization from the reference closed form ``case`` (T1..T4), as written.

    T2..T4 are singular for coincident elements; such pairs raise ValueError.
    """
    if case not in _SPECIALIZED:
        raise ValueError(f"unknown case {case!r}; expected one of {', '.join(SPECIALIZED_CASES)}")
    self_coeff, cross_coeff, bracket = _SPECIALIZED[case]
    pairs = array.pair_table
    terms = []
    for w, a, b, z in zip(pairs["weight"], pairs["alpha"], pairs["beta"], pairs["z"]):
        if not w:
            continue
        if case != "T1" and b == 0 and z == 0:
            raise ValueError(f"{case} reference form is undefined for coincident elements")
        terms.append(w * math.cos(a) * bracket(b, z))
    return self_coeff * math.fsum(a * a for a in array.amplitudes) + cross_coeff * math.fsum(terms)


# sphere scans

@dataclass(frozen=True)
class ScanResult:
    theta: np.ndarray  # radians, shape (T,)
    phi: np.ndarray  # radians, shape (P,)
    linear: np.ndarray  # shape (T, P)
    breakdown: NormalizationBreakdown
    argmax: tuple  # (i, j) grid indices

    @property
    def dbi(self):
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.linear)

    @property
    def best(self):
        return self.result_at(*self.argmax)

    def result_at(self, i, j):
        value = float(self.linear[i, j])
        return DirectivityResult(value, to_dbi(value),
                                 Direction(float(self.theta[i]), float(self.phi[j])), self.breakdown)


def scan_grid(theta_steps, phi_steps):
    """theta on [0, pi] inclusive, phi on [0, 2pi) exclusive."""
    if theta_steps < 2 or phi_steps < 2:
        raise ValueError("scan needs at least 2 steps on each axis")
    theta = np.linspace(0.0, math.pi, theta_steps)
    phi = 2.0 * math.pi * np.arange(phi_steps) / phi_steps
    return theta, phi


def _workers():
    raw = os.environ.get("ARRAYDIR_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"ARRAYDIR_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def intensity_scan(array, pattern, theta, phi, workers=None, rows_per_chunk=16):
    """Radiation intensity on the theta x phi grid, rows spread over threads."""
    workers = workers or _workers()
    chunks = [slice(i, i + rows_per_chunk) for i in range(0, theta.size, rows_per_chunk)]
    out = np.empty((theta.size, phi.size))

    def fill(rows):
        out[rows] = intensity_grid(array, pattern, theta[rows, None], phi[None, :])

    if workers == 1:
        for rows in chunks:
            fill(rows)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, chunks))
    return out


def scan(array, pattern, theta_steps, phi_steps, workers=None):
    """Directivity over a regular sphere grid; the normalization is computed once."""
    theta, phi = scan_grid(theta_steps, phi_steps)
    breakdown = normalization(array, pattern)
    linear = np.maximum(intensity_scan(array, pattern, theta, phi, workers) / breakdown.total, 0.0)
    argmax = np.unravel_index(int(np.argmax(linear)), linear.shape)
    return ScanResult(theta, phi, linear, breakdown, (int(argmax[0]), int(argmax[1])))

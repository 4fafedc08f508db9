"""Element factor, array factor and radiation intensity."""

from dataclasses import dataclass
import math

import numpy as np

TWO_PI = 2.0 * math.pi
_THETA_SLACK = 1e-12


@dataclass(frozen=True)
class ElementPattern:
    """Element factor sin^u(theta) cos^v(theta) with integers u, v >= 0."""

    u: int = 0
    v: int = 0

    def __post_init__(self):
        for name in ("u", "v"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ValueError(f"{name} must be an integer, got {value!r}")
            if value < 0:
                raise ValueError(f"{name} must be >= 0, got {value}")
            object.__setattr__(self, name, int(value))


@dataclass(frozen=True)
class Direction:
    """Observation direction in radians; phi is wrapped into [0, 2*pi)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta, phi = float(self.theta), float(self.phi)
        if not (math.isfinite(theta) and math.isfinite(phi)):
            raise ValueError("direction angles must be finite")
        if theta < -_THETA_SLACK or theta > math.pi + _THETA_SLACK:
            raise ValueError(f"theta={theta} outside [0, pi]")
        theta = min(max(theta, 0.0), math.pi)
        phi = phi % TWO_PI
        if phi == TWO_PI:  # -tiny % 2pi rounds up
            phi = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_degrees(cls, theta_deg, phi_deg=0.0):
        return cls(math.radians(theta_deg), math.radians(phi_deg))

    @property
    def degrees(self):
        return math.degrees(self.theta), math.degrees(self.phi)


def element_factor(pattern, theta):
    """sin^u(theta) cos^v(theta); a zero exponent contributes exactly 1."""
    s = np.sin(theta) ** pattern.u if pattern.u else 1.0
    c = np.cos(theta) ** pattern.v if pattern.v else 1.0
    out = s * c
    if np.ndim(theta) == 0:
        return float(out)
    return np.broadcast_to(out, np.shape(theta)).astype(float)


def power_factor(pattern, theta):
    """Squared element factor, sin^2u cos^2v."""
    return element_factor(ElementPattern(2 * pattern.u, 2 * pattern.v), theta)


def unit_vector(direction):
    st = math.sin(direction.theta)
    return np.array([st * math.cos(direction.phi), st * math.sin(direction.phi),
                     math.cos(direction.theta)])


def array_factor(array, direction):
    """Complex sum of A_n exp(j(alpha_n + k r_n . a_r))."""
    phase = array.phases + array.k * (array.positions @ unit_vector(direction))
    return complex(np.sum(array.amplitudes * np.exp(1j * phase)))


def omega(pair, direction):
    """Total phase difference of a pair towards ``direction``."""
    st = math.sin(direction.theta)
    return (pair.x_mn * st * math.cos(direction.phi) + pair.y_mn * st * math.sin(direction.phi)
            + pair.z_mn * math.cos(direction.theta) + pair.alpha_mn)


def array_power(array, theta, phi):
    """|array factor|^2 through the pair sum, broadcast over theta and phi.

    ``sum A_n^2 + 2 sum_{n>m} A_n A_m cos(Omega_mn)``; loops over pairs so
    memory stays at one grid's worth.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    sx, sy, cz = st * np.cos(phi), st * np.sin(phi), np.cos(theta)
    sx, sy, cz = np.broadcast_arrays(sx, sy, cz)
    pairs = array.pair_table
    cross = np.zeros(sx.shape)
    for x, y, z, a, w in zip(pairs["x"], pairs["y"], pairs["z"], pairs["alpha"], pairs["weight"]):
        if w:
            cross += w * np.cos(x * sx + y * sy + z * cz + a)
    return float(np.dot(array.amplitudes, array.amplitudes)) + 2.0 * cross


def intensity_grid(array, pattern, theta, phi):
    """Radiation intensity |EF * AF|^2 broadcast over theta and phi."""
    theta = np.asarray(theta, dtype=float)
    return power_factor(pattern, theta) * array_power(array, theta, phi)


def radiation_intensity(array, pattern, direction):
    return float(intensity_grid(array, pattern, direction.theta, direction.phi))

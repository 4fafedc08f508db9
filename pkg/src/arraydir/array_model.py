"""Array geometry, excitations and the JSON array file format.

Positions are in wavelengths, so the wavenumber is fixed at 2*pi. Phases
are degrees on disk and radians in memory. Element indices in messages are
1-based.
"""

from dataclasses import dataclass
from functools import cached_property
import json
import math
from pathlib import Path

import numpy as np

WAVENUMBER = 2.0 * math.pi

KINDS = ("linear-z", "rectangular-xy", "cubic", "ring-xy")


class ArrayFileError(ValueError):
    """Raised for malformed or invalid array documents."""


@dataclass(frozen=True)
class ArrayElement:
    x: float
    y: float
    z: float
    amplitude: float
    phase: float  # radians

    def __post_init__(self):
        for name in ("x", "y", "z", "amplitude", "phase"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"non-finite {name}: {value!r}")
        if self.amplitude < 0:
            raise ValueError(f"negative amplitude: {self.amplitude!r}")


@dataclass(frozen=True)
class AntennaArray:
    """Immutable ordered collection of elements."""

    elements: tuple

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            raise ValueError("an array needs at least one element")
        if not any(e.amplitude > 0 for e in self.elements):
            raise ValueError("at least one element must have nonzero amplitude")

    @property
    def k(self):
        return WAVENUMBER

    def __len__(self):
        return len(self.elements)

    @cached_property
    def positions(self):
        """(N, 3) positions in wavelengths."""
        return np.array([(e.x, e.y, e.z) for e in self.elements], dtype=float)

    @cached_property
    def amplitudes(self):
        return np.array([e.amplitude for e in self.elements], dtype=float)

    @cached_property
    def phases(self):
        return np.array([e.phase for e in self.elements], dtype=float)

    @cached_property
    def pair_table(self):
        """Vectorised pair deltas for all n > m.

        Returns a dict of 1-D arrays: ``m``, ``n`` (0-based), ``x``, ``y``,
        ``z``, ``alpha``, ``beta`` and ``weight`` (A_n * A_m).
        """
        n, m = np.tril_indices(len(self), k=-1)
        order = np.lexsort((n, m))
        m, n = m[order], n[order]
        d = self.k * (self.positions[n] - self.positions[m])
        return {
            "m": m,
            "n": n,
            "x": d[:, 0],
            "y": d[:, 1],
            "z": d[:, 2],
            "alpha": self.phases[n] - self.phases[m],
            "beta": np.hypot(d[:, 0], d[:, 1]),
            "weight": self.amplitudes[n] * self.amplitudes[m],
        }

    def translated(self, dx, dy, dz):
        return AntennaArray(tuple(
            ArrayElement(e.x + dx, e.y + dy, e.z + dz, e.amplitude, e.phase)
            for e in self.elements))

    def with_excitations(self, scale=1.0, phase_shift=0.0):
        return AntennaArray(tuple(
            ArrayElement(e.x, e.y, e.z, e.amplitude * scale, e.phase + phase_shift)
            for e in self.elements))

    def rotated_z(self, angle):
        """Rotate every position about the z-axis by ``angle`` radians."""
        c, s = math.cos(angle), math.sin(angle)
        return AntennaArray(tuple(
            ArrayElement(c * e.x - s * e.y, s * e.x + c * e.y, e.z, e.amplitude, e.phase)
            for e in self.elements))


@dataclass(frozen=True)
class PairGeometry:
    """k-scaled deltas between elements m and n (radians)."""

    x_mn: float
    y_mn: float
    z_mn: float
    alpha_mn: float
    beta: float


def _pair_deltas(array, m, n):
    # either order; the public entry point enforces m < n
    em, en = array.elements[m - 1], array.elements[n - 1]
    k = array.k
    x = k * (en.x - em.x)
    y = k * (en.y - em.y)
    return PairGeometry(x, y, k * (en.z - em.z), en.phase - em.phase, math.hypot(x, y))


def pair_geometry(array, m, n):
    """Pair deltas for 1-based indices ``1 <= m < n <= N``."""
    count = len(array)
    if not (1 <= m <= count and 1 <= n <= count):
        raise IndexError(f"pair ({m}, {n}) out of range for {count} elements")
    if m >= n:
        raise ValueError(f"pair indices must satisfy m < n, got ({m}, {n})")
    return _pair_deltas(array, m, n)


# file format

_FIELDS = ("x", "y", "z", "amplitude", "phase_deg")


def _parse_element(raw, index):
    if not isinstance(raw, dict):
        raise ArrayFileError(f"element {index} is not an object")
    values = {}
    for name in _FIELDS:
        if name not in raw:
            raise ArrayFileError(f"missing field '{name}' at element {index}")
        value = raw[name]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ArrayFileError(f"field '{name}' at element {index} is not a number")
        value = float(value)
        if not math.isfinite(value):
            raise ArrayFileError(f"non-finite '{name}' at element {index}")
        values[name] = value
    if values["amplitude"] < 0:
        raise ArrayFileError(f"negative amplitude at element {index}")
    return ArrayElement(values["x"], values["y"], values["z"], values["amplitude"],
                        math.radians(values["phase_deg"]))


def load_array(document):
    """Parse an array document (JSON text or an already-decoded dict)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ArrayFileError(f"malformed document: {exc}") from None
    if not isinstance(document, dict) or "elements" not in document:
        raise ArrayFileError("malformed document: expected an object with 'elements'")
    raw = document["elements"]
    if not isinstance(raw, list):
        raise ArrayFileError("malformed document: 'elements' must be a list")
    if not raw:
        raise ArrayFileError("empty element list")
    elements = tuple(_parse_element(r, i) for i, r in enumerate(raw, start=1))
    try:
        return AntennaArray(elements)
    except ValueError as exc:
        raise ArrayFileError(str(exc)) from None


def dump_array(array):
    """Serialise to the JSON array format (phases in degrees)."""
    doc = {"elements": [
        {"x": e.x, "y": e.y, "z": e.z, "amplitude": e.amplitude,
         "phase_deg": math.degrees(e.phase)}
        for e in array.elements]}
    return json.dumps(doc, indent=2) + "\n"


def read_array(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ArrayFileError(f"cannot read {path}: {exc.strerror}") from None
    return load_array(text)


def write_array(array, path):
    Path(path).write_text(dump_array(array), encoding="utf-8")


def generate_array(kind, *, n=None, nx=None, ny=None, nz=None, spacing=0.5,
                   radius=None, amplitude=1.0, phase=0.0):
    """Canonical uniform geometries.

    ``linear-z`` uses ``n``; ``rectangular-xy`` uses ``nx``, ``ny``;
    ``cubic`` uses ``nx``, ``ny``, ``nz``; ``ring-xy`` uses ``n`` and
    ``radius``. Lattices start at the origin. ``phase`` is in radians.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")

    def count(name, value):
        if value is None or value < 1:
            raise ValueError(f"{kind} needs {name} >= 1")
        return int(value)

    if kind == "ring-xy":
        n = count("n", n)
        if radius is None or not radius > 0:
            raise ValueError("ring-xy needs radius > 0")
        angles = 2.0 * math.pi * np.arange(n) / n
        points = [(radius * math.cos(a), radius * math.sin(a), 0.0) for a in angles]
    else:
        if not spacing > 0:
            raise ValueError("spacing must be positive")
        if kind == "linear-z":
            shape = (1, 1, count("n", n))
        elif kind == "rectangular-xy":
            shape = (count("nx", nx), count("ny", ny), 1)
        else:
            shape = (count("nx", nx), count("ny", ny), count("nz", nz))
        points = [(i * spacing, j * spacing, l * spacing)
                  for i in range(shape[0]) for j in range(shape[1]) for l in range(shape[2])]
    return AntennaArray(tuple(ArrayElement(x, y, z, amplitude, phase) for x, y, z in points))


def random_array(rng, n, extent=6.0):
    """Random volumetric array: positions in [0, extent]^3, A in (0, 1], phase in [-pi, pi]."""
    pos = rng.uniform(0.0, extent, size=(n, 3))
    amp = 1.0 - rng.uniform(0.0, 1.0, size=n)  # (0, 1]
    phase = rng.uniform(-math.pi, math.pi, size=n)
    return AntennaArray(tuple(ArrayElement(*p, a, f) for p, a, f in zip(pos, amp, phase)))

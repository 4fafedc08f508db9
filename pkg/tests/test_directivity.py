import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arraydir.array_model import AntennaArray, ArrayElement, generate_array, random_array
from arraydir.directivity import (
    NormalizationError, normalization, normalization_cross, normalization_self, directivity, scan,
    scan_grid, specialized_normalization, SPECIALIZED_PATTERNS, to_dbi,
)
from arraydir.pattern import Direction, ElementPattern
from arraydir.quadrature import normalization_numeric_many
from conftest import STEERING_DEG

SINGLE = AntennaArray((ArrayElement(0, 0, 0, 1.0, 0.0),))
PAIR_Z = generate_array("linear-z", n=2, spacing=0.5)

seeds = st.integers(0, 2**32 - 1)
thetas = st.floats(0.0, math.pi)
phis = st.floats(0.0, 2 * math.pi)
small = st.integers(0, 3)


def rand(seed, n=8):
    return random_array(np.random.default_rng(seed), n)


def test_self_term_examples(ref_array):
    assert normalization_self(SINGLE, ElementPattern()) == 1.0
    amps = ref_array.amplitudes
    assert normalization_self(ref_array, ElementPattern(0, 1)) == pytest.approx(np.dot(amps, amps) / 3, rel=1e-15)
    unit = AntennaArray(tuple(ArrayElement(i, 0, 0, 1.0, 0) for i in range(10)))
    assert normalization_self(unit, ElementPattern(1, 1)) == pytest.approx(4 / 3, rel=1e-15)


def test_cross_term_examples():
    assert normalization_cross(SINGLE, ElementPattern(2, 3)) == 0.0
    assert abs(normalization_cross(PAIR_Z, ElementPattern())) <= 1e-15


@given(thetas, phis, small, small)
def test_single_element_is_isotropic_reference(theta, phi, u, v):
    d = directivity(SINGLE, ElementPattern(), Direction(theta, phi))
    assert abs(d.linear - 1.0) <= 1e-14 and d.dBi == pytest.approx(0.0, abs=1e-13)


def test_breakdown_consistency(ref_array):
    b = normalization(ref_array, ElementPattern(1, 0))
    assert b.total == b.self_term + b.cross_term


def test_nonpositive_total_raises():
    # coincident anti-phase elements cancel exactly
    array = AntennaArray((ArrayElement(0, 0, 0, 1, 0), ArrayElement(0, 0, 0, 1, math.pi)))
    with pytest.raises(NormalizationError):
        normalization(array, ElementPattern())


def test_null_direction_reports_minus_infinity():
    d = directivity(PAIR_Z, ElementPattern(), Direction(0.0))
    assert d.linear <= 1e-30
    assert to_dbi(0.0) == -math.inf


@given(seeds, st.floats(0.01, 100.0), thetas, phis, small, small)
def test_amplitude_scale_invariance(seed, c, theta, phi, u, v):
    array, pattern, d = rand(seed), ElementPattern(u, v), Direction(theta, phi)
    base = directivity(array, pattern, d)
    scaled = directivity(array.with_excitations(scale=c), pattern, d)
    assert abs(scaled.linear - base.linear) <= 1e-12 * max(base.linear, _floor(array, pattern, d))


@given(seeds, st.floats(-10, 10), thetas, phis, small, small)
def test_global_phase_invariance(seed, delta, theta, phi, u, v):
    array, pattern, d = rand(seed), ElementPattern(u, v), Direction(theta, phi)
    base = directivity(array, pattern, d)
    shifted = directivity(array.with_excitations(phase_shift=delta), pattern, d)
    assert abs(shifted.linear - base.linear) <= 1e-12 * max(base.linear, _floor(array, pattern, d))


@given(seeds, st.tuples(*[st.floats(-5, 5)] * 3), thetas, phis, small, small)
def test_translation_invariance(seed, shift, theta, phi, u, v):
    array, pattern, d = rand(seed), ElementPattern(u, v), Direction(theta, phi)
    moved = array.translated(*shift)
    t0, t1 = normalization(array, pattern).total, normalization(moved, pattern).total
    assert abs(t1 - t0) <= 1e-10 * t0
    a, b = directivity(array, pattern, d).linear, directivity(moved, pattern, d).linear
    assert abs(a - b) <= 1e-10 * max(a, _floor(array, pattern, d))


def _floor(array, pattern, d):
    # peak-scale floor so that deep nulls are compared absolutely
    ef2 = math.sin(d.theta) ** (2 * pattern.u) * math.cos(d.theta) ** (2 * pattern.v)
    return ef2 * np.sum(array.amplitudes) ** 2 / normalization(array, pattern).total


@pytest.mark.parametrize("case", ["T1", "T2"])
@pytest.mark.parametrize("seed", range(10))
def test_t1_t2_reference_forms_agree(case, seed):
    array = rand(seed, 10)
    ours = normalization(array, SPECIALIZED_PATTERNS[case]).total
    assert specialized_normalization(array, case) == pytest.approx(ours, rel=1e-12)


def test_t1_single_element():
    assert specialized_normalization(SINGLE, "T1") == 1.0


def test_reference_form_verdicts(ref_array):
    # the oracle arbitrates: T1 and T2 agree with it, T3 and T4 as printed do not
    oracle = normalization_numeric_many(ref_array, list(SPECIALIZED_PATTERNS.values()))
    for (case, pattern), numeric in zip(SPECIALIZED_PATTERNS.items(), oracle):
        printed = specialized_normalization(ref_array, case)
        ours = normalization(ref_array, pattern).total
        assert abs(ours - numeric.value) <= 1e-10 * numeric.value
        mismatch = abs(printed - numeric.value) / numeric.value
        if case in ("T1", "T2"):
            assert mismatch <= 1e-10
        else:
            assert mismatch > 1e-3


def test_printed_general_constants_fail(ref_array):
    # self coefficient B/4 (instead of B/2) against the oracle
    pattern = ElementPattern()
    numeric = normalization_numeric_many(ref_array, [pattern])[0].value
    printed = normalization_self(ref_array, pattern) / 2 + normalization_cross(ref_array, pattern)
    assert abs(printed - numeric) / numeric > 0.1


def test_specialized_rejections():
    with pytest.raises(ValueError):
        specialized_normalization(SINGLE, "T5")
    coincident = AntennaArray((ArrayElement(0, 0, 0, 1, 0), ArrayElement(0, 0, 0, 1, 0)))
    with pytest.raises(ValueError):
        specialized_normalization(coincident, "T3")
    assert specialized_normalization(coincident, "T1") == pytest.approx(
        normalization(coincident, ElementPattern()).total)


def test_coincident_elements_in_engine():
    coincident = AntennaArray((ArrayElement(0, 0, 0, 1, 0), ArrayElement(0, 0, 0, 1, 0)))
    for u, v in [(0, 0), (1, 2), (3, 1)]:
        d = directivity(coincident, ElementPattern(u, v), Direction(0.7, 0.2))
        d1 = directivity(SINGLE, ElementPattern(u, v), Direction(0.7, 0.2))
        assert d.linear == pytest.approx(d1.linear, rel=1e-13)


def test_breakdown_reuse(ref_array):
    b = normalization(ref_array, ElementPattern())
    d = Direction.from_degrees(*STEERING_DEG)
    assert directivity(ref_array, ElementPattern(), d, b) == directivity(ref_array, ElementPattern(), d)


def test_scan_single_and_pair():
    flat = scan(SINGLE, ElementPattern(), 5, 8)
    assert np.allclose(flat.linear, 1.0, rtol=0, atol=1e-14) and flat.argmax == (0, 0)
    broadside = scan(PAIR_Z, ElementPattern(), 181, 36)
    assert broadside.theta[broadside.argmax[0]] == pytest.approx(math.pi / 2)


def test_scan_matches_pointwise(ref_array):
    result = scan(ref_array, ElementPattern(1, 1), 19, 24, workers=3)
    for i, j in [(0, 0), (7, 13), (18, 23), result.argmax]:
        point = result.result_at(i, j)
        ref = directivity(ref_array, ElementPattern(1, 1), point.direction)
        assert point.linear == pytest.approx(ref.linear, rel=1e-12, abs=1e-14)
    assert result.best.linear == result.linear.max()
    single_thread = scan(ref_array, ElementPattern(1, 1), 19, 24, workers=1)
    assert np.array_equal(single_thread.linear, result.linear)


def test_scan_grid():
    theta, phi = scan_grid(3, 4)
    assert np.allclose(theta, [0, math.pi / 2, math.pi])
    assert np.allclose(phi, [0, math.pi / 2, math.pi, 3 * math.pi / 2])
    with pytest.raises(ValueError):
        scan_grid(1, 4)


def test_thread_env(monkeypatch, ref_array):
    monkeypatch.setenv("ARRAYDIR_THREADS", "2")
    assert scan(ref_array, ElementPattern(), 9, 9).linear.shape == (9, 9)
    monkeypatch.setenv("ARRAYDIR_THREADS", "lots")
    with pytest.raises(ValueError):
        scan(ref_array, ElementPattern(), 9, 9)

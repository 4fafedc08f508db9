import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from arraydir.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, run
from conftest import REFERENCE_ARRAY

STEER = ["--theta", "101.44", "--phi", "267.75"]


def call(*argv):
    out = io.StringIO()
    code = run([str(a) for a in argv], out)
    return code, out.getvalue()


@pytest.fixture
def single(tmp_path):
    path = tmp_path / "single.json"
    path.write_text(json.dumps({"elements": [{"x": 0, "y": 0, "z": 0, "amplitude": 1, "phase_deg": 0}]}))
    return path


@pytest.fixture
def pair(tmp_path):
    path = tmp_path / "pair.json"
    assert call("generate", "--kind", "linear-z", "--n", 2, "--spacing", 0.5, "--output", path)[0] == 0
    return path


def read_csv(text):
    lines = text.strip().splitlines()
    return lines[0], np.loadtxt(lines[1:], delimiter=",", ndmin=2)


@pytest.mark.parametrize("u, v, dbi", [(0, 0, "7.75"), (1, 0, "9.18"), (1, 1, "2.38")])
def test_directivity_reference_rows(u, v, dbi):
    code, text = call("directivity", "--array", REFERENCE_ARRAY, "--u", u, "--v", v, *STEER)
    assert code == EXIT_OK
    assert f"{dbi} dBi" in text


def test_directivity_both_methods():
    code, text = call("directivity", "--array", REFERENCE_ARRAY, "--u", 1, "--v", 1, *STEER, "--method", "both")
    assert code == EXIT_OK and "2.38 dBi" in text
    rel = float(text.split("rel. error")[1].split()[0])
    assert rel <= 1e-8


def test_directivity_quadrature_only(single):
    code, text = call("directivity", "--array", single, "--theta", 0, "--phi", 0, "--method", "quadrature")
    assert code == EXIT_OK and "0.00 dBi" in text


def test_directivity_single_precision(single):
    code, text = call("directivity", "--array", single, "--theta", 0, "--phi", 0, "--precision", 4)
    assert "0.0000 dBi" in text


@pytest.mark.parametrize("argv", [
    ["directivity", "--array", REFERENCE_ARRAY, "--u", -1, "--v", 0, *STEER],
    ["directivity", "--array", "missing.json", *STEER],
    ["directivity", "--array", REFERENCE_ARRAY, "--theta", 200, "--phi", 0],
    ["directivity", "--array", REFERENCE_ARRAY, *STEER, "--method", "quadrature", "--rel-tol", 1.0],
    ["directivity", "--array", REFERENCE_ARRAY],
    ["frobnicate"],
    ["scan", "--array", REFERENCE_ARRAY, "--theta-steps", 1, "--output", "-"],
    ["generate", "--kind", "linear-z", "--n", 0],
    ["dump-derivative", "--order", -1],
    ["validate", "--generate-random", "N=zero"],
    ["validate", "--generate-random", "N=4", "--u", 1],
])
def test_usage_errors(argv):
    assert call(*argv)[0] == EXIT_USAGE


def test_bad_array_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"elements": [{"x": 0, "y": 0, "z": 0, "amplitude": -0.5, "phase_deg": 0}]}')
    assert call("directivity", "--array", path, "--theta", 0, "--phi", 0)[0] == EXIT_USAGE


def test_scan_csv(tmp_path, pair):
    path = tmp_path / "scan.csv"
    code, text = call("scan", "--array", pair, "--theta-steps", 19, "--phi-steps", 8, "--output", path)
    assert code == EXIT_OK and "theta=90.0000" in text
    header, table = read_csv(path.read_text())
    assert header == "theta_deg,phi_deg,directivity_linear,directivity_dbi"
    assert table.shape == (19 * 8, 4)
    assert np.array_equal(table[:8, 1], np.arange(8) * 45.0)  # row-major: theta outer
    best = table[np.argmax(table[:, 2])]
    assert best[0] == 90.0


def test_scan_single_all_ones(single):
    code, text = call("scan", "--array", single, "--theta-steps", 5, "--phi-steps", 4, "--output", "-")
    header, table = read_csv(text)  # stdout stays pure CSV
    assert np.allclose(table[:, 2], 1.0, rtol=0, atol=1e-14)


def test_scan_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        call("scan", "--array", REFERENCE_ARRAY, "--theta-steps", 13, "--phi-steps", 17, "--output", path)
    assert a.read_bytes() == b.read_bytes()


def test_scan_unwritable(tmp_path):
    code, _ = call("scan", "--array", REFERENCE_ARRAY, "--theta-steps", 3, "--phi-steps", 3,
                   "--output", tmp_path / "no" / "such" / "dir.csv")
    assert code == EXIT_USAGE


@pytest.mark.parametrize("u, v", [(1, 0), (0, 1)])
def test_pattern_single_element(single, u, v):
    code, text = call("pattern", "--array", single, "--u", u, "--v", v,
                      "--theta-steps", 7, "--phi-steps", 3, "--output", "-")
    header, table = read_csv(text)
    assert header == "theta_deg,phi_deg,radiation_intensity"
    theta = np.radians(table[:, 0])
    expected = np.sin(theta) ** 2 if u else np.cos(theta) ** 2
    assert np.allclose(table[:, 2], expected, atol=1e-12)
    if v:
        assert np.all(table[table[:, 0] == 90.0, 2] <= 1e-30)


def test_pattern_max_matches_scan(tmp_path):
    s, p = tmp_path / "s.csv", tmp_path / "p.csv"
    call("scan", "--array", REFERENCE_ARRAY, "--theta-steps", 91, "--phi-steps", 180, "--output", s)
    call("pattern", "--array", REFERENCE_ARRAY, "--theta-steps", 91, "--phi-steps", 180, "--output", p)
    _, st = read_csv(s.read_text())
    _, pt = read_csv(p.read_text())
    assert np.argmax(st[:, 2]) == np.argmax(pt[:, 2])


def test_validate_ref_array():
    code, text = call("validate", "--array", REFERENCE_ARRAY, *STEER)
    assert code == EXIT_OK and "4/4 passed" in text


def test_validate_random():
    code, text = call("validate", "--generate-random", "N=8", "--seed", 42, "--u", 2, "--v", 1)
    assert code == EXIT_OK and "1/1 passed" in text


def test_validate_corrupted_fails():
    code, text = call("validate", "--array", REFERENCE_ARRAY, "--u", 0, "--v", 0, "--corrupt-normalization", 1.001)
    assert code == EXIT_FAILURE and "FAIL" in text


@pytest.mark.parametrize("argv, count", [
    (["--kind", "linear-z", "--n", 8, "--spacing", 0.5], 8),
    (["--kind", "ring-xy", "--n", 16, "--radius", 2], 16),
    (["--kind", "cubic", "--nx", 2, "--ny", 2, "--nz", 2, "--spacing", 0.5], 8),
])
def test_generate(argv, count):
    code, text = call("generate", *argv)
    assert code == EXIT_OK
    assert len(json.loads(text)["elements"]) == count


def test_generate_phase_degrees():
    _, text = call("generate", "--kind", "linear-z", "--n", 2, "--phase", 30)
    assert json.loads(text)["elements"][0]["phase_deg"] == pytest.approx(30.0)


def test_dump_derivative():
    code, text = call("dump-derivative", "--order", 1)
    assert code == EXIT_OK
    assert text.splitlines()[1:] == ["+ 1 * z r^-2 cos(r)", "- 1 * z r^-3 sin(r)"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "arraydir", "directivity", "--array", str(REFERENCE_ARRAY), *STEER],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "7.75 dBi" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "arraydir"], capture_output=True, text=True, check=False)
    assert proc.returncode == EXIT_USAGE

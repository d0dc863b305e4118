import subprocess

import numpy as np
import pytest

from stochhr import io
from stochhr.grid import SpatialGrid, StateField
from stochhr.model import HRParameters
from stochhr.solver import solve_transformed
from stochhr.stochastic import sample_path

from conftest import cosine_state


@pytest.mark.parametrize("spec", ["1:16:1.0", "2:4:2.5", "3:3:0.5"])
def test_field_binary_roundtrip(tmp_path, spec):
    g = SpatialGrid.from_spec(spec)
    arr = np.random.default_rng(0).standard_normal((3,) + g.shape)
    s = StateField.from_array(g, arr)
    f = io.write_field_binary(tmp_path / "s.bin", s)
    back = io.read_field_binary(f)
    assert back.grid == g and np.array_equal(back.as_array(), arr)
    raw = f.read_bytes()
    assert int.from_bytes(raw[4:12], "little") == g.dim


def test_field_binary_rejects_garbage(tmp_path):
    (tmp_path / "x.bin").write_bytes(b"nope")
    with pytest.raises(Exception):
        io.read_field_binary(tmp_path / "x.bin")


def test_field_csv(tmp_path):
    g = SpatialGrid.from_spec("2:3:1.0")
    s = cosine_state(SpatialGrid.from_spec("1:9:1.0"))
    f = io.write_field_csv(tmp_path / "f.csv", s)
    comments, header, data = io.read_csv(f)
    assert header == ["index", "x0", "U", "V", "Z"] and data.shape == (9, 5)
    assert np.array_equal(data[:, 2], s.U)
    f2 = io.write_field_csv(tmp_path / "g.csv", StateField.zeros(g))
    assert io.read_csv(f2)[1][:3] == ["index", "x0", "x1"]


def test_path_csv_header(tmp_path):
    path = sample_path(12, -1, 1, 0.25)
    f = io.write_path_csv(tmp_path / "w.csv", path)
    comments, header, data = io.read_csv(f)
    assert "seed = 12" in comments and any(c.startswith("horizon") for c in comments)
    assert header == ["t", "W"] and data.shape == (9, 2)
    assert np.array_equal(data[:, 1], path.values)


def test_float_text_roundtrips(tmp_path):
    x = np.random.default_rng(1).standard_normal(50)
    f = io.write_csv(tmp_path / "x.csv", ["x"], ([v] for v in x))
    assert np.array_equal(io.read_csv(f)[2][:, 0], x)


def test_trajectory_csv(tmp_path, grid32):
    path = sample_path(1, 0, 1, 1e-3)
    tr = solve_transformed(cosine_state(grid32), 0, 0.05, 0.01, path, HRParameters(), grid32)
    _, header, data = io.read_csv(io.write_trajectory_csv(tmp_path / "t.csv", tr))
    assert header == ["t", "norm_U", "norm_V", "norm_Z", "norm_grad_G", "Q"]
    assert data.shape == (6, 6)


def test_git_blob_hash_matches_git(tmp_path):
    assert io.git_blob_hash(b"") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391"
    data = b"dt = 0.01\n"
    (tmp_path / "c").write_bytes(data)
    try:
        out = subprocess.run(["git", "hash-object", str(tmp_path / "c")], capture_output=True,
                             text=True, check=True).stdout.strip()
    except (OSError, subprocess.CalledProcessError):
        pytest.skip("git unavailable")
    assert io.git_blob_hash(data) == out


def test_manifest(tmp_path):
    f = io.write_csv(tmp_path / "a.csv", ["x"], [[1.0]])
    m = io.write_manifest(tmp_path / "manifest.txt", "seed = 3\n", [f])
    text = m.read_text()
    assert "seed = 3" in text and "output.a.csv = " in text
    assert text.strip().splitlines()[-1] == f"content_hash = {io.git_blob_hash(b'seed = 3' + chr(10).encode())}"


def test_gnuplot(tmp_path):
    g = io.write_gnuplot(tmp_path / "p.gp", {"energy": tmp_path / "energy.csv"})
    text = g.read_text()
    assert "set datafile separator ','" in text and "'energy.csv'" in text

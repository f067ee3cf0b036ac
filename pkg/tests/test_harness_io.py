import numpy as np
import pytest

from se3loss import poses
from se3loss.exceptions import DuplicateId, NotSPD, ParseError, UnitsMissing
from se3loss.harness import io

HEADER = "# units=m, order=axisangle-translation\n"


def test_empty_body():
    s = io.read_pairs(["# units=mm, order=axisangle-translation"])
    assert len(s) == 0 and s.units == "mm"


def test_single_identity_pair():
    s = io.read_pairs((HEADER + "a, 0,0,0,0,0,0, 0,0,0,0,0,0\n").splitlines())
    assert s.ids == ["a"]
    assert np.array_equal(s.truth, np.zeros((1, 6))) and np.array_equal(s.pred, np.zeros((1, 6)))


def test_round_trip_bit_stable(rng, tmp_path):
    truth = poses.sample_poses(rng, 100, translation_scale=100.0)
    pred = poses.sample_poses(rng, 100, translation_scale=1e-3)
    pairs = io.PosePairSet([f"r{i}" for i in range(100)], truth, pred, "mm")
    path = tmp_path / "pairs.csv"
    io.save_pairs(pairs, path)
    back = io.load_pairs(path)
    assert back.ids == pairs.ids and back.units == "mm"
    assert np.array_equal(back.truth, truth) and np.array_equal(back.pred, pred)
    io.save_pairs(back, tmp_path / "again.csv")
    assert (tmp_path / "again.csv").read_bytes() == path.read_bytes()


@pytest.mark.parametrize("body, exc, line", [
    ("a, 0,0,0,0,0,0, 0,0,0,0,0\n", ParseError, 2),
    ("a, 0,0,0,0,0,0, 0,0,0,0,0,x\n", ParseError, 2),
    ("a, 0,0,0,0,0,0, 0,0,0,0,0,0\n\na, 1,0,0,0,0,0, 0,0,0,0,0,0\n", DuplicateId, None),
    (", 0,0,0,0,0,0, 0,0,0,0,0,0\n", ParseError, 2),
    ("a, 0,0,0,0,0,0, 0,0,0,0,0,inf\n", ParseError, 2),
])
def test_malformed_rows(body, exc, line):
    with pytest.raises(exc) as err:
        io.read_pairs((HEADER + body).splitlines())
    if line is not None:
        assert err.value.line == line
        assert f"line {line}" in str(err.value)


def test_units_missing_and_bad():
    with pytest.raises(UnitsMissing):
        io.read_pairs(["a, 0,0,0,0,0,0, 0,0,0,0,0,0"])
    with pytest.raises(UnitsMissing):
        io.read_pairs(["# just a comment"])
    with pytest.raises(ParseError):
        io.read_pairs(["# units=km"])


def test_long_rotation_is_canonicalised():
    s = io.read_pairs([HEADER, f"a, 0,0,{1.5 * np.pi},0,0,0, 0,0,0,0,0,0"])
    np.testing.assert_allclose(s.truth[0, :3], [0, 0, -0.5 * np.pi], atol=1e-12)


def test_metric_files(tmp_path):
    f = tmp_path / "w.txt"
    f.write_text("0.25 1 1 1 1 1\n")
    assert np.array_equal(io.load_metric(f).matrix, np.diag([0.25, 1, 1, 1, 1, 1]))
    M = np.eye(6) * 2
    M[0, 1] = M[1, 0] = 0.5
    f.write_text(io.format_metric(M))
    assert np.array_equal(io.load_metric(f).matrix, M)
    f.write_text("1 2 3\n")
    with pytest.raises(ParseError):
        io.load_metric(f)
    f.write_text("1 1 1 1 1 -1\n")
    with pytest.raises(NotSPD):
        io.load_metric(f)
    assert io.format_metric(np.eye(6)) == "1.0 1.0 1.0 1.0 1.0 1.0\n"


def test_parse_pose():
    np.testing.assert_array_equal(io.parse_pose("0, 0, 1.5, 1,2,3"), [0, 0, 1.5, 1, 2, 3])
    with pytest.raises(ParseError):
        io.parse_pose("1,2,3")


def test_scalars(tmp_path):
    f = tmp_path / "s.txt"
    f.write_text("# comment\n1.5\n\n2\n")
    assert np.array_equal(io.load_scalars(f), [1.5, 2.0])
    f.write_text("1 2\n")
    with pytest.raises(ParseError):
        io.load_scalars(f)

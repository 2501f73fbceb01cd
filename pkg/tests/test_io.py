import numpy as np
import pytest
from hypothesis import given, strategies as st

from cqed_tongues.io import format_value, read_pgm, write_csv, write_pgm


def test_format_value():
    assert format_value(3) == "3"
    assert format_value(np.int64(-2)) == "-2"
    assert format_value(True) == "1"
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(float("nan")) == "nan"
    assert format_value(float("inf")) == "inf"


@given(st.floats(allow_nan=False))
def test_floats_round_trip(x):
    assert float(format_value(x)) == x


def test_csv_layout(tmp_path):
    write_csv(tmp_path / "a.csv", ["a", "b", "c"], [(1, 2.5, "x"), (np.int32(0), -0.0, "y")])
    assert (tmp_path / "a.csv").read_bytes() == b"a,b,c\n1,2.5,x\n0,-0,y\n"


def test_pgm_round_trip(tmp_path):
    img = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    write_pgm(tmp_path / "a.pgm", img)
    data = (tmp_path / "a.pgm").read_bytes()
    assert data[:11] == b"P5\n4 3\n255\n"
    assert len(data) == 11 + 12
    assert np.array_equal(read_pgm(tmp_path / "a.pgm"), img)


def test_pgm_rejects_bad_input(tmp_path):
    with pytest.raises(ValueError):
        write_pgm(tmp_path / "a.pgm", np.zeros(4))
    (tmp_path / "b.pgm").write_bytes(b"P2\n1 1\n255\n0")
    with pytest.raises(ValueError):
        read_pgm(tmp_path / "b.pgm")

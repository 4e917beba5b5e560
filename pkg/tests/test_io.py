import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from twfpd.io import FormatError, read_pgm, read_signal, read_tws, write_pgm, write_signal, write_tws

finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(arrays(float, st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 3)), elements=finite))
def test_tws_round_trip_is_exact(tmp_path_factory, x):
    p = tmp_path_factory.mktemp("tws") / "x.tws"
    write_tws(p, x)
    assert np.array_equal(read_tws(p), x)


def test_tws_one_dimensional(tmp_path):
    x = np.linspace(0, 1, 7)
    write_signal(tmp_path / "x.tws", x)
    assert np.array_equal(read_signal(tmp_path / "x.tws"), x)


@pytest.mark.parametrize("text,match", [
    ("TWS2\n1\n2\n0 0\n", "header"),
    ("TWS1\n2\n2 2\n1 2 3\n", "expected 4 values"),
    ("TWS1\n2\n2 x\n1 2 3 4\n", "bad TWS1"),
    ("TWS1\n1\n0\n", "bad shape"),
])
def test_tws_errors(tmp_path, text, match):
    p = tmp_path / "bad.tws"
    p.write_text(text)
    with pytest.raises(FormatError, match=match):
        read_tws(p)


@pytest.mark.parametrize("bits", [8, 16])
def test_pgm_round_trip(tmp_path, bits):
    maxval = 255 if bits == 8 else 65535
    x = np.random.default_rng(0).integers(0, maxval + 1, (5, 7)) / maxval
    write_pgm(tmp_path / "x.pgm", x, bits)
    assert np.allclose(read_pgm(tmp_path / "x.pgm"), x, atol=1e-12)


def test_pgm_ascii_with_comments(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_text("P2\n# a comment\n3 2\n4\n0 1 2\n3 4 0\n")
    assert np.array_equal(read_signal(p), np.array([[0, 1, 2], [3, 4, 0]]) / 4)


def test_pgm_clips(tmp_path):
    write_signal(tmp_path / "c.pgm", np.array([[-1.0, 2.0]]))
    assert np.array_equal(read_pgm(tmp_path / "c.pgm"), [[0.0, 1.0]])


def test_pgm_errors(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P5\n4 4\n255\n" + bytes(3))
    with pytest.raises(FormatError, match="truncated"):
        read_pgm(p)
    p.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
    with pytest.raises(FormatError, match="grayscale"):
        read_pgm(p)
    with pytest.raises(FormatError):
        write_pgm(p, np.zeros(3))


def test_unknown_format(tmp_path):
    p = tmp_path / "x.bin"
    p.write_bytes(b"\x89PNG")
    with pytest.raises(FormatError, match="unrecognised"):
        read_signal(p)

"""Netpbm parsing/writing and the geometric preprocessing contracts."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from contourpose.image_io import (
    CropRect,
    NetpbmError,
    crop,
    parse_netpbm,
    resize,
    to_grayscale,
    write_netpbm,
)


# ----------------------------------------------------------- parsing

def test_parse_p5():
    data = b"P5 2 2 255\n" + bytes([0, 255, 128, 64])
    img = parse_netpbm(data)
    assert img.shape == (2, 2)
    assert img.tolist() == [[0.0, 255.0], [128.0, 64.0]]


def test_parse_p6():
    data = b"P6 1 1 255\n" + bytes([10, 20, 30])
    img = parse_netpbm(data)
    assert img.shape == (1, 1, 3)
    assert img[0, 0].tolist() == [10.0, 20.0, 30.0]


def test_parse_p2_ascii_with_comments():
    data = b"P2 # gray\n2 2\n# maxval next\n255\n0 255\n128 64\n"
    img = parse_netpbm(data)
    assert img.tolist() == [[0.0, 255.0], [128.0, 64.0]]


def test_parse_p3_ascii():
    data = b"P3 2 1 255  1 2 3  4 5 6\n"
    img = parse_netpbm(data)
    assert img.shape == (1, 2, 3)
    assert img[0, 1].tolist() == [4.0, 5.0, 6.0]


def test_unsupported_magic():
    with pytest.raises(NetpbmError, match="unsupported netpbm magic P4"):
        parse_netpbm(b"P4 8 8\n\x00" * 8)
    with pytest.raises(NetpbmError, match="bad magic"):
        parse_netpbm(b"Q5 2 2 255\n1234")


def test_maxval_over_255_rejected():
    with pytest.raises(NetpbmError, match="maxval 65535"):
        parse_netpbm(b"P5 1 1 65535\n\x00\x00")


def test_truncated_pixel_data():
    with pytest.raises(NetpbmError, match="truncated pixel data"):
        parse_netpbm(b"P5 2 2 255\n\x00\x01")
    with pytest.raises(NetpbmError, match="truncated pixel data"):
        parse_netpbm(b"P2 2 2 255\n0 1 2")


def test_malformed_header():
    with pytest.raises(NetpbmError, match="malformed"):
        parse_netpbm(b"P5 two 2 255\n\x00")
    with pytest.raises(NetpbmError, match="truncated netpbm header"):
        parse_netpbm(b"P5 2 2")
    with pytest.raises(NetpbmError, match="bad dimensions"):
        parse_netpbm(b"P5 0 2 255\n")


@given(arrays(np.uint8, st.tuples(st.integers(1, 8), st.integers(1, 8))))
def test_p5_round_trip(pixels):
    img = pixels.astype(np.float64)
    assert np.array_equal(parse_netpbm(write_netpbm(img)), img)


@given(arrays(np.uint8, st.tuples(st.integers(1, 5), st.integers(1, 5),
                                  st.just(3))))
def test_p6_round_trip(pixels):
    img = pixels.astype(np.float64)
    assert np.array_equal(parse_netpbm(write_netpbm(img)), img)


# ----------------------------------------------------------- grayscale

def test_grayscale_mean():
    img = np.array([[[10.0, 20.0, 30.0]]])
    assert to_grayscale(img)[0, 0] == 20.0
    assert to_grayscale(np.zeros((2, 2, 3)))[0, 0] == 0.0


@given(arrays(np.uint8, st.tuples(st.integers(1, 6), st.integers(1, 6),
                                  st.just(3))),
       st.permutations([0, 1, 2]))
def test_grayscale_channel_permutation_invariant(pixels, perm):
    img = pixels.astype(np.float64)
    assert np.array_equal(to_grayscale(img), to_grayscale(img[:, :, perm]))


# ----------------------------------------------------------- crop

def test_crop_identity_and_center():
    img = np.arange(16.0).reshape(4, 4)
    assert np.array_equal(crop(img, CropRect(0, 0, 4, 4)), img)
    assert np.array_equal(crop(img, CropRect(1, 1, 2, 2)), img[1:3, 1:3])


def test_crop_out_of_bounds():
    img = np.zeros((4, 4))
    with pytest.raises(ValueError, match="exceeds image bounds"):
        crop(img, CropRect(3, 3, 2, 2))


def test_crop_composes():
    img = np.arange(100.0).reshape(10, 10)
    outer = CropRect(2, 3, 6, 5)
    inner = CropRect(1, 2, 3, 2)
    combined = CropRect(outer.top + inner.top, outer.left + inner.left,
                        inner.height, inner.width)
    assert np.array_equal(crop(crop(img, outer), inner), crop(img, combined))


def test_crop_rect_validation():
    with pytest.raises(ValueError):
        CropRect(-1, 0, 2, 2)
    with pytest.raises(ValueError):
        CropRect(0, 0, 0, 2)


# ----------------------------------------------------------- resize

def test_resize_identity():
    rng = np.random.default_rng(0)
    img = rng.uniform(0, 255, size=(9, 7))
    assert np.abs(resize(img, 9, 7) - img).max() < 1e-12


@given(st.floats(0, 255), st.integers(1, 7), st.integers(1, 7))
@settings(max_examples=40)
def test_resize_constant_stays_constant(value, out_rows, out_cols):
    img = np.full((2, 2), value)
    out = resize(img, out_rows, out_cols)
    assert out.shape == (out_rows, out_cols)
    assert np.abs(out - value).max() < 1e-12


def test_resize_preserves_linear_ramp():
    # Closed-form oracle: f(r, c) = 2r + 3c + 1 sampled corner-aligned.
    r = np.arange(3.0)[:, None]
    c = np.arange(3.0)[None, :]
    img = 2.0 * r + 3.0 * c + 1.0
    out = resize(img, 5, 5)
    rr = np.linspace(0.0, 2.0, 5)[:, None]
    cc = np.linspace(0.0, 2.0, 5)[None, :]
    assert np.abs(out - (2.0 * rr + 3.0 * cc + 1.0)).max() < 1e-9


def test_resize_rejects_empty_output():
    with pytest.raises(ValueError):
        resize(np.zeros((4, 4)), 0, 3)

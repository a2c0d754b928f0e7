"""Pyramidal directional filter bank: the transform engine.

The decomposition combines three building blocks, all with periodic boundary
handling and exact inverses:

* a Laplacian pyramid step (9/7 lowpass, downsample by 2 per axis, bandpass
  residual at full resolution),
* an iterated fan-filter / quincunx tree splitting a bandpass image into
  2**depth wedge-shaped directional subbands at critical sampling, and
* a separable 9/7 wavelet step used when a pyramid level asks for zero
  directional splits, contributing the usual LH/HL/HH detail triple.

All filtering is direct-form 2-D convolution over an explicitly extended
image.  Odd axes ceil-halve: pyramid steps do this natively, and the wavelet
step wraps one row/column of periodic padding onto an odd axis so every band
is ceil(n/2) long and the inverse is still exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log2
from typing import Union

import numpy as np
from scipy.signal import convolve2d

from .filters import cdf97, modulate2, pkva_quincunx

__all__ = [
    "PdfbConfig",
    "WaveletTriple",
    "DirectionalGroup",
    "Decomposition",
    "lp_decompose",
    "lp_reconstruct",
    "dfb_decompose",
    "dfb_reconstruct",
    "wavelet_level",
    "wavelet_inverse",
    "pdfb_decompose",
    "pdfb_reconstruct",
]

MAX_DFB_DEPTH = 5


# --------------------------------------------------------------------------
# configuration and decomposition containers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PdfbConfig:
    """Directional depths per pyramid level, ordered coarsest to finest."""

    nlevs: tuple[int, ...]

    def __post_init__(self):
        nlevs = tuple(int(v) for v in self.nlevs)
        if len(nlevs) < 1:
            raise ValueError("nlevs must hold at least one level")
        for depth in nlevs:
            if not 0 <= depth <= MAX_DFB_DEPTH:
                raise ValueError(
                    f"directional depth {depth} outside [0, {MAX_DFB_DEPTH}]"
                )
        object.__setattr__(self, "nlevs", nlevs)


@dataclass(frozen=True)
class WaveletTriple:
    """LH/HL/HH detail bands of one separable wavelet level."""

    input_shape: tuple[int, int]
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray

    @property
    def subbands(self) -> tuple[np.ndarray, ...]:
        return (self.lh, self.hl, self.hh)


@dataclass(frozen=True)
class DirectionalGroup:
    """The 2**depth directional subbands of one pyramid level."""

    input_shape: tuple[int, int]
    subbands: tuple[np.ndarray, ...]

    @property
    def depth(self) -> int:
        return int(log2(len(self.subbands)))


Level = Union[WaveletTriple, DirectionalGroup]


@dataclass(frozen=True)
class Decomposition:
    """Lowpass residual plus per-level subband groups, coarsest to finest."""

    lowpass: np.ndarray
    levels: tuple[Level, ...]

    @property
    def subband_count(self) -> int:
        return 1 + sum(len(level.subbands) for level in self.levels)


def _as_image(x, min_size=1) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {x.shape}")
    if x.shape[0] < min_size or x.shape[1] < min_size:
        raise ValueError(f"image {x.shape} smaller than {min_size}x{min_size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("image contains non-finite values")
    return x


# --------------------------------------------------------------------------
# extension and filtering primitives
# --------------------------------------------------------------------------

def extend2(x, ru, rd, cl, cr, mode="per"):
    """Extend an image by (ru, rd) rows and (cl, cr) cols.

    'per' is plain periodic tiling.  'qper_row'/'qper_col' periodize along
    one axis with a half-period roll of the other, which is the periodicity
    a quincunx-downsampled signal actually has.
    """
    m, n = x.shape
    if mode == "per":
        ri = np.mod(np.arange(-ru, m + rd), m)
        ci = np.mod(np.arange(-cl, n + cr), n)
        return x[np.ix_(ri, ci)]
    if mode == "qper_col":
        # Each wrap across the row boundary rolls the columns by half a
        # period; two wraps cancel, matching the quincunx lattice.
        ri = np.arange(-ru, m + rd)
        wraps = ri // m
        rows = ri - wraps * m
        ci = np.mod(np.arange(-cl, n + cr), n)
        cols = np.mod(ci[None, :] + (wraps * (n // 2))[:, None], n)
        return x[rows[:, None], cols]
    if mode == "qper_row":
        ci = np.arange(-cl, n + cr)
        wraps = ci // n
        cols = ci - wraps * n
        ri = np.mod(np.arange(-ru, m + rd), m)
        rows = np.mod(ri[:, None] + (wraps * (m // 2))[None, :], m)
        return x[rows, cols[None, :]]
    raise ValueError(f"unknown extension mode {mode!r}")


def efilter2(x, f, mode="per", shift=(0, 0)):
    """2-D filter with extension handling; output keeps the input size.

    The filter origin sits at floor(shape / 2); ``shift`` displaces the
    evaluation window, which the two-channel banks use to stagger the
    highpass channel of odd-sized filter pairs.
    """
    sf0 = (f.shape[0] - 1) / 2.0
    sf1 = (f.shape[1] - 1) / 2.0
    xe = extend2(
        x,
        int(np.floor(sf0)) + shift[0], int(np.ceil(sf0)) - shift[0],
        int(np.floor(sf1)) + shift[1], int(np.ceil(sf1)) - shift[1],
        mode,
    )
    return convolve2d(xe, f, mode="valid")


def _filter_axis(x, kernel, axis):
    """Periodic 1-D convolution of a Kernel1D along one axis, same size."""
    taps = kernel.taps
    left = taps.size - 1 - kernel.origin
    right = kernel.origin
    if axis == 0:
        xe = extend2(x, left, right, 0, 0, "per")
        return convolve2d(xe, taps[:, None], mode="valid")
    xe = extend2(x, 0, 0, left, right, "per")
    return convolve2d(xe, taps[None, :], mode="valid")


# --------------------------------------------------------------------------
# lattice resampling
# --------------------------------------------------------------------------

def resamp(x, kind, shift=1):
    """Unimodular shear resampling.

    kind 0: y[i, j] = x[(i + s*j) % m, j]      kind 1: (i - s*j)
    kind 2: y[i, j] = x[i, (j + s*i) % n]      kind 3: (j - s*i)
    """
    m, n = x.shape
    if kind in (0, 1):
        s = shift if kind == 0 else -shift
        rows = (np.arange(m)[:, None] + s * np.arange(n)[None, :]) % m
        return x[rows, np.arange(n)[None, :]]
    if kind in (2, 3):
        s = shift if kind == 2 else -shift
        cols = (np.arange(n)[None, :] + s * np.arange(m)[:, None]) % n
        return x[np.arange(m)[:, None], cols]
    raise ValueError(f"resamp kind must be 0..3, got {kind}")


def qdown(x, kind):
    """Quincunx downsampling via the Smith form shear-decimate-shear chain."""
    if kind == "1r":
        return resamp(resamp(x, 1)[::2], 2)
    if kind == "1c":
        return resamp(resamp(x, 2)[:, ::2], 1)
    if kind == "2r":
        return resamp(resamp(x, 0)[::2], 3)
    if kind == "2c":
        return resamp(resamp(x, 3)[:, ::2], 0)
    raise ValueError(f"unknown quincunx kind {kind!r}")


def qup(x, kind):
    """Quincunx upsampling, the exact adjoint of :func:`qdown`."""
    m, n = x.shape
    if kind == "1r":
        z = np.zeros((2 * m, n))
        z[::2] = resamp(x, 3)
        return resamp(z, 0)
    if kind == "1c":
        z = np.zeros((m, 2 * n))
        z[:, ::2] = resamp(x, 0)
        return resamp(z, 3)
    if kind == "2r":
        z = np.zeros((2 * m, n))
        z[::2] = resamp(x, 2)
        return resamp(z, 1)
    if kind == "2c":
        z = np.zeros((m, 2 * n))
        z[:, ::2] = resamp(x, 1)
        return resamp(z, 2)
    raise ValueError(f"unknown quincunx kind {kind!r}")


# Parallelogram sampling = shear followed by quincunx, used at tree depth >= 3.
_PQ_EQUIV = ("1r", "2r", "2c", "1c")
_PQ_INVERSE = (1, 0, 3, 2)


# --------------------------------------------------------------------------
# two-channel filter bank building blocks
# --------------------------------------------------------------------------

def fbdec(x, h0, h1, type1, type2, mode="per"):
    """One two-channel analysis split ('q' quincunx or 'pq' sheared quincunx)."""
    if type1 == "pq":
        x = resamp(x, type2)
    # Odd-sized filter pairs are staggered by one row between the channels.
    shift = (-1, 0) if (h1.shape[0] % 2 and h1.shape[1] % 2) else (0, 0)
    y0 = efilter2(x, h0, mode)
    y1 = efilter2(x, h1, mode, shift)
    if type1 == "q":
        return qdown(y0, type2), qdown(y1, type2)
    if type1 == "pq":
        return qdown(y0, _PQ_EQUIV[type2]), qdown(y1, _PQ_EQUIV[type2])
    raise ValueError(f"unknown bank type {type1!r}")


def fbrec(y0, y1, g0, g1, type1, type2, mode="per"):
    """One two-channel synthesis merge, inverse of :func:`fbdec`."""
    if type1 == "q":
        y0 = qup(y0, type2)
        y1 = qup(y1, type2)
    elif type1 == "pq":
        y0 = qup(y0, _PQ_EQUIV[type2])
        y1 = qup(y1, _PQ_EQUIV[type2])
    else:
        raise ValueError(f"unknown bank type {type1!r}")
    shift = (1, 0) if (g1.shape[0] % 2 and g1.shape[1] % 2) else (0, 0)
    x = efilter2(y0, g0, mode) + efilter2(y1, g1, mode, shift)
    if type1 == "pq":
        x = resamp(x, _PQ_INVERSE[type2])
    return x


def _fan_filters(d0, d1):
    """The four sheared-fan orientations derived from a diamond pair."""
    f0 = [modulate2(d0, "r"), modulate2(d0, "c")]
    f1 = [modulate2(d1, "r"), modulate2(d1, "c")]
    f0 += [f0[0].T, f0[1].T]
    f1 += [f1[0].T, f1[1].T]
    return f0, f1


def _backsamp(y):
    """Shear the tree outputs so the overall sampling of each subband is
    rectangular (rows-by-2 at depth 1, diagonal at deeper levels)."""
    n = int(log2(len(y)))
    y = list(y)
    if n == 1:
        for k in range(2):
            y[k] = resamp(y[k], 3)
            y[k][:, ::2] = resamp(y[k][:, ::2], 0)
            y[k][:, 1::2] = resamp(y[k][:, 1::2], 0)
    elif n > 2:
        half = 2 ** (n - 1)
        for k in range(2 ** (n - 2)):
            shift = 2 * (k + 1) - (2 ** (n - 2) + 1)
            for j in (2 * k, 2 * k + 1):
                y[j] = resamp(y[j], 2, shift)
                y[j + half] = resamp(y[j + half], 0, shift)
    return y


def _rebacksamp(y):
    n = int(log2(len(y)))
    y = list(y)
    if n == 1:
        for k in range(2):
            y[k] = np.array(y[k], copy=True)
            y[k][:, ::2] = resamp(y[k][:, ::2], 1)
            y[k][:, 1::2] = resamp(y[k][:, 1::2], 1)
            y[k] = resamp(y[k], 2)
    elif n > 2:
        half = 2 ** (n - 1)
        for k in range(2 ** (n - 2)):
            shift = 2 * (k + 1) - (2 ** (n - 2) + 1)
            for j in (2 * k, 2 * k + 1):
                y[j] = resamp(y[j], 2, -shift)
                y[j + half] = resamp(y[j + half], 0, -shift)
    return y


# --------------------------------------------------------------------------
# directional filter bank
# --------------------------------------------------------------------------

def _check_dfb_size(shape, depth, level=None):
    need = 2 ** ceil(depth / 2)
    if shape[0] % need or shape[1] % need:
        where = "" if level is None else f" at pyramid level {level}"
        raise ValueError(
            f"image size {shape[0]}x{shape[1]} not divisible by {need} "
            f"required for directional depth {depth}{where}"
        )


def dfb_decompose(img, depth, *, _level=None) -> DirectionalGroup:
    """Split an image into 2**depth directional subbands (critical sampling).

    Rows and cols must be divisible by 2**ceil(depth/2).  The first half of
    the subbands (0 to 2**(depth-1) - 1) covers the wedges around the
    horizontal-frequency axis, i.e. content that varies mostly along columns;
    the second half covers the vertical-frequency wedges.  Ordering within
    each half follows this implementation's tree convention.
    """
    x = _as_image(img, min_size=2)
    if not 1 <= depth <= MAX_DFB_DEPTH:
        raise ValueError(f"directional depth must be in [1, {MAX_DFB_DEPTH}], got {depth}")
    _check_dfb_size(x.shape, depth, _level)

    d0, d1, _, _ = pkva_quincunx()
    k0 = modulate2(d0, "c")
    k1 = modulate2(d1, "c")
    if depth == 1:
        y = list(fbdec(x, k0, k1, "q", "1r", "per"))
    else:
        x0, x1 = fbdec(x, k0, k1, "q", "1r", "per")
        y = [None] * 4
        y[0], y[1] = fbdec(x0, k0, k1, "q", "2c", "qper_col")
        y[2], y[3] = fbdec(x1, k0, k1, "q", "2c", "qper_col")
        f0, f1 = _fan_filters(d0, d1)
        for lev in range(3, depth + 1):
            y_old = y
            y = [None] * 2 ** lev
            for k in range(2 ** (lev - 1)):
                i = k % 2 if k < 2 ** (lev - 2) else k % 2 + 2
                y[2 * k], y[2 * k + 1] = fbdec(y_old[k], f0[i], f1[i], "pq", i, "per")
    y = _backsamp(y)
    half = 2 ** (depth - 1)
    y[half:] = y[half:][::-1]
    return DirectionalGroup(input_shape=x.shape, subbands=tuple(y))


def dfb_reconstruct(group: DirectionalGroup, depth: int) -> np.ndarray:
    """Exact inverse of :func:`dfb_decompose`."""
    bands = group.subbands
    if len(bands) != 2 ** depth:
        raise ValueError(
            f"expected {2 ** depth} subbands for depth {depth}, got {len(bands)}"
        )
    shapes = {b.shape for b in bands[: len(bands) // 2]} if depth > 1 else {
        b.shape for b in bands
    }
    if len(shapes) != 1:
        raise ValueError(f"inconsistent subband shapes {sorted(shapes)}")

    _, _, s0, s1 = pkva_quincunx()
    k0 = modulate2(s0, "c")
    k1 = modulate2(s1, "c")
    y = list(bands)
    half = 2 ** (depth - 1)
    y[half:] = y[half:][::-1]
    y = _rebacksamp(y)
    if depth == 1:
        return fbrec(y[0], y[1], k0, k1, "q", "1r", "per")
    f0, f1 = _fan_filters(s0, s1)
    for lev in range(depth, 2, -1):
        y_old = y
        y = [None] * 2 ** (lev - 1)
        for k in range(2 ** (lev - 1)):
            i = k % 2 if k < 2 ** (lev - 2) else k % 2 + 2
            y[k] = fbrec(y_old[2 * k], y_old[2 * k + 1], f0[i], f1[i], "pq", i, "per")
    x0 = fbrec(y[0], y[1], k0, k1, "q", "2c", "qper_col")
    x1 = fbrec(y[2], y[3], k0, k1, "q", "2c", "qper_col")
    return fbrec(x0, x1, k0, k1, "q", "1r", "per")


# --------------------------------------------------------------------------
# Laplacian pyramid
# --------------------------------------------------------------------------

def _predict(coarse, shape, synth_low):
    up = np.zeros(shape)
    up[::2, ::2] = coarse
    return _filter_axis(_filter_axis(up, synth_low, 0), synth_low, 1)


def lp_decompose(img) -> tuple[np.ndarray, np.ndarray]:
    """One pyramid step: ceil-half coarse image plus full-size bandpass residual."""
    x = _as_image(img, min_size=2)
    al, _, sl, _ = cdf97()
    lo = _filter_axis(_filter_axis(x, al, 0), al, 1)
    coarse = lo[::2, ::2]
    bandpass = x - _predict(coarse, x.shape, sl)
    return coarse, bandpass


def lp_reconstruct(coarse, bandpass) -> np.ndarray:
    """Prediction from the coarse image plus the bandpass residual (exact)."""
    coarse = np.asarray(coarse, dtype=np.float64)
    bandpass = np.asarray(bandpass, dtype=np.float64)
    expect = (ceil(bandpass.shape[0] / 2), ceil(bandpass.shape[1] / 2))
    if coarse.shape != expect:
        raise ValueError(
            f"coarse shape {coarse.shape} inconsistent with bandpass "
            f"{bandpass.shape} (expected {expect})"
        )
    _, _, sl, _ = cdf97()
    return _predict(coarse, bandpass.shape, sl) + bandpass


# --------------------------------------------------------------------------
# separable wavelet level (directional depth 0)
# --------------------------------------------------------------------------

def _wrap_pad(x):
    """Append one wrapped row/column to odd axes so both halve exactly."""
    if x.shape[0] % 2:
        x = np.vstack([x, x[:1, :]])
    if x.shape[1] % 2:
        x = np.hstack([x, x[:, :1]])
    return x


def wavelet_level(img) -> tuple[np.ndarray, WaveletTriple]:
    """One separable 9/7 step: returns (LL, detail triple), bands ceil-halved."""
    x = _as_image(img, min_size=2)
    shape = x.shape
    al, ah, _, _ = cdf97()
    xp = _wrap_pad(x)
    lo = _filter_axis(xp, al, 1)[:, ::2]
    hi = _filter_axis(xp, ah, 1)[:, ::2]
    ll = _filter_axis(lo, al, 0)[::2]
    lh = _filter_axis(lo, ah, 0)[::2]
    hl = _filter_axis(hi, al, 0)[::2]
    hh = _filter_axis(hi, ah, 0)[::2]
    return ll, WaveletTriple(input_shape=shape, lh=lh, hl=hl, hh=hh)


def _upsample2(b, size, axis):
    m, n = b.shape
    if axis == 0:
        z = np.zeros((size, n))
        z[::2] = b
    else:
        z = np.zeros((m, size))
        z[:, ::2] = b
    return z


def wavelet_inverse(ll, triple: WaveletTriple) -> np.ndarray:
    """Exact inverse of :func:`wavelet_level`."""
    m, n = triple.input_shape
    mp, np_ = m + m % 2, n + n % 2
    _, _, sl, sh = cdf97()
    lo = (_filter_axis(_upsample2(ll, mp, 0), sl, 0)
          + _filter_axis(_upsample2(triple.lh, mp, 0), sh, 0))
    hi = (_filter_axis(_upsample2(triple.hl, mp, 0), sl, 0)
          + _filter_axis(_upsample2(triple.hh, mp, 0), sh, 0))
    x = (_filter_axis(_upsample2(lo, np_, 1), sl, 1)
         + _filter_axis(_upsample2(hi, np_, 1), sh, 1))
    return x[:m, :n]


# --------------------------------------------------------------------------
# combined pyramidal directional filter bank
# --------------------------------------------------------------------------

def pdfb_decompose(img, cfg: PdfbConfig) -> Decomposition:
    """Full decomposition: finest level first, coarse image carried downward.

    Levels with directional depth >= 1 run a pyramid step and split the
    bandpass residual directionally; depth-0 levels run one wavelet step and
    carry LL onward.  The final coarse image becomes ``lowpass``.
    """
    x = _as_image(img, min_size=2)
    levels: list[Level] = []
    # cfg lists levels coarsest->finest; execution consumes them finest-first.
    for index, depth in reversed(list(enumerate(cfg.nlevs))):
        if x.shape[0] < 2 or x.shape[1] < 2:
            raise ValueError(
                f"image exhausted at pyramid level {index}: shape {x.shape}"
            )
        if depth == 0:
            x, triple = wavelet_level(x)
            levels.append(triple)
        else:
            _check_dfb_size(x.shape, depth, level=index)
            coarse, bandpass = lp_decompose(x)
            levels.append(dfb_decompose(bandpass, depth, _level=index))
            x = coarse
    return Decomposition(lowpass=x, levels=tuple(levels[::-1]))


def pdfb_reconstruct(dec: Decomposition, cfg: PdfbConfig) -> np.ndarray:
    """Exact inverse of :func:`pdfb_decompose`."""
    if len(dec.levels) != len(cfg.nlevs):
        raise ValueError(
            f"decomposition has {len(dec.levels)} levels, config expects "
            f"{len(cfg.nlevs)}"
        )
    x = dec.lowpass
    for index, (depth, level) in enumerate(zip(cfg.nlevs, dec.levels)):
        if depth == 0:
            if not isinstance(level, WaveletTriple):
                raise ValueError(f"level {index}: expected a wavelet triple")
            x = wavelet_inverse(x, level)
        else:
            if not isinstance(level, DirectionalGroup):
                raise ValueError(f"level {index}: expected a directional group")
            if len(level.subbands) != 2 ** depth:
                raise ValueError(
                    f"level {index}: {len(level.subbands)} subbands, "
                    f"config depth {depth} expects {2 ** depth}"
                )
            x = lp_reconstruct(x, dfb_reconstruct(level, depth))
    return x

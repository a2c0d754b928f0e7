"""Fixed filter constructions for the transform stack.

Two families are built here:

* the Cohen-Daubechies-Feauveau 9/7 biorthogonal pair, used for both the
  pyramid lowpass stage and the separable wavelet step, and
* the PKVA (Phoong-Kim-Vaidyanathan-Ansari) two-channel filters, grown from a
  12-tap half-band ladder prototype into quincunx diamond filters and then
  modulated into fan filters for the directional stage.

Tap values are fixed constants; none of them is trusted on faith.  The test
suite drives every set through numeric perfect-reconstruction round trips, so
a transcription error cannot pass silently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

__all__ = [
    "Kernel1D",
    "FanFilterPair",
    "cdf97",
    "ladder_prototype",
    "pkva_quincunx",
    "pkva_ladder",
    "modulate2",
]


@dataclass(frozen=True)
class Kernel1D:
    """1-D FIR kernel with an explicit origin (index of the center tap)."""

    taps: np.ndarray
    origin: int

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=np.float64)
        if taps.ndim != 1 or taps.size == 0:
            raise ValueError("kernel taps must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(taps)):
            raise ValueError("kernel taps must be finite")
        if not 0 <= self.origin < taps.size:
            raise ValueError(f"origin {self.origin} outside taps of length {taps.size}")
        object.__setattr__(self, "taps", taps)


@dataclass(frozen=True)
class FanFilterPair:
    """Analysis fan pair (h0, h1) and synthesis fan pair (g0, g1).

    Each filter is a 2-D array with its origin at floor(shape / 2).  The
    four filters jointly give perfect reconstruction on the quincunx
    lattice; that property is asserted numerically by the round-trip tests,
    never assumed.
    """

    h0: np.ndarray
    h1: np.ndarray
    g0: np.ndarray
    g1: np.ndarray


# CDF 9/7 lowpass taps, normalized to DC gain sqrt(2).
_CDF97_ANALYSIS_LOW = np.array([
    0.037828455506995, -0.023849465019380, -0.110624404418420,
    0.377402855612650, 0.852698679009400, 0.377402855612650,
    -0.110624404418420, -0.023849465019380, 0.037828455506995,
])
_CDF97_SYNTHESIS_LOW = np.array([
    -0.064538882628938, -0.040689417609558, 0.418092273222210,
    0.788485616405660, 0.418092273222210, -0.040689417609558,
    -0.064538882628938,
])


def cdf97() -> tuple[Kernel1D, Kernel1D, Kernel1D, Kernel1D]:
    """Return the 9/7 set (analysis_low, analysis_high, synthesis_low, synthesis_high).

    The highpass filters are the alternating-sign modulations of the dual
    lowpass, with origins offset by one sample so that the two-channel
    analysis/synthesis chain reconstructs exactly.
    """
    al = _CDF97_ANALYSIS_LOW
    sl = _CDF97_SYNTHESIS_LOW
    ah = ((-1.0) ** np.arange(sl.size)) * sl
    sh = ((-1.0) ** (np.arange(al.size) + 1)) * al
    return (
        Kernel1D(al, 4),
        Kernel1D(ah, 2),
        Kernel1D(sl, 3),
        Kernel1D(sh, 5),
    )


def ladder_prototype() -> np.ndarray:
    """12-tap symmetric half-band ladder kernel of the PKVA design."""
    v = np.array([0.6300, -0.1930, 0.0972, -0.0526, 0.0272, -0.0144])
    return np.concatenate([v[::-1], v])


def modulate2(x: np.ndarray, axes: str) -> np.ndarray:
    """Multiply by (-1)**(index - floor(size/2)) along 'r'(ows), 'c'(ols) or 'b'(oth)."""
    if axes not in ("r", "c", "b"):
        raise ValueError(f"axes must be 'r', 'c' or 'b', got {axes!r}")
    m, n = x.shape
    y = np.array(x, dtype=np.float64, copy=True)
    if axes in ("r", "b"):
        y *= ((-1.0) ** (np.arange(m) - m // 2))[:, None]
    if axes in ("c", "b"):
        y *= ((-1.0) ** (np.arange(n) - n // 2))[None, :]
    return y


def _quincunx_upsample_kernel(x: np.ndarray) -> np.ndarray:
    """Re-index x onto the quincunx lattice: tap (i, j) moves to (i - j, i + j)."""
    m, n = x.shape
    out = np.zeros((m + n - 1, m + n - 1))
    i = np.arange(m)[:, None]
    j = np.arange(n)[None, :]
    out[i - j + n - 1, i + j] = x
    return out


def pkva_quincunx() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Diamond-shaped quincunx filters (h0, h1, g0, g1) from the ladder prototype.

    The analysis lowpass is the half-band completion of the quincunx-upsampled
    separable prototype; the highpass is its ladder complement, so the pair is
    exactly invertible by construction.  Synthesis filters are the modulated
    swaps of the analysis pair.
    """
    beta = ladder_prototype()
    sp = np.outer(beta, beta)
    h = _quincunx_upsample_kernel(sp)   # 23x23, odd-parity support
    c = h.shape[0] // 2
    h0 = h.copy()
    h0[c, c] += 1.0
    h0 *= 0.5
    h1 = -convolve2d(h, h0)
    cc = h1.shape[0] // 2
    h1[cc, cc] += 1.0
    h0 *= np.sqrt(2.0)
    h1 *= np.sqrt(2.0)
    g0 = modulate2(h1, "b")
    g1 = modulate2(h0, "b")
    return h0, h1, g0, g1


def pkva_ladder() -> FanFilterPair:
    """Fan (wedge) filters: the quincunx diamond pair modulated by half a period.

    Modulating the column axis swaps the diamond and its complement between
    the vertical and horizontal frequency fans, which is the form the first
    level of the directional filter bank consumes.
    """
    h0, h1, g0, g1 = pkva_quincunx()
    return FanFilterPair(
        h0=modulate2(h0, "c"),
        h1=modulate2(h1, "c"),
        g0=modulate2(g0, "c"),
        g1=modulate2(g1, "c"),
    )

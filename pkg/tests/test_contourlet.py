"""Transform engine: shape laws, round trips, linearity, direct-form fidelity."""

import numpy as np
import pytest

from contourpose.contourlet import (
    Decomposition,
    DirectionalGroup,
    PdfbConfig,
    WaveletTriple,
    dfb_decompose,
    dfb_reconstruct,
    efilter2,
    lp_decompose,
    lp_reconstruct,
    pdfb_decompose,
    pdfb_reconstruct,
    wavelet_inverse,
    wavelet_level,
)

rng = np.random.default_rng(2024)


def scaled(dec: Decomposition, a: float) -> Decomposition:
    levels = []
    for level in dec.levels:
        if isinstance(level, WaveletTriple):
            levels.append(WaveletTriple(level.input_shape, a * level.lh,
                                        a * level.hl, a * level.hh))
        else:
            levels.append(DirectionalGroup(
                level.input_shape, tuple(a * b for b in level.subbands)))
    return Decomposition(a * dec.lowpass, tuple(levels))


# ----------------------------------------------------------- direct form

def test_efilter2_matches_brute_force_periodic_convolution():
    x = rng.standard_normal((7, 9))
    f = rng.standard_normal((5, 3))
    got = efilter2(x, f, "per")
    oi, oj = f.shape[0] // 2, f.shape[1] // 2
    want = np.zeros_like(x)
    for i in range(7):
        for j in range(9):
            acc = 0.0
            for k in range(5):
                for l in range(3):
                    acc += f[k, l] * x[(i - k + oi) % 7, (j - l + oj) % 9]
            want[i, j] = acc
    assert np.abs(got - want).max() < 1e-12


# ----------------------------------------------------------- Laplacian pyramid

def test_lp_shapes_paper_geometry():
    x = rng.standard_normal((120, 90))
    coarse, bandpass = lp_decompose(x)
    assert coarse.shape == (60, 45)
    assert bandpass.shape == (120, 90)


def test_lp_round_trip():
    x = rng.standard_normal((64, 64))
    coarse, bandpass = lp_decompose(x)
    assert np.abs(lp_reconstruct(coarse, bandpass) - x).max() < 1e-10


def test_lp_zero_image():
    coarse, bandpass = lp_decompose(np.zeros((16, 16)))
    assert not coarse.any() and not bandpass.any()


def test_lp_reconstruct_with_zero_coarse_returns_bandpass():
    x = rng.standard_normal((32, 32))
    coarse, bandpass = lp_decompose(x)
    out = lp_reconstruct(np.zeros_like(coarse), bandpass)
    assert np.array_equal(out, bandpass)


def test_lp_reconstruct_linearity():
    c1, d1 = lp_decompose(rng.standard_normal((32, 32)))
    c2, d2 = lp_decompose(rng.standard_normal((32, 32)))
    a, b = 0.7, -1.3
    lhs = lp_reconstruct(a * c1 + b * c2, a * d1 + b * d2)
    rhs = a * lp_reconstruct(c1, d1) + b * lp_reconstruct(c2, d2)
    assert np.abs(lhs - rhs).max() < 1e-10


def test_lp_rejects_degenerate_and_mismatched_input():
    with pytest.raises(ValueError):
        lp_decompose(np.zeros((1, 8)))
    with pytest.raises(ValueError):
        lp_reconstruct(np.zeros((4, 4)), np.zeros((16, 16)))


# ----------------------------------------------------------- directional bank

def test_dfb_depth1_paper_shapes():
    x = rng.standard_normal((120, 90))
    group = dfb_decompose(x, 1)
    assert [b.shape for b in group.subbands] == [(60, 90), (60, 90)]


def test_dfb_depth3_has_eight_oriented_subbands():
    n = 64
    group = dfb_decompose(rng.standard_normal((n, n)), 3)
    assert len(group.subbands) == 8
    # Content varying along columns (horizontal wavevector) lands in the
    # first half of the subbands, content varying along rows in the second.
    cols = np.cos(0.8 * np.pi * np.arange(n))[None, :] * np.ones((n, 1))
    energies = np.array([(b ** 2).sum()
                         for b in dfb_decompose(cols, 3).subbands])
    assert energies[:4].sum() > 10.0 * energies[4:].sum()
    rows = np.cos(0.8 * np.pi * np.arange(n))[:, None] * np.ones((1, n))
    energies = np.array([(b ** 2).sum()
                         for b in dfb_decompose(rows, 3).subbands])
    assert energies[4:].sum() > 10.0 * energies[:4].sum()


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_dfb_round_trip(depth):
    x = rng.standard_normal((64, 64))
    group = dfb_decompose(x, depth)
    assert len(group.subbands) == 2 ** depth
    assert sum(b.size for b in group.subbands) == x.size
    assert np.abs(dfb_reconstruct(group, depth) - x).max() < 1e-10


def test_dfb_zero_subbands_reconstruct_to_zero():
    group = dfb_decompose(rng.standard_normal((32, 32)), 2)
    zeros = DirectionalGroup(group.input_shape,
                             tuple(np.zeros_like(b) for b in group.subbands))
    assert not dfb_reconstruct(zeros, 2).any()


@pytest.mark.parametrize("depth", [1, 2])
def test_dfb_single_impulse_synthesis_inverts(depth):
    # The bank is a critically sampled bijection, so analysis of the
    # synthesized single-channel impulse must return exactly that impulse.
    group = dfb_decompose(rng.standard_normal((32, 32)), depth)
    bands = [np.zeros_like(b) for b in group.subbands]
    bands[0][3, 5] = 1.0
    impulse = DirectionalGroup(group.input_shape, tuple(bands))
    x = dfb_reconstruct(impulse, depth)
    again = dfb_decompose(x, depth)
    for got, want in zip(again.subbands, impulse.subbands):
        assert np.abs(got - want).max() < 1e-10


def test_dfb_rejects_bad_sizes_and_counts():
    with pytest.raises(ValueError, match="not divisible"):
        dfb_decompose(rng.standard_normal((45, 60)), 1)
    with pytest.raises(ValueError, match="not divisible"):
        dfb_decompose(rng.standard_normal((60, 62)), 3)
    group = dfb_decompose(rng.standard_normal((32, 32)), 2)
    with pytest.raises(ValueError, match="subbands"):
        dfb_reconstruct(group, 3)


# ----------------------------------------------------------- wavelet level

def test_wavelet_paper_shapes_with_odd_axis():
    ll, triple = wavelet_level(rng.standard_normal((60, 45)))
    assert ll.shape == (30, 23)
    assert all(b.shape == (30, 23) for b in triple.subbands)


@pytest.mark.parametrize("shape", [(32, 32), (60, 45), (45, 45)])
def test_wavelet_round_trip(shape):
    x = rng.standard_normal(shape)
    ll, triple = wavelet_level(x)
    assert np.abs(wavelet_inverse(ll, triple) - x).max() < 1e-10


def test_wavelet_constant_kills_details():
    ll, triple = wavelet_level(np.full((32, 32), 9.25))
    for band in triple.subbands:
        assert np.abs(band).max() < 1e-10
    assert np.abs(ll - 2.0 * 9.25).max() < 1e-10  # two sqrt(2) lowpass gains


# ----------------------------------------------------------- combined PDFB

def test_pdfb_paper_six_subbands():
    dec = pdfb_decompose(rng.standard_normal((120, 90)), PdfbConfig((0, 1)))
    assert dec.subband_count == 6
    assert dec.lowpass.shape == (30, 23)
    wavelet, directional = dec.levels
    assert isinstance(wavelet, WaveletTriple)
    assert all(b.shape == (30, 23) for b in wavelet.subbands)
    assert isinstance(directional, DirectionalGroup)
    assert [b.shape for b in directional.subbands] == [(60, 90), (60, 90)]


def test_pdfb_depth2_shape_law():
    dec = pdfb_decompose(rng.standard_normal((64, 64)), PdfbConfig((2,)))
    assert dec.lowpass.shape == (32, 32)
    assert [b.shape for b in dec.levels[0].subbands] == [(32, 32)] * 4


SUBBAND_LAW_CASES = [
    ((120, 90), (0, 1)),
    ((64, 64), (1,)),
    ((64, 64), (2,)),
    ((120, 90), (0, 0)),
    ((64, 64), (1, 2)),
]


@pytest.mark.parametrize("shape,nlevs", SUBBAND_LAW_CASES)
def test_pdfb_subband_count_law_and_round_trip(shape, nlevs):
    cfg = PdfbConfig(nlevs)
    x = rng.standard_normal(shape)
    dec = pdfb_decompose(x, cfg)
    expected = 1 + sum(3 if d == 0 else 2 ** d for d in nlevs)
    assert dec.subband_count == expected
    assert np.abs(pdfb_reconstruct(dec, cfg) - x).max() < 1e-9


def test_pdfb_linearity():
    cfg = PdfbConfig((0, 1))
    x = rng.standard_normal((120, 90))
    y = rng.standard_normal((120, 90))
    a, b = 1.7, -0.4
    dx = pdfb_decompose(x, cfg)
    dy = pdfb_decompose(y, cfg)
    dz = pdfb_decompose(a * x + b * y, cfg)
    ref = scaled(dx, a)
    ref2 = scaled(dy, b)
    assert np.abs(dz.lowpass - (ref.lowpass + ref2.lowpass)).max() < 1e-10
    for lz, lx, ly in zip(dz.levels, ref.levels, ref2.levels):
        for bz, bx, by in zip(lz.subbands, lx.subbands, ly.subbands):
            assert np.abs(bz - (bx + by)).max() < 1e-10


def test_pdfb_zero_decomposition_reconstructs_to_zero():
    cfg = PdfbConfig((0, 1))
    dec = pdfb_decompose(rng.standard_normal((120, 90)), cfg)
    assert not pdfb_reconstruct(scaled(dec, 0.0), cfg).any()


def test_pdfb_energy_sanity():
    cfg = PdfbConfig((0, 1))
    x = rng.standard_normal((120, 90))
    x -= x.mean()
    dec = pdfb_decompose(x, cfg)
    total = (dec.lowpass ** 2).sum() + sum(
        (b ** 2).sum() for level in dec.levels for b in level.subbands)
    ratio = total / (x ** 2).sum()
    assert 0.5 < ratio < 2.0


def test_pdfb_reports_offending_level():
    # 90 -> 45 is odd, so the depth-1 level at index 0 must be named.
    with pytest.raises(ValueError, match="level 0"):
        pdfb_decompose(rng.standard_normal((120, 90)), PdfbConfig((1, 2)))


def test_pdfb_structure_mismatch_errors():
    cfg = PdfbConfig((0, 1))
    dec = pdfb_decompose(rng.standard_normal((120, 90)), cfg)
    with pytest.raises(ValueError, match="levels"):
        pdfb_reconstruct(dec, PdfbConfig((0, 1, 1)))
    with pytest.raises(ValueError, match="wavelet"):
        pdfb_reconstruct(Decomposition(dec.lowpass, dec.levels[::-1]), cfg)


def test_pdfb_config_validation():
    with pytest.raises(ValueError):
        PdfbConfig(())
    with pytest.raises(ValueError):
        PdfbConfig((0, 6))
    with pytest.raises(ValueError):
        PdfbConfig((-1,))

"""Feature extraction: subband vectorization and PCA -> LDA reduction.

The raw feature vector concatenates the four coarse-level bands of the
canonical decomposition (LL, LH, HL, HH at 30x23 for a 120x90 input), one
feature per pixel, 2760 features total.  PCA whitens and truncates by the
normalized cumulative eigenvalue sum, then LDA projects onto at most C - 1
Fisher directions.

PCA always runs through the n x n Gram matrix of the centered data: with
dozens of training images against thousands of raw features that is the only
sensible shape, and on small problems it must (and tested: does) agree with a
dense covariance eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contourlet import Decomposition, WaveletTriple

__all__ = [
    "SingularScatterError",
    "ProjectionModel",
    "vectorize",
    "ncsev",
    "pca_fit",
    "lda_fit",
    "fit_projection",
    "project",
]


class SingularScatterError(ArithmeticError):
    """Within-class scatter is singular; fewer PCA components are needed."""


@dataclass(frozen=True)
class ProjectionModel:
    """Fitted mean, PCA basis and LDA basis with both eigenvalue records."""

    mean: np.ndarray              # (d,)
    pca_basis: np.ndarray         # (d, p), orthonormal columns
    pca_eigenvalues: np.ndarray   # (p,), non-increasing
    lda_basis: np.ndarray         # (p, q), unit-norm columns
    lda_eigenvalues: np.ndarray   # (q,), non-increasing

    @property
    def raw_dim(self) -> int:
        return self.mean.size

    @property
    def p(self) -> int:
        return self.pca_basis.shape[1]

    @property
    def q(self) -> int:
        return self.lda_basis.shape[1]


def vectorize(dec: Decomposition) -> np.ndarray:
    """Flatten the coarse-level bands (LL, LH, HL, HH order, row-major).

    Requires the coarsest level of the decomposition to be a wavelet triple
    whose bands match the lowpass shape; finer (directional) levels are
    excluded by design.
    """
    if not dec.levels or not isinstance(dec.levels[0], WaveletTriple):
        raise ValueError(
            "decomposition has no wavelet triple at the coarsest level; "
            "the feature stage needs a config whose coarsest depth is 0"
        )
    triple = dec.levels[0]
    shape = dec.lowpass.shape
    for name, band in (("LH", triple.lh), ("HL", triple.hl), ("HH", triple.hh)):
        if band.shape != shape:
            raise ValueError(
                f"{name} band shape {band.shape} does not match lowpass {shape}"
            )
    return np.concatenate([
        dec.lowpass.ravel(),
        triple.lh.ravel(),
        triple.hl.ravel(),
        triple.hh.ravel(),
    ])


def ncsev(eigenvalues) -> np.ndarray:
    """Normalized cumulative sum of eigenvalues: NCsEv(i) = sum_{n<=i} / sum_all."""
    ev = np.asarray(eigenvalues, dtype=np.float64)
    if ev.ndim != 1 or ev.size == 0:
        raise ValueError("eigenvalues must be a nonempty 1-D sequence")
    if np.any(ev < 0):
        raise ValueError("eigenvalues must be non-negative")
    total = ev.sum()
    if total <= 0:
        raise ValueError("at least one eigenvalue must be strictly positive")
    return np.cumsum(ev) / total


def _sign_fix(basis: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude entry positive (reproducibility)."""
    idx = np.argmax(np.abs(basis), axis=0)
    signs = np.sign(basis[idx, np.arange(basis.shape[1])])
    signs[signs == 0] = 1.0
    return basis * signs


def _gram_rank(eigs: np.ndarray) -> int:
    if eigs.size == 0 or eigs[0] <= 0:
        return 0
    tol = eigs[0] * max(eigs.size, 10) * np.finfo(np.float64).eps
    return int(np.sum(eigs > tol))


def pca_fit(X, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Top-p principal axes of the rows of X via the Gram-matrix formulation.

    Returns (mean, basis, eigenvalues) with the unbiased (n - 1) covariance
    scaling, eigenvalues sorted descending, and the positive-largest-entry
    sign convention on each basis column.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError(f"X must be an n x d matrix with n >= 2, got {X.shape}")
    n, d = X.shape
    mean = X.mean(axis=0)
    Xc = X - mean
    gram = Xc @ Xc.T / (n - 1)
    eigs, vecs = np.linalg.eigh(gram)
    order = np.argsort(eigs)[::-1]
    eigs = eigs[order]
    vecs = vecs[:, order]
    rank = _gram_rank(eigs)
    if not 1 <= p <= rank:
        raise ValueError(
            f"requested {p} components but the data supports rank {rank} "
            f"(n={n}, d={d})"
        )
    eigs = eigs[:p]
    # Xc' u / ||Xc' u|| lifts a Gram eigenvector to a covariance eigenvector.
    basis = Xc.T @ vecs[:, :p] / np.sqrt(eigs * (n - 1))
    return mean, _sign_fix(basis), eigs


def _class_index(labels) -> tuple[list, list[np.ndarray]]:
    labels = list(labels)
    classes = sorted(set(labels))
    arr = np.asarray(labels, dtype=object)
    return classes, [np.flatnonzero(arr == c) for c in classes]


def lda_fit(Z, labels, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Fisher directions: solve S_B w = lambda S_W w on the PCA-reduced data.

    The within-class scatter is Cholesky-reduced to a symmetric standard
    problem; a singular S_W raises :class:`SingularScatterError`.  Basis
    columns are unit length, sorted by descending eigenvalue, with the same
    sign convention as PCA.
    """
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2:
        raise ValueError(f"Z must be an n x p matrix, got {Z.shape}")
    n, p = Z.shape
    labels = list(labels)
    if len(labels) != n:
        raise ValueError("labels length does not match the number of rows")
    classes, groups = _class_index(labels)
    C = len(classes)
    if C < 2:
        raise ValueError("LDA needs at least two classes")
    if not 1 <= q <= C - 1:
        raise ValueError(f"q must be in [1, {C - 1}] for {C} classes, got {q}")
    if q > p:
        raise ValueError(f"q={q} exceeds the reduced dimension p={p}")

    mean = Z.mean(axis=0)
    s_w = np.zeros((p, p))
    s_b = np.zeros((p, p))
    for idx in groups:
        cls_mean = Z[idx].mean(axis=0)
        centered = Z[idx] - cls_mean
        s_w += centered.T @ centered
        offset = cls_mean - mean
        s_b += idx.size * np.outer(offset, offset)

    try:
        chol = np.linalg.cholesky(s_w)
    except np.linalg.LinAlgError:
        raise SingularScatterError(
            "within-class scatter is singular; retain fewer PCA components"
        ) from None
    inv_l = np.linalg.inv(chol)
    reduced = inv_l @ s_b @ inv_l.T
    reduced = (reduced + reduced.T) / 2.0
    eigs, vecs = np.linalg.eigh(reduced)
    order = np.argsort(eigs)[::-1][:q]
    eigs = eigs[order]
    basis = np.linalg.solve(chol.T, vecs[:, order])
    basis /= np.linalg.norm(basis, axis=0)
    return _sign_fix(basis), eigs


def fit_projection(X, labels, pca_energy: float = 0.99, q: int = 3) -> ProjectionModel:
    """Chain PCA and LDA into one projection model.

    PCA keeps the smallest component count whose NCsEv reaches
    ``pca_energy``, capped at n - C so the within-class scatter stays
    invertible; LDA then keeps ``q`` Fisher directions (paper default 3).
    """
    X = np.asarray(X, dtype=np.float64)
    if not 0.0 < pca_energy <= 1.0:
        raise ValueError(f"pca_energy must be in (0, 1], got {pca_energy}")
    n = X.shape[0]
    classes = sorted(set(labels))
    C = len(classes)

    # Rank probe at full strength, then threshold the eigenvalue curve.
    mean = X.mean(axis=0)
    Xc = X - mean
    gram = Xc @ Xc.T / (n - 1)
    all_eigs = np.sort(np.linalg.eigh(gram)[0])[::-1]
    rank = _gram_rank(all_eigs)
    if rank == 0:
        raise ValueError("training data has zero variance")
    curve = ncsev(all_eigs[:rank])
    p = int(np.searchsorted(curve, pca_energy - 1e-12) + 1)
    p = min(p, rank, max(n - C, 1))

    mean, pca_basis, pca_eigs = pca_fit(X, p)
    reduced = (X - mean) @ pca_basis
    lda_basis, lda_eigs = lda_fit(reduced, labels, q)
    return ProjectionModel(
        mean=mean,
        pca_basis=pca_basis,
        pca_eigenvalues=pca_eigs,
        lda_basis=lda_basis,
        lda_eigenvalues=lda_eigs,
    )


def project(model: ProjectionModel, x) -> np.ndarray:
    """Map raw feature vectors (1-D, or stacked as rows) into the final space."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.raw_dim:
        raise ValueError(
            f"feature length {x.shape[-1]} does not match model "
            f"raw dimension {model.raw_dim}"
        )
    return (x - model.mean) @ model.pca_basis @ model.lda_basis

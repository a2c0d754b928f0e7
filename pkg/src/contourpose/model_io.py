"""Versioned binary persistence for a trained model bundle.

One file stores everything prediction needs: the label alphabet, the
preprocessing geometry, the projection model and the classifier.  All
integers are little-endian uint32 (uint8 for the classifier kind), all reals
little-endian IEEE-754 float64, matrices row-major.  Layout, version 1:

    magic    8 bytes  b"CPOSEMD1"
    alphabet u32 count, then per label: u32 byte-length + UTF-8 bytes
    geometry u32 resize_rows, u32 resize_cols
    nlevs    u32 count, then u32 per level (coarsest first)
    fit      f64 pca_energy
    sizes    u32 raw_dim d, u32 p, u32 q
    mean     f64[d]
    pca      f64[p] eigenvalues, f64[d*p] basis
    lda      f64[q] eigenvalues, f64[p*q] basis
    kind     u8 (0 = knn, 1 = mindist), u32 k (0 for mindist)
    vectors  u32 count n, u32 dim, f64[n*dim]
    labels   u32[n] alphabet indices (knn only)

The writer is a pure function of the bundle, so identical training runs
produce byte-identical files.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classify import ClassifierModel
from .features import ProjectionModel

__all__ = ["ModelFormatError", "ModelBundle", "save_model", "load_model"]

_MAGIC = b"CPOSEMD1"
_KINDS = ("knn", "mindist")


class ModelFormatError(ValueError):
    """Raised when a model file is corrupted or has an unknown version."""


@dataclass(frozen=True)
class ModelBundle:
    """Everything a saved classifier needs to score a new image."""

    projection: ProjectionModel
    classifier: ClassifierModel
    resize: tuple[int, int]
    nlevs: tuple[int, ...]
    pca_energy: float


def _u32(value: int) -> bytes:
    return struct.pack("<I", value)


def _f64s(arr) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f8").tobytes()


def save_model(bundle: ModelBundle, path) -> None:
    proj = bundle.projection
    clf = bundle.classifier
    if clf.kind not in _KINDS:
        raise ValueError(f"unknown classifier kind {clf.kind!r}")
    out = io.BytesIO()
    out.write(_MAGIC)
    out.write(_u32(len(clf.alphabet)))
    for label in clf.alphabet:
        raw = label.encode("utf-8")
        out.write(_u32(len(raw)))
        out.write(raw)
    out.write(_u32(bundle.resize[0]))
    out.write(_u32(bundle.resize[1]))
    out.write(_u32(len(bundle.nlevs)))
    for depth in bundle.nlevs:
        out.write(_u32(depth))
    out.write(struct.pack("<d", bundle.pca_energy))
    d, p, q = proj.raw_dim, proj.p, proj.q
    out.write(_u32(d))
    out.write(_u32(p))
    out.write(_u32(q))
    out.write(_f64s(proj.mean))
    out.write(_f64s(proj.pca_eigenvalues))
    out.write(_f64s(proj.pca_basis))
    out.write(_f64s(proj.lda_eigenvalues))
    out.write(_f64s(proj.lda_basis))
    out.write(struct.pack("<B", _KINDS.index(clf.kind)))
    out.write(_u32(clf.k))
    n, dim = clf.vectors.shape
    out.write(_u32(n))
    out.write(_u32(dim))
    out.write(_f64s(clf.vectors))
    if clf.kind == "knn":
        out.write(np.ascontiguousarray(clf.label_indices, dtype="<u4").tobytes())
    Path(path).write_bytes(out.getvalue())


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int) -> bytes:
        chunk = self.data[self.pos : self.pos + count]
        if len(chunk) < count:
            raise ModelFormatError("model file truncated")
        self.pos += count
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u8(self) -> int:
        return self.take(1)[0]

    def f64(self) -> float:
        return struct.unpack("<d", self.take(8))[0]

    def f64s(self, shape) -> np.ndarray:
        count = int(np.prod(shape))
        arr = np.frombuffer(self.take(8 * count), dtype="<f8")
        return arr.reshape(shape).astype(np.float64)


def load_model(path) -> ModelBundle:
    data = Path(path).read_bytes()
    if data[: len(_MAGIC)] != _MAGIC:
        raise ModelFormatError(
            f"not a model file or unsupported version (magic {data[:8]!r})"
        )
    r = _Reader(data)
    r.take(len(_MAGIC))
    alphabet = []
    for _ in range(r.u32()):
        alphabet.append(r.take(r.u32()).decode("utf-8"))
    alphabet = tuple(alphabet)
    resize = (r.u32(), r.u32())
    nlevs = tuple(r.u32() for _ in range(r.u32()))
    pca_energy = r.f64()
    d, p, q = r.u32(), r.u32(), r.u32()
    projection = ProjectionModel(
        mean=r.f64s((d,)),
        pca_eigenvalues=r.f64s((p,)),
        pca_basis=r.f64s((d, p)),
        lda_eigenvalues=r.f64s((q,)),
        lda_basis=r.f64s((p, q)),
    )
    kind_code = r.u8()
    if kind_code >= len(_KINDS):
        raise ModelFormatError(f"unknown classifier kind code {kind_code}")
    kind = _KINDS[kind_code]
    k = r.u32()
    n, dim = r.u32(), r.u32()
    vectors = r.f64s((n, dim))
    if kind == "knn":
        indices = np.frombuffer(r.take(4 * n), dtype="<u4").astype(np.int64)
        if indices.size and indices.max() >= len(alphabet):
            raise ModelFormatError("classifier label index outside the alphabet")
        if not 1 <= k <= n:
            raise ModelFormatError(f"knn model has k={k} with {n} references")
    else:
        indices = np.empty(0, dtype=np.int64)
        if n != len(alphabet):
            raise ModelFormatError(
                f"mindist model has {n} centroids for {len(alphabet)} labels"
            )
    classifier = ClassifierModel(
        kind=kind, alphabet=alphabet, vectors=vectors,
        label_indices=indices, k=k,
    )
    return ModelBundle(
        projection=projection, classifier=classifier,
        resize=resize, nlevs=nlevs, pca_energy=pca_energy,
    )

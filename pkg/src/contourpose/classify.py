"""k-NN and minimum-distance classifiers with confusion-matrix evaluation.

Labels are opaque strings drawn from a declared alphabet; the alphabet's
order is the deterministic tie-breaking order everywhere.  Both classifiers
use Euclidean distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ClassifierModel",
    "ConfusionMatrix",
    "knn_fit",
    "knn_predict",
    "mindist_fit",
    "mindist_predict",
    "predict",
    "evaluate",
]


@dataclass(frozen=True)
class ClassifierModel:
    """Either a k-NN reference set or per-class centroids.

    ``vectors`` holds the references (k-NN) or one centroid per alphabet
    label in alphabet order (mindist).  ``label_indices`` indexes each k-NN
    reference into the alphabet; it is unused by mindist.
    """

    kind: str                    # "knn" | "mindist"
    alphabet: tuple[str, ...]
    vectors: np.ndarray          # (n, dim) or (C, dim)
    label_indices: np.ndarray    # (n,) int for knn, empty for mindist
    k: int = 0

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def _prepare(X, labels, alphabet):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError(f"X must be a nonempty n x dim matrix, got {X.shape}")
    labels = [str(v) for v in labels]
    if len(labels) != X.shape[0]:
        raise ValueError("labels length does not match the number of vectors")
    if alphabet is None:
        alphabet = tuple(sorted(set(labels)))
    else:
        alphabet = tuple(alphabet)
    lookup = {label: i for i, label in enumerate(alphabet)}
    if len(lookup) != len(alphabet):
        raise ValueError("alphabet contains duplicate labels")
    try:
        indices = np.array([lookup[v] for v in labels], dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"label {exc.args[0]!r} not in alphabet {alphabet}") from None
    return X, indices, alphabet


def knn_fit(X, labels, k: int, alphabet=None) -> ClassifierModel:
    """Store the references verbatim (lazy learner)."""
    X, indices, alphabet = _prepare(X, labels, alphabet)
    if not 1 <= k <= X.shape[0]:
        raise ValueError(f"k must be in [1, {X.shape[0]}], got {k}")
    return ClassifierModel(
        kind="knn", alphabet=alphabet, vectors=X.copy(),
        label_indices=indices, k=int(k),
    )


def mindist_fit(X, labels, alphabet=None) -> ClassifierModel:
    """Per-class arithmetic-mean centroids; every alphabet class must appear."""
    X, indices, alphabet = _prepare(X, labels, alphabet)
    centroids = np.empty((len(alphabet), X.shape[1]))
    for i, label in enumerate(alphabet):
        members = X[indices == i]
        if members.shape[0] == 0:
            raise ValueError(f"class {label!r} has no training vectors")
        centroids[i] = members.mean(axis=0)
    return ClassifierModel(
        kind="mindist", alphabet=alphabet, vectors=centroids,
        label_indices=np.empty(0, dtype=np.int64),
    )


def _check_query(model: ClassifierModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dim,):
        raise ValueError(
            f"query shape {x.shape} does not match model dimension ({model.dim},)"
        )
    return x


def knn_predict(model: ClassifierModel, x) -> str:
    """Majority vote among the k nearest references.

    Vote ties go to the tied label whose nearest selected member is closest;
    remaining ties break by alphabet order.  Equidistant references at the
    k-th position are admitted in reference order (stable).
    """
    if model.kind != "knn":
        raise ValueError(f"expected a knn model, got {model.kind!r}")
    x = _check_query(model, x)
    dists = np.linalg.norm(model.vectors - x, axis=1)
    nearest = np.argsort(dists, kind="stable")[: model.k]
    votes = np.zeros(len(model.alphabet), dtype=np.int64)
    best_dist = np.full(len(model.alphabet), np.inf)
    for ref in nearest:
        lab = model.label_indices[ref]
        votes[lab] += 1
        best_dist[lab] = min(best_dist[lab], dists[ref])
    top = votes.max()
    tied = np.flatnonzero(votes == top)
    winner = tied[np.argmin(best_dist[tied])]  # argmin takes the first == alphabet order
    return model.alphabet[winner]


def mindist_predict(model: ClassifierModel, x) -> str:
    """Label of the nearest centroid; ties break by alphabet order."""
    if model.kind != "mindist":
        raise ValueError(f"expected a mindist model, got {model.kind!r}")
    x = _check_query(model, x)
    dists = np.linalg.norm(model.vectors - x, axis=1)
    return model.alphabet[int(np.argmin(dists))]


def predict(model: ClassifierModel, x) -> str:
    if model.kind == "knn":
        return knn_predict(model, x)
    return mindist_predict(model, x)


@dataclass(frozen=True)
class ConfusionMatrix:
    """C x C count table: rows are target classes, columns predicted classes."""

    alphabet: tuple[str, ...]
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts)) / self.total

    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def to_text(self) -> str:
        """Aligned table with an accuracy line, 4 decimal places."""
        width = max(5, max(len(v) for v in self.alphabet),
                    len(str(int(self.counts.max(initial=0)))))
        head = " " * (width + 1) + " ".join(f"{v:>{width}}" for v in self.alphabet)
        lines = [head]
        for i, label in enumerate(self.alphabet):
            row = " ".join(f"{int(v):>{width}}" for v in self.counts[i])
            lines.append(f"{label:>{width}} {row}")
        lines.append(f"accuracy: {self.accuracy:.4f}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["target," + ",".join(self.alphabet)]
        for i, label in enumerate(self.alphabet):
            lines.append(label + "," + ",".join(str(int(v)) for v in self.counts[i]))
        return "\n".join(lines) + "\n"


def evaluate(model: ClassifierModel, X_test, labels_test) -> ConfusionMatrix:
    """Predict every test item and tally counts[target][predicted]."""
    X_test = np.asarray(X_test, dtype=np.float64)
    labels_test = [str(v) for v in labels_test]
    if X_test.ndim != 2 or X_test.shape[0] != len(labels_test):
        raise ValueError("test matrix and labels are inconsistent")
    lookup = {label: i for i, label in enumerate(model.alphabet)}
    counts = np.zeros((len(model.alphabet), len(model.alphabet)), dtype=np.int64)
    for x, label in zip(X_test, labels_test):
        if label not in lookup:
            raise ValueError(f"unknown test label {label!r}")
        counts[lookup[label], lookup[predict(model, x)]] += 1
    return ConfusionMatrix(alphabet=model.alphabet, counts=counts)

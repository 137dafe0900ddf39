"""Feature-space diagnostics: principal-component intrinsic dimension,
inter/intra-class cosine distances, and their uniformity ratio."""

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .errors import InputError

_EPS = 1e-12


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray  # descending
    cumulative: np.ndarray  # P(k), k = 1..N
    pc_id: int


@dataclass(frozen=True)
class ClassGeometryReport:
    pi_inter: float
    pi_intra: float
    fsu_ratio: Optional[float]  # None when pi_inter is degenerate (0)
    degenerate: bool = False


def pc_id(features: np.ndarray, threshold: float = 0.9, normalize: bool = True) -> SpectrumReport:
    """Spectrum of the (normalized) feature covariance and its 90% knee.

    Features are centered and, by default, row-normalized to unit norm
    before the covariance. pc_id is the smallest k whose cumulative
    normalized eigenvalue mass reaches the threshold.
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise InputError("pc_id needs an (n, d) matrix with n >= 2")
    X = X - X.mean(axis=0)
    norms = np.linalg.norm(X, axis=1)
    if np.all(norms < _EPS):
        raise InputError("degenerate spectrum: all feature rows identical")
    if normalize:
        keep = norms >= _EPS
        X = X[keep] / norms[keep, None]
        if X.shape[0] < 2:
            raise InputError("degenerate spectrum: fewer than 2 distinct rows")
    # eigenvalues of X^T X / (n-1) via singular values, cheaper when d >> n
    s = np.linalg.svd(X, compute_uv=False)
    eig = (s**2) / (X.shape[0] - 1)
    eig = np.sort(eig)[::-1]
    total = eig.sum()
    if total < _EPS:
        raise InputError("degenerate spectrum: zero total variance")
    cumulative = np.cumsum(eig) / total
    k = int(np.argmax(cumulative >= threshold - 1e-12)) + 1
    return SpectrumReport(eigenvalues=eig, cumulative=cumulative, pc_id=k)


def _cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < _EPS or nb < _EPS:
        raise InputError("cosine distance undefined for a zero-norm vector")
    return float(1.0 - (a @ b) / (na * nb))


def class_geometry(features: np.ndarray, labels: np.ndarray) -> ClassGeometryReport:
    """Average cosine distances between class means (inter) and between
    same-class sample pairs (intra, one global average over all pairs)."""
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    classes = np.unique(y)
    if len(classes) < 2:
        raise InputError("class geometry needs at least 2 classes")
    means = {c: X[y == c].mean(axis=0) for c in classes}

    inter = [
        _cosine_distance(means[a], means[b]) for a, b in combinations(classes, 2)
    ]
    pi_inter = float(np.mean(inter))

    intra_sum = 0.0
    intra_pairs = 0
    for c in classes:
        grp = X[y == c]
        if len(grp) < 2:
            raise InputError(f"class {c} has fewer than 2 samples for intra distance")
        for i, j in combinations(range(len(grp)), 2):
            intra_sum += _cosine_distance(grp[i], grp[j])
            intra_pairs += 1
    pi_intra = intra_sum / intra_pairs

    if pi_inter < _EPS:
        return ClassGeometryReport(pi_inter, pi_intra, None, degenerate=True)
    return ClassGeometryReport(pi_inter, pi_intra, pi_intra / pi_inter)

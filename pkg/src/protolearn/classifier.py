"""Prototype classifier math: distances, distance softmax, losses,
analytic gradients with stop-grad masking, and nearest-prototype inference.

All functions are pure; PrototypeSet is immutable. The first
``frozen_count`` prototype rows take part in every forward computation but
receive exactly zero gradient.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, LabelError, StateError


@dataclass(frozen=True)
class PrototypeSet:
    protos: np.ndarray  # (m, d)
    class_ids: tuple
    frozen_count: int = 0

    def __post_init__(self):
        protos = np.asarray(self.protos, dtype=np.float64)
        if protos.ndim != 2:
            raise ConfigurationError("protos must be a (m, d) matrix")
        if not np.all(np.isfinite(protos)):
            raise ConfigurationError("prototypes must be finite")
        object.__setattr__(self, "protos", protos)
        object.__setattr__(self, "class_ids", tuple(self.class_ids))
        if len(self.class_ids) != protos.shape[0]:
            raise ConfigurationError("class_ids length must match prototype rows")
        if len(set(self.class_ids)) != len(self.class_ids):
            raise ConfigurationError("class_ids must be distinct")
        if not 0 <= self.frozen_count <= protos.shape[0]:
            raise ConfigurationError("frozen_count out of range")

    def __len__(self) -> int:
        return self.protos.shape[0]

    def row_of(self, class_id) -> int:
        try:
            return self.class_ids.index(class_id)
        except ValueError:
            raise LabelError(f"class {class_id} not in prototype set") from None


def empty_prototype_set(dim: int) -> PrototypeSet:
    return PrototypeSet(np.empty((0, dim)), (), 0)


@dataclass(frozen=True)
class ClassifierConfig:
    gamma: float = 1.0
    lambda_pl: float = 0.01

    def __post_init__(self):
        if self.gamma <= 0:
            raise ConfigurationError("gamma must be positive")
        if self.lambda_pl < 0:
            raise ConfigurationError("lambda_pl must be nonnegative")


def squared_distance(z, protoset: PrototypeSet, i: int) -> float:
    """||z - protos[i]||^2."""
    diff = np.asarray(z, dtype=np.float64) - protoset.protos[i]
    return float(diff @ diff)


def all_squared_distances(Z, protoset: PrototypeSet) -> np.ndarray:
    """Squared distances of one vector (m,) or a batch (n, m)."""
    Z = np.asarray(Z, dtype=np.float64)
    single = Z.ndim == 1
    Z2 = Z[None, :] if single else Z
    diff = Z2[:, None, :] - protoset.protos[None, :, :]
    D = (diff**2).sum(-1)
    return D[0] if single else D


def _log_probabilities(D: np.ndarray, gamma: float) -> np.ndarray:
    logits = -gamma * D
    shift = logits - logits.max(axis=-1, keepdims=True)
    return shift - np.log(np.exp(shift).sum(axis=-1, keepdims=True))


def class_probabilities(z, protoset: PrototypeSet, gamma: float) -> np.ndarray:
    """Distance softmax p_i = exp(-gamma d_i) / sum_k exp(-gamma d_k)."""
    if len(protoset) == 0:
        raise StateError("probabilities undefined for an empty prototype set")
    if gamma <= 0:
        raise ConfigurationError("gamma must be positive")
    return np.exp(_log_probabilities(all_squared_distances(z, protoset), gamma))


def ce_loss(z, y, protoset: PrototypeSet, gamma: float) -> float:
    """-log p_y, evaluated in log space."""
    row = protoset.row_of(y)
    logp = _log_probabilities(all_squared_distances(z, protoset), gamma)
    return float(-logp[row])


def pl_loss(z, y, protoset: PrototypeSet) -> float:
    """Regularization pulling z toward its class prototype: ||z - protos[y]||^2."""
    return squared_distance(z, protoset, protoset.row_of(y))


def _rows_of(protoset: PrototypeSet, y: np.ndarray) -> np.ndarray:
    lookup = {c: i for i, c in enumerate(protoset.class_ids)}
    try:
        return np.array([lookup[int(c)] for c in y], dtype=np.intp)
    except KeyError as e:
        raise LabelError(f"class {e.args[0]} not in prototype set") from None


def ipc_loss(Z, y, protoset: PrototypeSet, config: ClassifierConfig) -> float:
    """Mean over the batch of CE + lambda * PL."""
    Z = np.asarray(Z, dtype=np.float64)
    y = np.asarray(y)
    if Z.ndim != 2 or Z.shape[0] == 0:
        raise ConfigurationError("ipc_loss needs a nonempty (n, d) batch")
    rows = _rows_of(protoset, y)
    D = all_squared_distances(Z, protoset)
    logp = _log_probabilities(D, config.gamma)
    ce = -logp[np.arange(len(rows)), rows]
    pl = D[np.arange(len(rows)), rows]
    return float((ce + config.lambda_pl * pl).mean())


def ipc_gradient(Z, y, protoset: PrototypeSet, config: ClassifierConfig) -> np.ndarray:
    """Analytic gradient of ipc_loss w.r.t. the prototype matrix.

    Per sample, row i of the CE contribution is (p_i - [i==y]) * 2 gamma *
    (z - protos[i]); the PL term adds lambda * 2 (protos[y] - z) to row y.
    Frozen rows are zeroed exactly.
    """
    Z = np.asarray(Z, dtype=np.float64)
    y = np.asarray(y)
    if Z.ndim != 2 or Z.shape[0] == 0:
        raise ConfigurationError("ipc_gradient needs a nonempty (n, d) batch")
    n = Z.shape[0]
    rows = _rows_of(protoset, y)
    D = all_squared_distances(Z, protoset)
    P = np.exp(_log_probabilities(D, config.gamma))  # (n, m)
    A = P.copy()
    A[np.arange(n), rows] -= 1.0
    # sum_n A[n,i] * 2 gamma * (Z[n] - protos[i])
    grad = 2.0 * config.gamma * (A.T @ Z - A.sum(axis=0)[:, None] * protoset.protos)
    if config.lambda_pl > 0:
        pl = np.zeros_like(protoset.protos)
        np.add.at(pl, rows, 2.0 * (protoset.protos[rows] - Z))
        grad += config.lambda_pl * pl
    grad /= n
    grad[: protoset.frozen_count] = 0.0
    return grad


def predict(Z, protoset: PrototypeSet):
    """Class of the nearest prototype; ties break to the lowest row index."""
    if len(protoset) == 0:
        raise StateError("cannot predict with an empty prototype set")
    D = all_squared_distances(Z, protoset)
    ids = np.array(protoset.class_ids)
    if D.ndim == 1:
        return ids[int(np.argmin(D))]
    return ids[np.argmin(D, axis=1)]

"""Isolation Kernel with hypersphere partitionings.

Each of the ``t`` partitionings holds ``psi`` centers drawn without
replacement from the pooled node vectors. Center ``i`` isolates the ball
whose radius is the distance to its nearest other center. A point maps to
the nearest covering center in each partitioning, or to nothing.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


def _sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, shape (len(x), len(centers))."""
    diff = x[:, None, :] - centers[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


@dataclass(frozen=True, eq=False)
class IkModel:
    centers: np.ndarray  # (t, psi, m)
    sq_radii: np.ndarray  # (t, psi)
    seed: int

    @property
    def t(self) -> int:
        return self.centers.shape[0]

    @property
    def psi(self) -> int:
        return self.centers.shape[1]

    @property
    def attr_dim(self) -> int:
        return self.centers.shape[2]

    @property
    def radii(self) -> np.ndarray:
        return np.sqrt(self.sq_radii)

    @property
    def dim(self) -> int:
        return self.t * self.psi

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "psi": self.psi,
            "attr_dim": self.attr_dim,
            "seed": self.seed,
            "centers": self.centers.tolist(),
            "sq_radii": self.sq_radii.tolist(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "IkModel":
        centers = np.asarray(d["centers"], dtype=np.float64).reshape(d["t"], d["psi"], d["attr_dim"])
        return cls(centers, np.asarray(d["sq_radii"], dtype=np.float64), int(d["seed"]))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "IkModel":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def fit_ik(node_vectors, psi: int, t: int, seed: int) -> IkModel:
    X = np.asarray(node_vectors, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if psi < 2:
        raise ValueError(f"psi must be >= 2, got {psi}")
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if X.shape[0] < psi:
        raise ValueError(f"need at least psi={psi} node vectors, got {X.shape[0]}")
    rng = np.random.default_rng(seed)
    centers = np.empty((t, psi, X.shape[1]))
    sq_radii = np.empty((t, psi))
    for i in range(t):
        c = X[rng.choice(X.shape[0], size=psi, replace=False)]
        d = _sq_dists(c, c)
        np.fill_diagonal(d, np.inf)
        centers[i] = c
        sq_radii[i] = d.min(axis=1)
    centers.setflags(write=False)
    sq_radii.setflags(write=False)
    return IkModel(centers, sq_radii, int(seed))


def ik_assign(model: IkModel, X) -> np.ndarray:
    """Cell index per partitioning for each row of X; -1 where no ball covers it.

    Returns an (n, t) int array: the sparse form of the feature map.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != model.attr_dim:
        raise ValueError(f"dimension mismatch: got {X.shape[1]}, model has {model.attr_dim}")
    out = np.empty((X.shape[0], model.t), dtype=np.int64)
    for i in range(model.t):
        d = _sq_dists(X, model.centers[i])
        d[d > model.sq_radii[i]] = np.inf
        # argmin returns the first minimum, i.e. the lowest center index on ties
        j = np.argmin(d, axis=1)
        covered = np.isfinite(d[np.arange(X.shape[0]), j])
        out[:, i] = np.where(covered, j, -1)
    return out


def assignments_to_dense(assign: np.ndarray, psi: int) -> np.ndarray:
    n, t = assign.shape
    dense = np.zeros((n, t * psi))
    rows, blocks = np.nonzero(assign >= 0)
    dense[rows, blocks * psi + assign[rows, blocks]] = 1.0
    return dense


def ik_map(model: IkModel, x) -> np.ndarray:
    """Binary feature vector(s) of length t*psi with at most one 1 per block."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    dense = assignments_to_dense(ik_assign(model, x), model.psi)
    return dense[0] if single else dense


def ik_kernel(model: IkModel, x, y) -> float:
    a = ik_assign(model, np.asarray(x, dtype=np.float64).reshape(1, -1))[0]
    b = ik_assign(model, np.asarray(y, dtype=np.float64).reshape(1, -1))[0]
    return float(np.count_nonzero((a == b) & (a >= 0))) / model.t

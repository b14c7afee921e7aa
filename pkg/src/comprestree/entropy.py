"""Entropy models: every H(X_i), H(X_i|X_j), H(X_i|X_A) the algorithms consume.

Four variants:

* uniform  -- H(X_i) = h, H(X_i|X_j) = eps for every pair.
* rainfall -- H(X_i) = h, H(X_i|X_j) = (1 - c/(c + dist(i,j))) * h with dist
  the Euclidean distance between the sensor positions; c controls correlation
  (small c ~ independence, large c ~ perfect correlation).
* gaussian -- differential entropies of a multivariate Gaussian, in nats,
  clamped below at a configurable floor so costs stay nonnegative.
* matrix   -- explicitly tabulated H vector and H(X_i|X_j) matrix.

Uniform/rainfall/matrix values are in bits, gaussian in nats; costs are
unit-consistent within a run.  Set-conditionals for the pairwise-only models
use the best single conditioning node (min over the set), which is the
convention that makes the grid NC == DSC reproduction exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .netgraph import Network

LOG_2PI_E = math.log(2.0 * math.pi * math.e)


class EntropyError(ValueError):
    pass


class IndexOutOfRange(EntropyError, KeyError):
    pass


class DegenerateEntropy(EntropyError):
    """beta is undefined: one direction of a conditional pair is 0, the other is not."""


class EntropyModel:
    """Common query interface; subclasses are immutable after construction."""

    kind = "abstract"
    symmetric_conditionals = False

    def ids(self) -> tuple[int, ...]:
        raise NotImplementedError

    def entropy(self, i: int) -> float:
        raise NotImplementedError

    def cond_entropy(self, i: int, j: int) -> float:
        raise NotImplementedError

    def cond_entropy_set(self, i: int, given: Iterable[int]) -> float:
        """H(X_i | X_A); falls back to entropy(i) when A is empty."""
        given = [j for j in given]
        self._check(i)
        if not given:
            return self.entropy(i)
        return min(self.cond_entropy(i, j) for j in given)

    def _check(self, *nodes: int) -> None:
        known = self._id_set
        for n in nodes:
            if n not in known:
                raise IndexOutOfRange(f"node {n} is not covered by this entropy model")

    @property
    def _id_set(self):
        cached = getattr(self, "_id_set_cache", None)
        if cached is None:
            cached = frozenset(self.ids())
            object.__setattr__(self, "_id_set_cache", cached)
        return cached


class UniformModel(EntropyModel):
    kind = "uniform"
    symmetric_conditionals = True

    def __init__(self, ids: Sequence[int], h: float = 1.0, eps: float = 0.0):
        if h < 0 or eps < 0:
            raise EntropyError("h and eps must be >= 0")
        if eps > h:
            raise EntropyError("eps cannot exceed h (conditioning never hurts)")
        self._ids = tuple(sorted(ids))
        self.h = float(h)
        self.eps = float(eps)

    def ids(self):
        return self._ids

    def entropy(self, i):
        self._check(i)
        return self.h

    def cond_entropy(self, i, j):
        self._check(i, j)
        if i == j:
            raise EntropyError("cond_entropy needs distinct nodes")
        return self.eps


class RainfallModel(EntropyModel):
    """Distance-driven conditional entropies fitted to precipitation data."""

    kind = "rainfall"
    symmetric_conditionals = True

    def __init__(self, positions: Mapping[int, tuple[float, float]], h: float = 1.0, c: float = 100.0):
        if h < 0 or c <= 0:
            raise EntropyError("need h >= 0 and c > 0")
        self._pos = {int(k): (float(v[0]), float(v[1])) for k, v in positions.items()}
        self._ids = tuple(sorted(self._pos))
        self.h = float(h)
        self.c = float(c)

    @classmethod
    def for_network(cls, net: Network, h: float = 1.0, c: float = 100.0) -> "RainfallModel":
        return cls({i: net.position(i) for i in net.sensors}, h=h, c=c)

    def ids(self):
        return self._ids

    def dist(self, i, j):
        (x1, y1), (x2, y2) = self._pos[i], self._pos[j]
        return math.hypot(x1 - x2, y1 - y2)

    def entropy(self, i):
        self._check(i)
        return self.h

    def cond_entropy(self, i, j):
        self._check(i, j)
        if i == j:
            raise EntropyError("cond_entropy needs distinct nodes")
        d = self.dist(i, j)
        return (1.0 - self.c / (self.c + d)) * self.h


class GaussianModel(EntropyModel):
    """Differential entropies of a multivariate Gaussian (nats).

    Values are clamped below at ``floor`` (default 1e-9): differential
    entropies can be negative but the cost algebra expects nonnegative rates.
    """

    kind = "gaussian"
    symmetric_conditionals = False

    def __init__(self, ids: Sequence[int], cov: np.ndarray, floor: float = 1e-9):
        cov = np.asarray(cov, dtype=float)
        ids = tuple(int(i) for i in ids)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] != len(ids):
            raise EntropyError("covariance must be square and match ids")
        if not np.allclose(cov, cov.T, atol=1e-10):
            raise EntropyError("covariance must be symmetric")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise EntropyError("covariance must be positive definite") from exc
        if floor < 0:
            raise EntropyError("floor must be >= 0")
        self._ids = tuple(sorted(ids))
        self._row = {i: ids.index(i) for i in ids}
        self.cov = cov
        self.floor = float(floor)

    @classmethod
    def rbf_for_network(cls, net: Network, length_scale: float = 30.0, variance: float = 1.0,
                        floor: float = 1e-9, jitter: float = 1e-6) -> "GaussianModel":
        """Synthetic spatial covariance: RBF kernel over sensor positions."""
        ids = list(net.sensors)
        pts = np.array([net.position(i) for i in ids], dtype=float)
        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        cov = variance * np.exp(-d2 / (2.0 * length_scale ** 2))
        cov[np.diag_indices_from(cov)] += jitter
        return cls(ids, cov, floor=floor)

    def ids(self):
        return self._ids

    def _clamp(self, value: float) -> float:
        return max(value, self.floor)

    def entropy(self, i):
        self._check(i)
        var = self.cov[self._row[i], self._row[i]]
        return self._clamp(0.5 * (LOG_2PI_E + math.log(var)))

    def cond_entropy(self, i, j):
        self._check(i, j)
        if i == j:
            raise EntropyError("cond_entropy needs distinct nodes")
        ri, rj = self._row[i], self._row[j]
        var = self.cov[ri, ri] - self.cov[ri, rj] ** 2 / self.cov[rj, rj]
        var = max(var, 1e-300)
        return self._clamp(0.5 * (LOG_2PI_E + math.log(var)))

    def cond_entropy_set(self, i, given):
        given = sorted(set(given))
        self._check(i, *given)
        if i in given:
            raise EntropyError("cond_entropy_set needs i outside the conditioning set")
        if not given:
            return self.entropy(i)
        ri = self._row[i]
        rows = [self._row[j] for j in given]
        saa = self.cov[np.ix_(rows, rows)]
        sia = self.cov[ri, rows]
        var = self.cov[ri, ri] - float(sia @ np.linalg.solve(saa, sia))
        var = max(var, 1e-300)
        return self._clamp(0.5 * (LOG_2PI_E + math.log(var)))


class MatrixModel(EntropyModel):
    """Explicit H vector and pairwise conditional matrix (diagonal ignored)."""

    kind = "matrix"

    def __init__(self, ids: Sequence[int], H: Sequence[float], Hcond: Sequence[Sequence[float]]):
        ids = tuple(int(i) for i in ids)
        H = [float(x) for x in H]
        M = np.asarray(Hcond, dtype=float)
        if len(H) != len(ids) or M.shape != (len(ids), len(ids)):
            raise EntropyError("H and Hcond must match ids")
        if any(x < 0 for x in H) or (M < 0).any():
            raise EntropyError("entropies must be >= 0")
        for a in range(len(ids)):
            for b in range(len(ids)):
                if a != b and M[a, b] > H[a] + 1e-9:
                    raise EntropyError(
                        f"H(X{ids[a]}|X{ids[b]}) = {M[a, b]} exceeds H(X{ids[a]}) = {H[a]}")
        order = sorted(range(len(ids)), key=lambda k: ids[k])
        self._ids = tuple(ids[k] for k in order)
        self._H = {ids[k]: H[k] for k in range(len(ids))}
        self._M = {(ids[a], ids[b]): float(M[a, b]) for a in range(len(ids)) for b in range(len(ids)) if a != b}
        self.symmetric_conditionals = all(
            abs(self._M[(a, b)] - self._M[(b, a)]) <= 1e-12 for (a, b) in self._M if a < b)

    def ids(self):
        return self._ids

    def entropy(self, i):
        self._check(i)
        return self._H[i]

    def cond_entropy(self, i, j):
        self._check(i, j)
        if i == j:
            raise EntropyError("cond_entropy needs distinct nodes")
        return self._M[(i, j)]


# convenience aliases matching the operation names
def entropy(model: EntropyModel, i: int) -> float:
    return model.entropy(i)


def cond_entropy(model: EntropyModel, i: int, j: int) -> float:
    return model.cond_entropy(i, j)


def cond_entropy_set(model: EntropyModel, i: int, given) -> float:
    return model.cond_entropy_set(i, given)


@dataclass(frozen=True)
class Beta:
    """Bounded conditional-entropy ratio: max over admissible pairs of
    max(H(i|j)/H(j|i), H(j|i)/H(i|j)), and the pair realizing it."""

    value: float
    pair: tuple[int, int]


def beta(model: EntropyModel, net: Network, space: str = "SG") -> Beta:
    """beta over adjacent sensor pairs (SG) or all sensor pairs (NS)."""
    if space not in ("SG", "NS"):
        raise ValueError("space must be 'SG' or 'NS'")
    sensors = [i for i in net.sensors]
    pairs = []
    if space == "SG":
        for u in sensors:
            for v in net.adj[u]:
                if v != net.bs and u < v:
                    pairs.append((u, v))
    else:
        pairs = [(u, v) for k, u in enumerate(sensors) for v in sensors[k + 1:]]
    best = 1.0
    best_pair = (net.bs, net.bs) if not pairs else pairs[0]
    for u, v in pairs:
        a = model.cond_entropy(u, v)
        b = model.cond_entropy(v, u)
        if a == 0.0 and b == 0.0:
            ratio = 1.0
        elif a == 0.0 or b == 0.0:
            raise DegenerateEntropy(
                f"H(X{u}|X{v})={a}, H(X{v}|X{u})={b}: ratio undefined; clamp via the model floor")
        else:
            ratio = max(a / b, b / a)
        if ratio > best:
            best = ratio
            best_pair = (u, v)
    return Beta(best, best_pair)


# --- JSON interface ----------------------------------------------------------
# {"model":"rainfall","h":1.0,"c":100.0} | {"model":"uniform","h":1.0,"eps":0.1}
# | {"model":"gaussian","cov":[[...]],"floor":1e-9} | {"model":"matrix","H":[...],"Hcond":[[...]]}
# gaussian/matrix rows follow the network's sensors in ascending id order.

def model_from_json(data: Mapping, net: Network) -> EntropyModel:
    kind = data.get("model")
    known = {
        "uniform": {"model", "h", "eps"},
        "rainfall": {"model", "h", "c"},
        "gaussian": {"model", "cov", "floor"},
        "matrix": {"model", "H", "Hcond"},
    }
    if kind not in known:
        raise EntropyError(f"unknown entropy model {kind!r}")
    extra = set(data) - known[kind]
    if extra:
        raise EntropyError(f"unknown fields in entropy JSON: {sorted(extra)}")
    ids = list(net.sensors)
    if kind == "uniform":
        return UniformModel(ids, h=float(data.get("h", 1.0)), eps=float(data.get("eps", 0.0)))
    if kind == "rainfall":
        return RainfallModel.for_network(net, h=float(data.get("h", 1.0)), c=float(data.get("c", 100.0)))
    if kind == "gaussian":
        return GaussianModel(ids, np.asarray(data["cov"], dtype=float), floor=float(data.get("floor", 1e-9)))
    return MatrixModel(ids, data["H"], data["Hcond"])


def model_to_json(model: EntropyModel) -> dict:
    if isinstance(model, UniformModel):
        return {"model": "uniform", "h": model.h, "eps": model.eps}
    if isinstance(model, RainfallModel):
        return {"model": "rainfall", "h": model.h, "c": model.c}
    if isinstance(model, GaussianModel):
        return {"model": "gaussian", "cov": model.cov.tolist(), "floor": model.floor}
    if isinstance(model, MatrixModel):
        ids = model.ids()
        return {"model": "matrix", "H": [model.entropy(i) for i in ids],
                "Hcond": [[0.0 if a == b else model.cond_entropy(a, b) for b in ids] for a in ids]}
    raise EntropyError(f"cannot serialize {type(model).__name__}")

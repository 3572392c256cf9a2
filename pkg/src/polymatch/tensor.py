"""Hyper-edge sampling and sparse super-symmetric affinity tensors.

A hyper-edge is an ordered tuple of ``order`` candidate correspondences
``(i, i')`` with distinct ``i`` and distinct ``i'``.  The first slots carry
the correspondences shared by the two overlapping minimal sets; the
pairings are

=========  ===================  ===================
problem    first set ``S``      second set ``S'``
=========  ===================  ===================
P3P, 3P1   slots (0, 1, 2)      slots (0, 1, 3)
up2p       slots (0, 1)         slots (0, 2)
=========  ===================  ===================

Correspondence ``(i, i')`` lives at flat index ``i + N * i'`` (column-major
``vec`` of the ``N x N'`` assignment matrix).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientPoints
from .geometry import (
    MinimalProblemKind,
    p3p_coefficients,
    three_plus_one_coefficients,
    up2p_coefficients,
)
from .polynomials import BACKENDS, sylvester_batch

#: Per-problem spread of the affinity kernel ``exp(-r / rho)``, tuned on
#: noise-free data.  Exact quartic edges sit at the double-precision floor
#: (~1e-16) while wrong ones often land below 1e-12, so the quartic problems
#: need a kernel that narrow.  Exact up2p edges reach ~1e-10 and wrong ones
#: stay above ~1e-3.  Noisy runs want a wider kernel (``rho`` argument).
DEFAULT_RHO = {
    MinimalProblemKind.P3P: 1e-15,
    MinimalProblemKind.ThreePlusOne: 1e-15,
    MinimalProblemKind.Up2p: 1e-8,
}

PAIRINGS = {
    MinimalProblemKind.P3P: ((0, 1, 2), (0, 1, 3)),
    MinimalProblemKind.ThreePlusOne: ((0, 1, 2), (0, 1, 3)),
    MinimalProblemKind.Up2p: ((0, 1), (0, 2)),
}


def default_rho(kind) -> float:
    return DEFAULT_RHO[MinimalProblemKind.parse(kind)]


def sample_hyperedges(n_rows: int, n_cols: int, order: int, count: int, seed=None) -> np.ndarray:
    """Draw ``count`` hyper-edges uniformly, with replacement.

    Returns an int array of shape ``(count, order, 2)`` holding
    ``(row, col)`` pairs; rows within a tuple are distinct, as are columns.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if n_rows < order or n_cols < order:
        raise InsufficientPoints(f"need at least {order} points on each side, got {n_rows} x {n_cols}")
    rng = np.random.default_rng(seed)
    rows = np.argsort(rng.random((count, n_rows)), axis=1)[:, :order]
    cols = np.argsort(rng.random((count, n_cols)), axis=1)[:, :order]
    return np.stack([rows, cols], axis=-1)


def flat_indices(edges: np.ndarray, n_rows: int) -> np.ndarray:
    edges = np.asarray(edges)
    return edges[..., 0] + n_rows * edges[..., 1]


def edge_polynomials(kind, instance, edges):
    """Coefficients of both minimal-set polynomials for each edge.

    Returns ``(P, Q, degenerate)`` with ``P, Q`` of shape ``(E, degree + 1)``.
    """
    kind = MinimalProblemKind.parse(kind)
    edges = np.asarray(edges).reshape(-1, kind.order, 2)
    rows, cols = edges[..., 0], edges[..., 1]
    K = instance.K
    A = instance.row_data()
    B = instance.col_data()
    polys = []
    for slots in PAIRINGS[kind]:
        ra = [A[rows[:, s]] for s in slots]
        cb = [B[cols[:, s]] for s in slots]
        if kind is MinimalProblemKind.P3P:
            polys.append(p3p_coefficients(*ra, *cb, K))
        elif kind is MinimalProblemKind.ThreePlusOne:
            polys.append(three_plus_one_coefficients(*ra, *cb, K))
        else:
            polys.append(up2p_coefficients(*ra, *cb, K))
    (P, dp), (Q, dq) = polys
    return P, Q, dp | dq


def edge_resultants(kind, instance, edges, backend: str = "qr"):
    """Resultant magnitudes per edge; ``nan`` marks degenerate edges."""
    P, Q, bad = edge_polynomials(kind, instance, edges)
    r = BACKENDS[backend](sylvester_batch(P, Q))
    return np.where(bad, np.nan, r)


def edge_affinities(kind, instance, edges, rho=None, backend: str = "qr") -> np.ndarray:
    """``exp(-r / rho)`` per edge; degenerate edges get 0."""
    rho = default_rho(kind) if rho is None else float(rho)
    if not rho > 0:
        raise ValueError("rho must be positive")
    r = edge_resultants(kind, instance, edges, backend)
    return np.where(np.isnan(r), 0.0, np.exp(-np.nan_to_num(r) / rho))


def edge_affinity(kind, instance, edge, rho=None, backend: str = "qr") -> float:
    return float(edge_affinities(kind, instance, np.asarray(edge)[None], rho, backend)[0])


@dataclass
class SparseAffinityTensor:
    """Super-symmetric tensor over the ``N * N'`` correspondence space.

    Only one canonical (sorted) index tuple is stored per entry; every
    permutation of it carries the same value.
    """

    order: int
    shape: tuple
    indices: np.ndarray
    values: np.ndarray
    _lookup: dict = field(default=None, init=False, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return int(self.shape[0] * self.shape[1])

    def __len__(self):
        return len(self.values)

    @classmethod
    def from_entries(cls, order, shape, flat, values) -> "SparseAffinityTensor":
        """Assemble from raw entries; duplicates (as sets) keep the maximum.

        Entries are kept in order of first appearance so that a tensor built
        from a prefix of the samples is a prefix of the full tensor.
        """
        flat = np.sort(np.asarray(flat, dtype=np.int64).reshape(-1, order), axis=1)
        values = np.asarray(values, dtype=float).reshape(-1)
        if len(flat) == 0:
            return cls(order, tuple(shape), flat, values)
        uniq, first, inverse = np.unique(flat, axis=0, return_index=True, return_inverse=True)
        inverse = inverse.reshape(-1)
        best = np.full(len(uniq), -np.inf)
        np.maximum.at(best, inverse, values)
        keep = np.argsort(first, kind="stable")
        return cls(order, tuple(shape), uniq[keep], best[keep])

    def value(self, flat_tuple) -> float:
        if self._lookup is None:
            self._lookup = {tuple(t): v for t, v in zip(self.indices.tolist(), self.values.tolist())}
        return self._lookup.get(tuple(sorted(int(i) for i in flat_tuple)), 0.0)

    def scaled(self, c: float) -> "SparseAffinityTensor":
        return SparseAffinityTensor(self.order, self.shape, self.indices, self.values * c)

    def entry_set(self) -> set:
        return {tuple(t) for t in self.indices.tolist()}


def assemble(order, shape, edges, values) -> SparseAffinityTensor:
    return SparseAffinityTensor.from_entries(order, shape, flat_indices(edges, shape[0]), values)


def build_tensor(kind, instance, samples, rho=None, backend: str = "qr") -> SparseAffinityTensor:
    """Affinity tensor from sampled hyper-edges of ``instance``."""
    kind = MinimalProblemKind.parse(kind)
    samples = np.asarray(samples)
    if samples.size == 0:
        raise ValueError("no samples")
    w = edge_affinities(kind, instance, samples, rho, backend)
    return assemble(kind.order, instance.shape, samples, w)

"""Tensor power iteration, greedy discretisation and accuracy."""

from __future__ import annotations

from math import factorial

import numpy as np

from .errors import EmptyTensor

MAX_ITERS = 100
TOL = 1e-10
ASCENT_SLACK = 1e-12


def vec(X: np.ndarray) -> np.ndarray:
    return np.asarray(X, dtype=float).ravel(order="F")


def unvec(x: np.ndarray, shape) -> np.ndarray:
    return np.asarray(x).reshape(shape, order="F")


def contract(H, x: np.ndarray) -> np.ndarray:
    """Contract ``H`` with ``x`` on every mode but one.

    Sums over the full super-symmetric expansion, i.e. each stored entry
    contributes ``(d - 1)!`` times to each of its ``d`` indices.
    """
    idx, w = H.indices, H.values
    if len(w) == 0:
        return np.zeros(H.dim)
    xv = x[idx]
    # product of all factors except column k = prefix[k] * suffix[k + 1]
    d = H.order
    prefix = np.ones((len(w), d + 1))
    suffix = np.ones((len(w), d + 1))
    for k in range(d):
        prefix[:, k + 1] = prefix[:, k] * xv[:, k]
        suffix[:, d - k - 1] = suffix[:, d - k] * xv[:, d - k - 1]
    others = prefix[:, :d] * suffix[:, 1:]
    out = np.bincount(idx.ravel(), weights=(w[:, None] * others).ravel(), minlength=H.dim)
    return out * factorial(d - 1)


def score_vec(H, x) -> float:
    if len(H.values) == 0:
        return 0.0
    return float(factorial(H.order) * np.sum(H.values * np.prod(x[H.indices], axis=1)))


def score(H, X) -> float:
    """Matching score: the full tensor contracted with ``vec(X)`` on all modes."""
    return score_vec(H, vec(X))


def _check(H, x0, shape):
    if len(H.values) == 0 or not np.any(H.values > 0):
        raise EmptyTensor("affinity tensor has no positive entry")
    if x0 is None:
        return np.ones(shape)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != tuple(shape):
        raise ValueError(f"initial assignment has shape {x0.shape}, expected {tuple(shape)}")
    if np.any(x0 <= 0):
        raise ValueError("initial assignment must be strictly positive")
    return x0


def random_init(shape, seed=None) -> np.ndarray:
    """Seedable strictly positive starting point."""
    return np.random.default_rng(seed).uniform(0.5, 1.5, size=shape)


def _ascent_step(H, x, g, f0):
    """Normalised ``g + shift * x`` with the smallest tried shift that keeps the score.

    The plain step (``shift = 0``) can overshoot on multilinear forms.  A
    shift of at least the Hessian bound makes the score convex along the step,
    so doubling from ``|g|`` always terminates with a non-decreasing score.
    The fixed points are those of the plain iteration.
    """
    gn = np.linalg.norm(g)
    # relative slack keeps the accept decision independent of the tensor scale
    floor = f0 - ASCENT_SLACK * abs(f0)
    shift = 0.0
    for _ in range(80):
        y = g + shift * x
        y = y / np.linalg.norm(y)
        f = score_vec(H, y)
        if f >= floor:
            return y, f
        shift = gn if shift == 0.0 else 2.0 * shift
    return x, f0


def power_iteration_dense(H, x0=None, max_iters: int = MAX_ITERS, tol: float = TOL, return_trace: bool = False):
    """Power iteration with a global l2 normalisation of ``vec(X)``.

    Steps that would lower the score are damped towards the current iterate
    (see :func:`_ascent_step`), so the score never decreases.  With
    ``return_trace`` the score of every iterate (starting with ``x0``) is
    returned alongside the result.
    """
    shape = H.shape
    x = vec(_check(H, x0, shape))
    x = x / np.linalg.norm(x)
    f = score_vec(H, x)
    trace = [f] if return_trace else None
    for _ in range(max_iters):
        g = contract(H, x)
        if not np.linalg.norm(g) > 0:
            # every weighted tuple touches a zero coordinate: fixed point
            break
        y, f = _ascent_step(H, x, g, f)
        step = np.linalg.norm(y - x)
        x = y
        if return_trace:
            trace.append(f)
        if step < tol:
            break
    X = unvec(x, shape)
    return (X, trace) if return_trace else X


def power_iteration_sparse(H, x0=None, max_iters: int = MAX_ITERS, tol: float = TOL, return_trace: bool = False):
    """Power iteration under unit row sums of ``X``.

    Iterates on ``Y`` with ``X = Y * Y`` and unit l2 rows of ``Y``:
    ``Y <- Y * (H contracted with X)``, then row normalisation.  Rows that
    receive no mass keep their previous values.
    """
    shape = H.shape
    X = _check(H, x0, shape)
    Y = np.sqrt(X / X.sum(axis=1, keepdims=True))
    trace = [score(H, Y * Y)] if return_trace else None
    for _ in range(max_iters):
        X = Y * Y
        G = unvec(contract(H, vec(X)), shape)
        V = Y * G
        norms = np.linalg.norm(V, axis=1, keepdims=True)
        Y_new = np.where(norms > 0, V / np.where(norms > 0, norms, 1.0), Y)
        step = np.linalg.norm(Y_new * Y_new - X)
        Y = Y_new
        if return_trace:
            trace.append(score(H, Y * Y))
        if step < tol:
            break
    X = Y * Y
    return (X, trace) if return_trace else X


SOLVERS = {"dense": power_iteration_dense, "sparse": power_iteration_sparse}


def discretize(X) -> np.ndarray:
    """Greedy hard assignment.

    Repeatedly fixes the largest remaining entry and removes its row and
    column; ties go to the lowest row, then the lowest column.
    """
    X = np.asarray(X, dtype=float)
    n, m = X.shape
    out = np.zeros((n, m), dtype=int)
    row_used = np.zeros(n, dtype=bool)
    col_used = np.zeros(m, dtype=bool)
    picks = 0
    for flat in np.argsort(-X, axis=None, kind="stable"):
        i, j = divmod(int(flat), m)
        if row_used[i] or col_used[j]:
            continue
        out[i, j] = 1
        row_used[i] = col_used[j] = True
        picks += 1
        if picks == min(n, m):
            break
    return out


def assignment(X_hard) -> np.ndarray:
    """Column assigned to each row, ``-1`` for unassigned rows."""
    X_hard = np.asarray(X_hard)
    cols = np.argmax(X_hard, axis=1)
    return np.where(X_hard.max(axis=1) > 0, cols, -1)


def accuracy(X_hard, ground_truth, n_inliers=None) -> float:
    """Fraction of the first ``n_inliers`` rows matched to their true column."""
    gt = np.asarray(ground_truth)
    n = len(gt) if n_inliers is None else int(n_inliers)
    if n == 0:
        return 0.0
    return float(np.mean(assignment(X_hard)[:n] == gt[:n]))


def solve(H, solver: str = "sparse", **kwargs) -> np.ndarray:
    """Run the named solver and return the discretised assignment."""
    return discretize(SOLVERS[solver](H, **kwargs))

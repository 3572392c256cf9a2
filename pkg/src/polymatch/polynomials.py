"""Univariate polynomials, Sylvester matrices and resultant magnitudes.

Coefficients are stored highest degree first, ``(a_n, ..., a_0)``.  The
batch helpers accept stacked coefficient arrays of shape ``(..., n + 1)`` so
that thousands of small Sylvester matrices can be factorised in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegreeTooLow, ZeroPolynomial

#: Resultant magnitudes at or below this value count as "shared root".
ZERO_TOL = 1e-8
#: Normalised leading coefficients below this flag the polynomial degenerate.
DEGENERATE_LEADING = 1e-12


@dataclass(frozen=True)
class Polynomial:
    """Real univariate polynomial with descending coefficients."""

    coeffs: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        if c.size == 0:
            raise ValueError("a polynomial needs at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return evaluate(self, x)

    def __len__(self):
        return self.coeffs.size


def _coeffs(p) -> np.ndarray:
    if isinstance(p, Polynomial):
        return p.coeffs
    return np.asarray(p, dtype=float)


def normalize(p) -> Polynomial:
    """Scale ``p`` to unit Euclidean coefficient norm.

    The result is flagged degenerate when its leading coefficient is below
    ``DEGENERATE_LEADING``; the degree is never deflated.
    """
    c = _coeffs(p)
    norm = np.linalg.norm(c)
    if not norm > 0.0:
        raise ZeroPolynomial("cannot normalise the zero polynomial")
    c = c / norm
    return Polynomial(c, degenerate=bool(abs(c[0]) < DEGENERATE_LEADING))


def evaluate(p, x):
    """Horner evaluation; ``x`` may be a scalar or an array."""
    c = _coeffs(p)
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x) + c[0]
    for a in c[1:]:
        acc = acc * x + a
    return acc if acc.ndim else float(acc)


def pad_to_degree(p, n: int) -> np.ndarray:
    c = _coeffs(p)
    if c.size > n + 1:
        raise ValueError(f"polynomial of degree {c.size - 1} exceeds {n}")
    return np.concatenate([np.zeros(n + 1 - c.size), c])


def sylvester(p, q) -> np.ndarray:
    """Sylvester matrix of two polynomials of common degree ``n``.

    The lower-degree input is padded with leading zeros.  Rows ``0..n-1``
    hold the coefficients of ``p`` shifted right by the row index, rows
    ``n..2n-1`` those of ``q``.
    """
    cp, cq = _coeffs(p), _coeffs(q)
    n = max(cp.size, cq.size) - 1
    if n < 1:
        raise DegreeTooLow("Sylvester matrix needs degree >= 1")
    return sylvester_batch(pad_to_degree(cp, n), pad_to_degree(cq, n))


def sylvester_batch(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Stacked Sylvester matrices for coefficient arrays ``(..., n + 1)``."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != Q.shape:
        raise ValueError(f"coefficient shapes differ: {P.shape} vs {Q.shape}")
    n = P.shape[-1] - 1
    if n < 1:
        raise DegreeTooLow("Sylvester matrix needs degree >= 1")
    M = np.zeros(P.shape[:-1] + (2 * n, 2 * n))
    for i in range(n):
        M[..., i, i:i + n + 1] = P
        M[..., n + i, i:i + n + 1] = Q
    return M


def resultant_magnitude_qr(M: np.ndarray):
    """``|R[-1, -1]|`` of the QR factorisation of (a stack of) square matrices."""
    M = np.asarray(M, dtype=float)
    if M.shape[-1] != M.shape[-2]:
        raise ValueError("resultant matrix must be square")
    R = np.linalg.qr(M, mode="r")
    out = np.abs(R[..., -1, -1])
    return out if out.ndim else float(out)


def resultant_magnitude_svd(M: np.ndarray):
    """Smallest singular value of (a stack of) square matrices."""
    M = np.asarray(M, dtype=float)
    if M.shape[-1] != M.shape[-2]:
        raise ValueError("resultant matrix must be square")
    s = np.linalg.svd(M, compute_uv=False)
    out = s[..., -1]
    return out if out.ndim else float(out)


BACKENDS = {"qr": resultant_magnitude_qr, "svd": resultant_magnitude_svd}


def resultant_magnitude(p, q, backend: str = "qr") -> float:
    """Resultant magnitude of the unit-normalised pair ``(p, q)``."""
    try:
        fn = BACKENDS[backend]
    except KeyError:
        raise ValueError(f"unknown resultant backend {backend!r}") from None
    return fn(sylvester(normalize(p), normalize(q)))


def unit_rows(C: np.ndarray):
    """Row-normalise stacked coefficients.

    Returns ``(normalised, degenerate)`` where ``degenerate`` marks zero rows
    and rows whose normalised leading coefficient vanishes.
    """
    C = np.asarray(C, dtype=float)
    norm = np.linalg.norm(C, axis=-1, keepdims=True)
    ok = (norm[..., 0] > 0.0) & np.isfinite(norm[..., 0])
    safe = np.where(norm > 0.0, norm, 1.0)
    out = np.where(ok[..., None], C / safe, 0.0)
    degenerate = ~ok | (np.abs(out[..., 0]) < DEGENERATE_LEADING)
    return out, degenerate

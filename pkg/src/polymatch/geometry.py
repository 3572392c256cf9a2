"""Pinhole cameras and the minimal-problem polynomials.

Each minimal problem reduces a small set of correspondences to a univariate
polynomial in a variable shared between overlapping sets:

* P3P (three 2D-3D correspondences): quartic in the depth ratio ``x = b/a``.
* 3P1 (three 2D-2D correspondences, rotation about the camera y axis):
  quartic in ``x = cos(theta)``.
* up2p (two 2D-3D correspondences, vertical camera): quadratic in
  ``x = tan(theta/2)``.

The ``*_coefficients`` functions are vectorised over leading batch axes and
never raise; they return ``(unit_coeffs, degenerate_mask)``.  The scalar
wrappers return a :class:`~polymatch.polynomials.Polynomial` and raise
:class:`DegenerateConfiguration` instead.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import BehindCamera, DegenerateConfiguration
from .polynomials import Polynomial, unit_rows

IMAGE_WIDTH = 640
IMAGE_HEIGHT = 480
FOCAL = 1000.0

#: World z is "up".  This maps world coordinates into a frame whose y axis
#: points down, i.e. the orientation of a level camera looking along +y.
VERTICAL_ALIGN = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
WORLD_UP = np.array([0.0, 0.0, 1.0])

MIN_DISTANCE = 1e-9
MIN_RAY_ANGLE = 1e-9


class MinimalProblemKind(enum.Enum):
    P3P = "p3p"
    ThreePlusOne = "3p1"
    Up2p = "up2p"

    @property
    def minimal_size(self) -> int:
        return 2 if self is MinimalProblemKind.Up2p else 3

    @property
    def order(self) -> int:
        return self.minimal_size + 1

    @property
    def degree(self) -> int:
        return 2 if self is MinimalProblemKind.Up2p else 4

    @property
    def shared_variable(self) -> str:
        return {"p3p": "b/a", "3p1": "cos(theta)", "up2p": "tan(theta/2)"}[self.value]

    @classmethod
    def parse(cls, value) -> "MinimalProblemKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown problem kind {value!r}") from None


def default_intrinsics(f: float = FOCAL) -> np.ndarray:
    return np.array([[f, 0.0, IMAGE_WIDTH / 2], [0.0, f, IMAGE_HEIGHT / 2], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class Camera:
    """Pinhole camera; ``x_cam = R @ (X - center)``, camera y points down."""

    K: np.ndarray = field(default_factory=default_intrinsics)
    R: np.ndarray = field(default_factory=lambda: np.eye(3))
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        K = np.asarray(self.K, dtype=float)
        R = np.asarray(self.R, dtype=float)
        if K[0, 0] <= 0 or K[1, 1] <= 0:
            raise ValueError("focal lengths must be positive")
        if not np.allclose(R.T @ R, np.eye(3), atol=1e-10):
            raise ValueError("rotation is not orthonormal")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    @classmethod
    def look_at(cls, center, target=(0.0, 0.0, 0.0), up=WORLD_UP, K=None) -> "Camera":
        """Camera at ``center`` whose optical axis passes through ``target``.

        Roll is fixed by keeping the image "up" as close as possible to ``up``.
        """
        center = np.asarray(center, dtype=float)
        fwd = np.asarray(target, dtype=float) - center
        fwd /= np.linalg.norm(fwd)
        right = np.cross(fwd, up)
        if np.linalg.norm(right) < 1e-8:
            # looking straight up or down: any roll is as good as another
            right = np.cross(fwd, [0.0, 1.0, 0.0])
        right /= np.linalg.norm(right)
        down = np.cross(fwd, right)
        R = np.stack([right, down, fwd])
        return cls(K=default_intrinsics() if K is None else K, R=R, center=center)

    def to_camera(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return (X - self.center) @ self.R.T

    def depths(self, X) -> np.ndarray:
        return self.to_camera(X)[..., 2]

    def project(self, X) -> np.ndarray:
        return project(X, self)


def project(X, cam: Camera) -> np.ndarray:
    """Pixel coordinates of world point(s) ``X`` (shape ``(..., 3)``)."""
    Xc = cam.to_camera(X)
    z = Xc[..., 2]
    if np.any(~(z > 0)):
        raise BehindCamera("point has non-positive depth")
    K = cam.K
    u = K[0, 0] * Xc[..., 0] / z + K[0, 1] * Xc[..., 1] / z + K[0, 2]
    v = K[1, 1] * Xc[..., 1] / z + K[1, 2]
    return np.stack([u, v], axis=-1)


def rays(u, K) -> np.ndarray:
    """Unit calibrated rays ``K^-1 [u; 1] / ||.||`` for pixels ``(..., 2)``."""
    u = np.asarray(u, dtype=float)
    h = np.concatenate([u, np.ones(u.shape[:-1] + (1,))], axis=-1)
    r = np.linalg.solve(np.asarray(K, dtype=float), h.reshape(-1, 3).T).T.reshape(h.shape)
    return r / np.linalg.norm(r, axis=-1, keepdims=True)


def rotation_y(theta) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_about_up(theta) -> np.ndarray:
    """World-frame rotation about the vertical (z) axis."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _close_points(A, B):
    return np.linalg.norm(A - B, axis=-1) < MIN_DISTANCE


def _same_rays(a, b):
    # unit rays in front of the camera: the cross-product norm is sin(angle)
    return np.linalg.norm(np.cross(a, b), axis=-1) < MIN_RAY_ANGLE


def _pmul(a, b):
    """Product of ascending coefficient arrays with shared batch axes."""
    a, b = np.broadcast_arrays(a[..., :, None], b[..., None, :])
    n, m = a.shape[-2], b.shape[-1]
    out = np.zeros(a.shape[:-2] + (n + m - 1,))
    prod = a * b
    for i in range(n):
        out[..., i:i + m] += prod[..., i, :]
    return out


def _padd(*terms):
    n = max(t.shape[-1] for t in terms)
    shape = np.broadcast_shapes(*(t.shape[:-1] for t in terms))
    out = np.zeros(shape + (n,))
    for t in terms:
        out[..., :t.shape[-1]] += t
    return out


def _finish(ascending, degenerate):
    coeffs, bad = unit_rows(ascending[..., ::-1])
    bad = bad | degenerate
    return np.where(bad[..., None], 0.0, coeffs), bad


# ---------------------------------------------------------------- P3P

def p3p_coefficients(Xa, Xb, Xc, ua, ub, uc, K):
    """Unit quartic in ``x = b/a`` for the triangle ``(a, b, c)``.

    ``a, b, c`` are the camera-centre distances of ``Xa, Xb, Xc``.  Dividing
    the three cosine-law equations by ``a^2`` leaves two quadratics in
    ``y = c/a`` whose coefficients depend on ``x``; their resultant with
    respect to ``y`` is the quartic.
    """
    Xa, Xb, Xc = (np.asarray(v, dtype=float) for v in (Xa, Xb, Xc))
    ra, rb, rc = rays(ua, K), rays(ub, K), rays(uc, K)
    degenerate = (_close_points(Xa, Xb) | _close_points(Xb, Xc) | _close_points(Xc, Xa)
                  | _same_rays(ra, rb) | _same_rays(rb, rc) | _same_rays(rc, ra))

    Cab = np.sum(ra * rb, axis=-1)
    Cbc = np.sum(rb * rc, axis=-1)
    Cca = np.sum(rc * ra, axis=-1)
    Rab2 = np.sum((Xa - Xb) ** 2, axis=-1)
    Rbc2 = np.sum((Xb - Xc) ** 2, axis=-1)
    Rca2 = np.sum((Xc - Xa) ** 2, axis=-1)
    safe = np.where(degenerate, 1.0, Rab2)
    K1 = Rca2 / safe
    K2 = Rbc2 / safe

    zero = np.zeros_like(Cab)
    one = np.ones_like(Cab)
    # y^2 + B1 y + C1 = 0   and   y^2 + B2 y + C2 = 0, coefficients ascending in x
    B1 = np.stack([-2.0 * Cca], axis=-1)
    C1 = np.stack([1.0 - K1, 2.0 * K1 * Cab, -K1], axis=-1)
    B2 = np.stack([zero, -2.0 * Cbc], axis=-1)
    C2 = np.stack([-K2, 2.0 * K2 * Cab, one - K2], axis=-1)

    dC = _padd(C2, -C1)
    dB = _padd(B2, -B1)
    cross = _padd(_pmul(B1, C2), -_pmul(B2, C1))
    quartic = _padd(_pmul(dC, dC), -_pmul(dB, cross))
    return _finish(quartic, degenerate)


def p3p_quartic(Xa, Xb, Xc, ua, ub, uc, K=None) -> Polynomial:
    coeffs, bad = p3p_coefficients(Xa, Xb, Xc, ua, ub, uc, default_intrinsics() if K is None else K)
    if bad:
        raise DegenerateConfiguration("degenerate P3P triangle")
    return Polynomial(coeffs)


# ---------------------------------------------------------------- 3P1

_FFT_ANGLES = 2.0 * np.pi * np.arange(8) / 8


def three_plus_one_coefficients(q1, q2, q3, p1, p2, p3, K):
    """Unit quartic in ``x = cos(theta)`` for three two-view correspondences.

    Both views are assumed to differ by a rotation ``rotation_y(theta)``
    about the shared camera y axis, ``w ~ R v + t``.  A translation
    satisfying all three epipolar constraints exists iff
    ``det[(R v_i) x w_i] = 0``; that determinant is a trigonometric
    polynomial of degree two, ``P(c) + s Q(c)``, recovered exactly from eight
    samples.  Squaring away ``s`` gives ``P^2 - (1 - c^2) Q^2``.
    """
    v = np.stack([rays(q, K) for q in (q1, q2, q3)], axis=-2)  # (..., 3, 3)
    w = np.stack([rays(p, K) for p in (p1, p2, p3)], axis=-2)
    degenerate = np.zeros(v.shape[:-2], dtype=bool)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        degenerate |= _same_rays(v[..., i, :], v[..., j, :])
        degenerate |= _same_rays(w[..., i, :], w[..., j, :])

    dets = []
    for theta in _FFT_ANGLES:
        Rv = v @ rotation_y(theta).T
        dets.append(np.linalg.det(np.cross(Rv, w)))
    F = np.fft.rfft(np.stack(dets, axis=-1), axis=-1) / 8.0
    a0 = F[..., 0].real
    a1, b1 = 2.0 * F[..., 1].real, -2.0 * F[..., 1].imag
    a2, b2 = 2.0 * F[..., 2].real, -2.0 * F[..., 2].imag

    P = np.stack([a0 - a2, a1, 2.0 * a2], axis=-1)
    Q = np.stack([b1, 2.0 * b2], axis=-1)
    one_minus_c2 = np.broadcast_to(np.array([1.0, 0.0, -1.0]), P.shape)
    quartic = _padd(_pmul(P, P), -_pmul(one_minus_c2, _pmul(Q, Q)))
    return _finish(quartic, degenerate)


def three_plus_one_quartic(q1, q2, q3, q1p, q2p, q3p, K=None) -> Polynomial:
    coeffs, bad = three_plus_one_coefficients(q1, q2, q3, q1p, q2p, q3p,
                                              default_intrinsics() if K is None else K)
    if bad:
        raise DegenerateConfiguration("repeated rays in a 3P1 triple")
    return Polynomial(coeffs)


# ---------------------------------------------------------------- up2p

def up2p_coefficients(X1, X2, u1, u2, K, align=VERTICAL_ALIGN):
    """Unit quadratic in ``x = tan(theta/2)`` for two 2D-3D correspondences.

    The camera rotation is ``rotation_y(theta) @ align``.  Two rows of
    ``[v]_x (R X + t) = 0`` per point give a 4x4 homogeneous system in
    ``(t, 1)`` whose determinant is affine in ``(cos, sin)``.
    """
    X = np.stack([np.asarray(X1, dtype=float), np.asarray(X2, dtype=float)], axis=-2) @ np.asarray(align).T
    v = np.stack([rays(u1, K), rays(u2, K)], axis=-2)
    degenerate = _close_points(X[..., 0, :], X[..., 1, :]) | _same_rays(v[..., 0, :], v[..., 1, :])

    vx, vy, vz = v[..., 0], v[..., 1], v[..., 2]
    zero = np.zeros_like(vx)
    r0 = np.stack([zero, -vz, vy], axis=-1)  # rows of the skew matrix [v]_x
    r1 = np.stack([vz, zero, -vx], axis=-1)
    rows = np.concatenate([r0, r1], axis=-2)  # (..., 4, 3): point0, point1, point0, point1
    Xr = np.concatenate([X, X], axis=-2)
    Xx, Xy, Xz = Xr[..., 0], Xr[..., 1], Xr[..., 2]
    zr = np.zeros_like(Xx)
    parts = {
        "const": np.stack([zr, Xy, zr], axis=-1),
        "cos": np.stack([Xx, zr, Xz], axis=-1),
        "sin": np.stack([Xz, zr, -Xx], axis=-1),
    }
    d = {}
    for name, part in parts.items():
        col = np.sum(rows * part, axis=-1)
        d[name] = np.linalg.det(np.concatenate([rows, col[..., None]], axis=-1))
    gamma, alpha, beta = d["const"], d["cos"], d["sin"]
    quadratic = np.stack([gamma + alpha, 2.0 * beta, gamma - alpha], axis=-1)
    return _finish(quadratic, degenerate)


def up2p_quadratic(X1, X2, u1, u2, K=None, align=VERTICAL_ALIGN) -> Polynomial:
    coeffs, bad = up2p_coefficients(X1, X2, u1, u2, default_intrinsics() if K is None else K, align)
    if bad:
        raise DegenerateConfiguration("degenerate up2p pair")
    return Polynomial(coeffs)


# ------------------------------------------------------- ground truth

def depth_ratio(cam: Camera, Xa, Xb) -> float:
    """True P3P shared variable: ``||Xb - O|| / ||Xa - O||``."""
    return float(np.linalg.norm(np.asarray(Xb) - cam.center) / np.linalg.norm(np.asarray(Xa) - cam.center))


def relative_yaw(cam1: Camera, cam2: Camera) -> float:
    """Angle of ``R2 R1^T`` about the camera y axis."""
    M = cam2.R @ cam1.R.T
    return float(np.arctan2(M[0, 2], M[0, 0]))


def camera_yaw(cam: Camera, align=VERTICAL_ALIGN) -> float:
    """Angle ``theta`` with ``cam.R == rotation_y(theta) @ align``."""
    M = cam.R @ np.asarray(align).T
    return float(np.arctan2(M[0, 2], M[0, 0]))

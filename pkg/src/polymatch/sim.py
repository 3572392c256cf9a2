"""Synthetic instances and the accuracy-versus-samples experiment.

Random streams are derived from one integer seed with
:class:`numpy.random.SeedSequence` spawn keys:

* ``(i, 0)``          geometry of instance ``i``
* ``(i, 1, s, o)``    outliers and noise for cell ``(sigma[s], outliers[o])``
* ``(i, 2, o)``       hyper-edge samples for outlier count ``outliers[o]``

so every instance and cell draws the same numbers regardless of how the
instances are spread over worker processes.  Noise levels share their
hyper-edge samples, which keeps comparisons across sigma paired.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyTensor
from .geometry import (
    IMAGE_HEIGHT,
    IMAGE_WIDTH,
    Camera,
    MinimalProblemKind,
    project,
    rotation_about_up,
)
from .matching import SOLVERS, accuracy, discretize
from .tensor import assemble, default_rho, edge_affinities, sample_hyperedges

CUBE_HALF = 2.0
SPHERE_RADIUS = 12.0
MAX_TRIES = 1000


@dataclass
class ProblemInstance:
    kind: MinimalProblemKind
    points3d: np.ndarray
    observations: list
    cameras: list
    ground_truth: np.ndarray
    n_inliers: int
    n_outliers: int = 0
    motion_labels: Optional[np.ndarray] = None
    second_motion: Optional[tuple] = None  # (rotation, translation) of label-1 points

    @property
    def K(self) -> np.ndarray:
        return self.cameras[0].K

    def row_data(self) -> np.ndarray:
        """Points indexing assignment rows (3D points, or image-1 points for 3P1)."""
        if self.kind is MinimalProblemKind.ThreePlusOne:
            return self.observations[0]
        return self.points3d

    def col_data(self) -> np.ndarray:
        return self.observations[-1]

    @property
    def shape(self) -> tuple:
        return (len(self.row_data()), len(self.col_data()))

    def truth_matrix(self) -> np.ndarray:
        X = np.zeros(self.shape, dtype=int)
        X[np.arange(self.n_inliers), self.ground_truth[:self.n_inliers]] = 1
        return X


@dataclass
class ExperimentConfig:
    kind: MinimalProblemKind = MinimalProblemKind.P3P
    n: int = 10
    sigmas: Sequence[float] = (0.0,)
    outliers: Sequence[int] = (0,)
    baseline: float = 1.0
    motions: int = 1
    instances: int = 100
    samples: Optional[Sequence[int]] = None
    samples_max: Optional[int] = None
    rho: Optional[float] = None
    solver: str = "sparse"
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        self.kind = MinimalProblemKind.parse(self.kind)
        self.sigmas = tuple(float(s) for s in self.sigmas)
        self.outliers = tuple(int(o) for o in self.outliers)
        if self.n < self.kind.order:
            raise ValueError(f"{self.kind.value} needs n >= {self.kind.order}")
        if self.instances < 1 or self.workers < 1:
            raise ValueError("instances and workers must be positive")
        if any(s < 0 for s in self.sigmas) or any(o < 0 for o in self.outliers):
            raise ValueError("noise levels and outlier counts must be non-negative")
        if self.baseline <= 0:
            raise ValueError("baseline must be positive")
        if self.motions not in (1, 2):
            raise ValueError("motions must be 1 or 2")
        if self.solver not in ("sparse", "dense", "both"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.rho is not None and not self.rho > 0:
            raise ValueError("rho must be positive")

    @property
    def solvers(self) -> tuple:
        return ("sparse", "dense") if self.solver == "both" else (self.solver,)

    @property
    def effective_rho(self) -> float:
        return default_rho(self.kind) if self.rho is None else self.rho

    def schedule(self) -> tuple:
        """Sample sizes ``s_i``, strictly increasing."""
        if self.samples is not None:
            s = sorted({int(v) for v in self.samples})
            if not s or s[0] < 1:
                raise ValueError("sample sizes must be positive")
            return tuple(s)
        top = self.samples_max
        if top is None:
            top = 5000 if self.kind is MinimalProblemKind.Up2p else 20000
        lo = min(100, top)
        s = np.unique(np.round(np.logspace(np.log10(lo), np.log10(top), 10)).astype(int))
        return tuple(int(v) for v in s)


@dataclass
class AccuracyCurve:
    problem: str
    solver: str
    sigma: float
    outliers: int
    baseline: float
    motions: int
    instances: int
    seed: int
    rows: list = field(default_factory=list)  # (samples, mean, std)

    @property
    def final_accuracy(self) -> float:
        return self.rows[-1][1]


# ------------------------------------------------------------ generation

def _random_points(n, rng):
    return rng.uniform(-CUBE_HALF, CUBE_HALF, size=(n, 3))


def _in_frame(u) -> bool:
    return bool(np.all((u[:, 0] >= 0) & (u[:, 0] < IMAGE_WIDTH) & (u[:, 1] >= 0) & (u[:, 1] < IMAGE_HEIGHT)))


def _project_in_frame(X, cam):
    try:
        u = project(X, cam)
    except ValueError:
        return None
    return u if _in_frame(u) else None


def _shuffled(u, rng):
    perm = rng.permutation(len(u))
    out = np.empty_like(u)
    out[perm] = u
    return out, perm


def _equator_camera(rng, radius=SPHERE_RADIUS):
    phi = rng.uniform(0.0, 2.0 * np.pi)
    return np.array([np.cos(phi), np.sin(phi), 0.0]) * radius


def gen_p3p_instance(cfg: ExperimentConfig, rng) -> ProblemInstance:
    """Points in the 4x4x4 cube, camera on the radius-12 sphere facing the origin.

    Draws are repeated until every projection lands inside the image.
    """
    for _ in range(MAX_TRIES):
        X = _random_points(cfg.n, rng)
        d = rng.normal(size=3)
        cam = Camera.look_at(SPHERE_RADIUS * d / np.linalg.norm(d))
        u = _project_in_frame(X, cam)
        if u is not None:
            break
    else:
        raise RuntimeError("could not place all points inside the image")
    obs, perm = _shuffled(u, rng)
    return ProblemInstance(MinimalProblemKind.P3P, X, [obs], [cam], perm, cfg.n)


def gen_3p1_instance(cfg: ExperimentConfig, rng) -> ProblemInstance:
    """Two level cameras on the equator, ``cfg.baseline`` apart."""
    for _ in range(MAX_TRIES):
        X = _random_points(cfg.n, rng)
        c1 = _equator_camera(rng)
        psi = rng.uniform(0.0, 2.0 * np.pi)
        c2 = c1 + cfg.baseline * np.array([np.cos(psi), np.sin(psi), 0.0])
        cam1, cam2 = Camera.look_at(c1), Camera.look_at(c2)
        u1 = _project_in_frame(X, cam1)
        u2 = _project_in_frame(X, cam2)
        if u1 is not None and u2 is not None:
            break
    else:
        raise RuntimeError("could not place all points inside both images")
    obs, perm = _shuffled(u2, rng)
    return ProblemInstance(MinimalProblemKind.ThreePlusOne, X, [u1, obs], [cam1, cam2], perm, cfg.n)


def gen_up2p_instance(cfg: ExperimentConfig, rng) -> ProblemInstance:
    """Level camera on the equator; optionally a second rigid motion.

    With two motions the second half of the points is rotated about the
    vertical axis and shifted by a random unit vector before projection.
    """
    labels = np.zeros(cfg.n, dtype=int)
    if cfg.motions == 2:
        labels[(cfg.n + 1) // 2:] = 1
    for _ in range(MAX_TRIES):
        X = _random_points(cfg.n, rng)
        cam = Camera.look_at(_equator_camera(rng))
        seen = X.copy()
        motion = None
        if cfg.motions == 2:
            Rz = rotation_about_up(rng.uniform(0.0, 2.0 * np.pi))
            t = rng.normal(size=3)
            t /= np.linalg.norm(t)
            moved = labels == 1
            seen[moved] = X[moved] @ Rz.T + t
            motion = (Rz, t)
        u = _project_in_frame(seen, cam)
        if u is not None:
            break
    else:
        raise RuntimeError("could not place all points inside the image")
    obs, perm = _shuffled(u, rng)
    return ProblemInstance(MinimalProblemKind.Up2p, X, [obs], [cam], perm, cfg.n,
                           motion_labels=labels, second_motion=motion)


GENERATORS = {
    MinimalProblemKind.P3P: gen_p3p_instance,
    MinimalProblemKind.ThreePlusOne: gen_3p1_instance,
    MinimalProblemKind.Up2p: gen_up2p_instance,
}


def generate_instance(cfg: ExperimentConfig, rng) -> ProblemInstance:
    return GENERATORS[cfg.kind](cfg, rng)


def corrupt(instance: ProblemInstance, sigma: float, outlier_count: int, rng) -> ProblemInstance:
    """Append uniform outliers to the last image, then jitter every 2D point."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    obs = [o.copy() for o in instance.observations]
    if outlier_count:
        extra = rng.uniform((0.0, 0.0), (IMAGE_WIDTH, IMAGE_HEIGHT), size=(outlier_count, 2))
        obs[-1] = np.concatenate([obs[-1], extra])
    if sigma > 0:
        obs = [o + rng.normal(scale=sigma, size=o.shape) for o in obs]
    return dataclasses.replace(instance, observations=obs, n_outliers=instance.n_outliers + outlier_count)


# ------------------------------------------------------------ experiment

def _stream(seed, *key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def instance_accuracies(cfg: ExperimentConfig, index: int) -> np.ndarray:
    """Accuracies of one instance, shape ``(sigmas, outliers, solvers, schedule)``."""
    base = generate_instance(cfg, _stream(cfg.seed, index, 0))
    schedule = cfg.schedule()
    order = cfg.kind.order
    out = np.zeros((len(cfg.sigmas), len(cfg.outliers), len(cfg.solvers), len(schedule)))
    for si, sigma in enumerate(cfg.sigmas):
        for oi, n_out in enumerate(cfg.outliers):
            inst = corrupt(base, sigma, n_out, _stream(cfg.seed, index, 1, si, oi))
            edges = sample_hyperedges(*inst.shape, order, schedule[-1], _stream(cfg.seed, index, 2, oi))
            w = edge_affinities(cfg.kind, inst, edges, cfg.effective_rho)
            for k, s in enumerate(schedule):
                H = assemble(order, inst.shape, edges[:s], w[:s])
                for vi, name in enumerate(cfg.solvers):
                    try:
                        X = discretize(SOLVERS[name](H))
                    except EmptyTensor:
                        X = discretize(np.ones(inst.shape))
                    out[si, oi, vi, k] = accuracy(X, inst.ground_truth, inst.n_inliers)
    return out


def _task(args):
    return instance_accuracies(*args)


def run_experiment(cfg: ExperimentConfig) -> list:
    """One :class:`AccuracyCurve` per ``(sigma, outliers, solver)`` cell."""
    jobs = [(cfg, i) for i in range(cfg.instances)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_task, jobs))
    else:
        results = [_task(j) for j in jobs]
    acc = np.stack(results)  # instance order, independent of scheduling
    mean = acc.mean(axis=0)
    std = acc.std(axis=0)
    schedule = cfg.schedule()
    curves = []
    for si, sigma in enumerate(cfg.sigmas):
        for oi, n_out in enumerate(cfg.outliers):
            for vi, name in enumerate(cfg.solvers):
                rows = [(s, float(mean[si, oi, vi, k]), float(std[si, oi, vi, k])) for k, s in enumerate(schedule)]
                curves.append(AccuracyCurve(cfg.kind.value, name, sigma, n_out, cfg.baseline, cfg.motions,
                                            cfg.instances, cfg.seed, rows))
    return curves

import itertools

import numpy as np
import pytest

from polymatch.errors import BehindCamera, DegenerateConfiguration
from polymatch.geometry import (
    VERTICAL_ALIGN,
    Camera,
    MinimalProblemKind,
    camera_yaw,
    default_intrinsics,
    depth_ratio,
    p3p_quartic,
    project,
    rays,
    relative_yaw,
    rotation_about_up,
    rotation_y,
    three_plus_one_quartic,
    up2p_quadratic,
)
from polymatch.polynomials import evaluate, resultant_magnitude, resultant_magnitude_qr, sylvester
from polymatch.sim import ExperimentConfig, gen_3p1_instance, gen_p3p_instance, gen_up2p_instance


def _cfg(kind):
    return ExperimentConfig(kind=kind, instances=1)


def _p3p_setup(seed):
    inst = gen_p3p_instance(_cfg("p3p"), np.random.default_rng(seed))
    u = inst.observations[0][inst.ground_truth]  # row-aligned pixels
    return inst, inst.points3d, u


def _3p1_setup(seed):
    inst = gen_3p1_instance(_cfg("3p1"), np.random.default_rng(seed))
    u1, u2 = inst.observations[0], inst.observations[1][inst.ground_truth]
    return inst, u1, u2


def _up2p_setup(seed):
    inst = gen_up2p_instance(_cfg("up2p"), np.random.default_rng(seed))
    return inst, inst.points3d, inst.observations[0][inst.ground_truth]


def test_kind_properties():
    k = MinimalProblemKind
    assert [x.minimal_size for x in k] == [3, 3, 2]
    assert [x.order for x in k] == [4, 4, 3]
    assert [x.degree for x in k] == [4, 4, 2]
    assert k.parse("UP2P") is k.Up2p
    with pytest.raises(ValueError):
        k.parse("p4p")


def test_camera_validation():
    with pytest.raises(ValueError):
        Camera(K=np.diag([-1.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        Camera(R=np.diag([1.0, 2.0, 1.0]))


def test_project_examples():
    cam = Camera()
    np.testing.assert_allclose(project([0.0, 0.0, 5.0], cam), [320.0, 240.0])
    np.testing.assert_allclose(project([0.3, -0.2, 4.0], cam), project([0.6, -0.4, 8.0], cam))
    np.testing.assert_allclose(project([1.0, 0.0, 10.0], cam), [420.0, 240.0])
    with pytest.raises(BehindCamera):
        project([0.0, 0.0, -1.0], cam)
    with pytest.raises(BehindCamera):
        project([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]], cam)


def test_look_at_is_level_and_centred():
    cam = Camera.look_at([12.0, 0.0, 0.0])
    np.testing.assert_allclose(cam.R[2], [-1.0, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(cam.R[1], [0.0, 0.0, -1.0], atol=1e-15)  # image down is world down
    np.testing.assert_allclose(project([0.0, 0.0, 0.0], cam), [320.0, 240.0])
    assert project([0.0, 0.0, 1.0], cam)[1] < 240.0  # world up is image up


def test_rays_are_unit_and_inverse_of_projection():
    K = default_intrinsics()
    np.testing.assert_allclose(rays([320.0, 240.0], K), [0.0, 0.0, 1.0])
    X = np.array([[0.3, -0.5, 4.0], [1.0, 1.0, 9.0]])
    r = rays(project(X, Camera()), K)
    np.testing.assert_allclose(r, X / np.linalg.norm(X, axis=1, keepdims=True), atol=1e-14)


# ------------------------------------------------------------- P3P

def test_p3p_true_ratio_is_root():
    inst, X, u = _p3p_setup(0)
    q = p3p_quartic(X[0], X[1], X[2], u[0], u[1], u[2])
    assert q.degree == 4
    assert abs(np.linalg.norm(q.coeffs) - 1.0) < 1e-12
    assert abs(evaluate(q, depth_ratio(inst.cameras[0], X[0], X[1]))) <= 1e-8


def test_p3p_fourth_point_shares_root():
    inst, X, u = _p3p_setup(1)
    x_true = depth_ratio(inst.cameras[0], X[0], X[1])
    q1 = p3p_quartic(X[0], X[1], X[2], u[0], u[1], u[2])
    q2 = p3p_quartic(X[0], X[1], X[3], u[0], u[1], u[3])
    assert abs(evaluate(q2, x_true)) <= 1e-8
    assert resultant_magnitude(q1, q2) <= 1e-8


def test_p3p_degenerate_inputs():
    _, X, u = _p3p_setup(2)
    with pytest.raises(DegenerateConfiguration):
        p3p_quartic(X[0], X[0], X[2], u[0], u[1], u[2])
    with pytest.raises(DegenerateConfiguration):
        p3p_quartic(X[0], X[1], X[2], u[0], u[0], u[2])


def test_p3p_rigid_motion_invariance():
    inst, X, u = _p3p_setup(3)
    cam = inst.cameras[0]
    q = p3p_quartic(X[0], X[1], X[2], u[0], u[1], u[2]).coeffs
    rng = np.random.default_rng(3)
    for _ in range(5):
        Rm, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        Rm *= np.sign(np.linalg.det(Rm))
        t = rng.normal(size=3) * 5
        Y = X @ Rm.T + t
        moved = Camera(K=cam.K, R=cam.R @ Rm.T, center=Rm @ cam.center + t)
        v = project(Y, moved)
        q2 = p3p_quartic(Y[0], Y[1], Y[2], v[0], v[1], v[2]).coeffs
        assert min(np.max(np.abs(q - q2)), np.max(np.abs(q + q2))) <= 1e-8


def test_p3p_scale_about_centre_keeps_roots():
    inst, X, u = _p3p_setup(4)
    c = inst.cameras[0].center
    q = p3p_quartic(X[0], X[1], X[2], u[0], u[1], u[2])
    for s in (0.1, 3.0, 250.0):
        Y = c + s * (X - c)
        q2 = p3p_quartic(Y[0], Y[1], Y[2], u[0], u[1], u[2])
        r1 = np.sort_complex(np.roots(q.coeffs))
        r2 = np.sort_complex(np.roots(q2.coeffs))
        assert np.max(np.abs(r1 - r2)) <= 1e-6


# ------------------------------------------------------------- 3P1

def test_3p1_true_cosine_is_root():
    inst, u1, u2 = _3p1_setup(0)
    c = np.cos(relative_yaw(*inst.cameras))
    q = three_plus_one_quartic(u1[0], u1[1], u1[2], u2[0], u2[1], u2[2])
    assert q.degree == 4
    assert abs(evaluate(q, c)) <= 1e-8


def test_3p1_all_pairs_of_four_quartics_share_root():
    inst, u1, u2 = _3p1_setup(1)
    quartics = [three_plus_one_quartic(*(u1[i] for i in t), *(u2[i] for i in t))
                for t in itertools.combinations(range(4), 3)]
    for p, q in itertools.combinations(quartics, 2):
        assert resultant_magnitude(p, q) <= 1e-8


def test_3p1_repeated_correspondence_is_degenerate():
    _, u1, u2 = _3p1_setup(2)
    with pytest.raises(DegenerateConfiguration):
        three_plus_one_quartic(u1[0], u1[0], u1[2], u2[0], u2[0], u2[2])


def test_3p1_pure_rotation_example():
    # second camera turned by a known angle about its own y axis
    cam1 = Camera(center=np.zeros(3))
    theta = 0.3
    cam2 = Camera(R=rotation_y(theta), center=np.array([0.4, 0.0, 0.1]))
    X = np.array([[0.5, 0.2, 6.0], [-0.4, 0.1, 5.0], [0.1, -0.3, 7.0]])
    u1, u2 = project(X, cam1), project(X, cam2)
    assert relative_yaw(cam1, cam2) == pytest.approx(theta)
    q = three_plus_one_quartic(*u1, *u2)
    assert abs(evaluate(q, np.cos(theta))) <= 1e-8


# ------------------------------------------------------------- up2p

def test_up2p_true_half_angle_is_root():
    inst, X, u = _up2p_setup(0)
    theta = camera_yaw(inst.cameras[0])
    np.testing.assert_allclose(inst.cameras[0].R, rotation_y(theta) @ VERTICAL_ALIGN, atol=1e-12)
    q = up2p_quadratic(X[0], X[1], u[0], u[1])
    assert q.degree == 2
    assert abs(evaluate(q, np.tan(theta / 2))) <= 1e-8


def test_up2p_zero_angle_has_root_at_zero():
    cam = Camera.look_at([0.0, -12.0, 0.0])
    np.testing.assert_allclose(cam.R, VERTICAL_ALIGN, atol=1e-15)
    X = np.array([[0.5, 1.0, 0.3], [-1.0, -0.5, -0.2]])
    u = project(X, cam)
    q = up2p_quadratic(X[0], X[1], u[0], u[1])
    assert abs(q.coeffs[-1]) <= 1e-8


def test_up2p_overlapping_pairs_share_root():
    _, X, u = _up2p_setup(1)
    q1 = up2p_quadratic(X[0], X[1], u[0], u[1])
    q2 = up2p_quadratic(X[0], X[2], u[0], u[2])
    assert sylvester(q1, q2).shape == (4, 4)
    assert resultant_magnitude(q1, q2) <= 1e-8


def test_up2p_degenerate_inputs():
    _, X, u = _up2p_setup(2)
    with pytest.raises(DegenerateConfiguration):
        up2p_quadratic(X[0], X[0], u[0], u[1])
    with pytest.raises(DegenerateConfiguration):
        up2p_quadratic(X[0], X[1], u[0], u[0])


def test_up2p_world_rotation_is_camera_yaw():
    _, X, _ = _up2p_setup(3)
    cam = Camera.look_at([0.0, -12.0, 0.0])
    phi = 0.7
    # turning the scene about the vertical equals yawing the camera by the same angle
    v = project(X @ rotation_about_up(phi).T, cam)
    theta = camera_yaw(Camera(R=VERTICAL_ALIGN @ rotation_about_up(phi)))
    assert abs(abs(theta) - phi) <= 1e-12
    q = up2p_quadratic(X[0], X[1], v[0], v[1])
    assert abs(evaluate(q, np.tan(theta / 2))) <= 1e-8


# ------------------------------------------------------------- properties

def _minimal_polys(kind, seed):
    """The two overlapping polynomials of the identity edge of a fresh instance."""
    rng = np.random.default_rng(seed)
    if kind == "p3p":
        _, X, u = _p3p_setup(rng)
        return (p3p_quartic(X[0], X[1], X[2], u[0], u[1], u[2]),
                p3p_quartic(X[0], X[1], X[3], u[0], u[1], u[3]))
    if kind == "3p1":
        _, u1, u2 = _3p1_setup(rng)
        return (three_plus_one_quartic(u1[0], u1[1], u1[2], u2[0], u2[1], u2[2]),
                three_plus_one_quartic(u1[0], u1[1], u1[3], u2[0], u2[1], u2[3]))
    _, X, u = _up2p_setup(rng)
    return up2p_quadratic(X[0], X[1], u[0], u[1]), up2p_quadratic(X[0], X[2], u[0], u[2])


@pytest.mark.parametrize("kind", ["p3p", "3p1", "up2p"])
def test_overlapping_sets_share_root(kind):
    worst = max(resultant_magnitude_qr(sylvester(*_minimal_polys(kind, s))) for s in range(200))
    assert worst <= 1e-8


@pytest.mark.parametrize("kind", ["p3p", "3p1", "up2p"])
def test_sets_from_different_instances_separate(kind):
    r = [resultant_magnitude_qr(sylvester(_minimal_polys(kind, 2 * s)[0], _minimal_polys(kind, 2 * s + 1)[1]))
         for s in range(200)]
    median = float(np.median(r))
    print(f"{kind}: median cross-instance resultant {median:.3e}")
    assert median >= 1e-4


def test_up2p_half_turn_shared_root_needs_svd():
    # yaw within 1e-4 of pi puts the shared root of tan(theta/2) near infinity:
    # the leading column of the Sylvester matrix nearly vanishes, so the rank
    # drop shows up in R[0, 0] instead of R[-1, -1]; sigma_min still sees it
    inst, X, u = _up2p_setup(115)
    assert abs(abs(camera_yaw(inst.cameras[0])) - np.pi) < 1e-4
    p, q = _minimal_polys("up2p", 115)
    assert resultant_magnitude(p, q, backend="svd") <= 1e-8
    assert abs(np.linalg.qr(sylvester(p, q), mode="r")[0, 0]) <= 1e-4

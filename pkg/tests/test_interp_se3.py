import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goras.errors import DegenerateFrameError, DegenerateSegmentError, InsufficientDataError, InvalidParameterError
from goras.interp_se3 import (
    build_segment,
    differentiate_skeleton,
    eval_segment,
    interpolate_skeleton,
    segment_index,
)
from goras.liegroup import SVD, Pose, counting, exp_se3_array, log_se3_array, pose_distance_array, unit_sphere_weight
from goras.sequence import SyntheticMotion, generate_synthetic, uniform_times

from conftest import random_pose, rotation_about, static_sequence, translating_sequence

seeds = st.integers(0, 2**32 - 1)
W = unit_sphere_weight()


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_segment_matches_end_conditions(seed):
    rng = np.random.default_rng(seed)
    g0, g1 = random_pose(rng, (2,))
    d0, d1 = rng.standard_normal((2, 4, 4))
    d0[3] = d1[3] = 0
    t0, t1 = sorted(rng.uniform(0, 1, 2))
    if t1 - t0 < 1e-3:
        return
    seg = build_segment(g0, g1, d0, d1, t0, t1)
    assert np.allclose(seg.matrix_at(t0), g0, atol=1e-9)
    assert np.allclose(seg.matrix_at(t1), g1, atol=1e-9)
    assert np.allclose(seg.velocity_at(t0), d0, atol=1e-9)
    assert np.allclose(seg.velocity_at(t1), d1, atol=1e-9)
    M3, M2, M1, M0 = seg.global_coefficients()
    for M in (M3, M2, M1):
        assert np.allclose(M[3], 0, atol=1e-9)
    assert np.allclose(M0[3], [0, 0, 0, 1], atol=1e-9)
    t = rng.uniform(t0, t1)
    assert np.allclose(M3 * t**3 / 6 + M2 * t**2 / 2 + M1 * t + M0, seg.matrix_at(t), atol=1e-8)


def test_segment_examples(rng):
    g = random_pose(rng)
    zero = np.zeros((4, 4))
    seg = build_segment(g, g, zero, zero, 0.2, 0.4)
    for t in (0.2, 0.27, 0.4):
        assert np.allclose(seg.matrix_at(t), g)
        assert np.allclose(eval_segment(seg, t).matrix, g, atol=1e-9)
    # affine motion: g(t) = A + B t
    A, B = random_pose(rng), rng.standard_normal((4, 4))
    B[3] = 0
    seg = build_segment(A + 0.1 * B, A + 0.3 * B, B, B, 0.1, 0.3)
    M3, M2, _, _ = seg.global_coefficients()
    assert np.allclose(M3, 0, atol=1e-9) and np.allclose(M2, 0, atol=1e-9)


def test_segment_errors(rng):
    g = random_pose(rng)
    zero = np.zeros((4, 4))
    with pytest.raises(DegenerateSegmentError):
        build_segment(g, g, zero, zero, 0.5, 0.5)
    seg = build_segment(g, g, zero, zero, 0.0, 1.0)
    with pytest.raises(InvalidParameterError):
        eval_segment(seg, 1.5)
    flat = np.eye(4)
    flat[2, 2] = 0.0
    seg = build_segment(flat, flat, zero, zero, 0.0, 1.0)
    with pytest.raises(DegenerateFrameError, match="t=0.5"):
        eval_segment(seg, 0.5)


def test_axial_rotation_midpoint():
    axis = np.array([0.0, 0.0, 1.0])
    th0, th1 = 0.3, 1.1
    rate = th1 - th0
    g0, g1 = np.eye(4), np.eye(4)
    g0[:3, :3] = rotation_about(axis, th0)
    g1[:3, :3] = rotation_about(axis, th1)
    d0, d1 = np.zeros((4, 4)), np.zeros((4, 4))
    K = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0.0]])
    d0[:3, :3] = g0[:3, :3] @ K * rate
    d1[:3, :3] = g1[:3, :3] @ K * rate
    mid = eval_segment(build_segment(g0, g1, d0, d1, 0.0, 1.0), 0.5).matrix
    omega, _ = log_se3_array(mid)
    assert np.allclose(omega[:2], 0, atol=1e-12)
    assert th0 < omega[2] < th1


def test_differentiate_examples():
    seq = static_sequence(T=12)
    assert np.allclose(differentiate_skeleton(seq), 0, atol=1e-12)
    seq = translating_sequence(uniform_times(20), n=2)
    d = differentiate_skeleton(seq)
    assert np.allclose(d[:, :, 0, 3], 1.0, atol=1e-9)
    d[:, :, 0, 3] = 0
    assert np.allclose(d, 0, atol=1e-9)
    with pytest.raises(InsufficientDataError):
        differentiate_skeleton(translating_sequence(uniform_times(3)))


def _derivative_error(motion, T):
    t = uniform_times(T)
    d = differentiate_skeleton(motion.sequence(t))
    # reference: central difference of the analytic curve with a tiny step
    eps = 1e-6
    lo, hi = np.clip(t - eps, 0, 1), np.clip(t + eps, 0, 1)
    ref = (motion.poses(hi) - motion.poses(lo)) / (hi - lo)[:, None, None, None]
    assert np.allclose(d[:, :, 3], 0)
    return np.abs(d - ref).max()


def test_differentiate_against_generator():
    motion = SyntheticMotion(4, 3, 3)
    coarse, fine = _derivative_error(motion, 75), _derivative_error(motion, 150)
    assert fine < 1e-4
    # fourth order: halving h divides the error by about 16
    assert coarse / fine > 10


def test_interpolate_reproduces_knots():
    seq = generate_synthetic(3, 40, 5, 3)
    out = interpolate_skeleton(seq, differentiate_skeleton(seq), seq.times)
    assert np.allclose(out, seq.frames, atol=1e-9)
    static = static_sequence(T=8, n=3)
    out = interpolate_skeleton(static, differentiate_skeleton(static), np.linspace(0, 1, 33))
    assert np.allclose(out, static.frames[0], atol=1e-12)


def test_interpolate_downsampled_convergence():
    motion = SyntheticMotion(8, 4, 3)
    dense = uniform_times(151)
    coarse = motion.sequence(dense[::2])
    held = dense[1::2]
    out = interpolate_skeleton(coarse, differentiate_skeleton(coarse), held)
    assert pose_distance_array(out, motion.poses(held), W).max() < 1e-3


def test_refinement_order():
    motion = SyntheticMotion(2, 3, 3)
    errs = []
    for T in (21, 41, 81):
        seq = motion.sequence(uniform_times(T))
        held = 0.5 * (seq.times[1:] + seq.times[:-1])
        out = interpolate_skeleton(seq, differentiate_skeleton(seq), held)
        errs.append(np.abs(out[..., :3, 3] - motion.poses(held)[..., :3, 3]).max())
    assert errs[0] / errs[1] >= 4 and errs[1] / errs[2] >= 4


def test_interpolate_output_is_valid_and_counted():
    seq = generate_synthetic(6, 30, 4, 3)
    q = np.sort(np.random.default_rng(0).uniform(0, 1, 17))
    with counting() as c:
        out = interpolate_skeleton(seq, differentiate_skeleton(seq), q)
    assert c[SVD] == 17 * 4
    for pose in out.reshape(-1, 4, 4):
        Pose(pose)


def test_derivative_interpolant_consistency():
    seq = generate_synthetic(12, 150, 3, 3)
    deriv = differentiate_skeleton(seq)
    eps = 1e-6
    knots = seq.times[1:-1]
    plus = interpolate_skeleton(seq, deriv, knots + eps)
    minus = interpolate_skeleton(seq, deriv, knots - eps)
    fd = (plus - minus) / (2 * eps)
    assert np.abs(fd - deriv[1:-1]).max() < 1e-4


def test_segment_lookup_tie_break():
    t = uniform_times(5)
    assert list(segment_index(t, np.array([0.0, 0.25, 0.3, 1.0]))) == [0, 1, 1, 3]


def test_interpolate_rejects_out_of_range():
    seq = generate_synthetic(0, 10, 1, 1)
    with pytest.raises(InvalidParameterError):
        interpolate_skeleton(seq, differentiate_skeleton(seq), [1.5])


def test_exp_curve_derivative_shape():
    xi = np.zeros((5, 6))
    assert exp_se3_array(xi[:, :3], xi[:, 3:]).shape == (5, 4, 4)

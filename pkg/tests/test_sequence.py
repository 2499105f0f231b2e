import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goras.errors import DegenerateSkeletonError, InvalidParameterError, MonotonicityWarning, ParseError
from goras.interp_se3 import differentiate_skeleton, interpolate_skeleton
from goras.io import import_ntu, load_sequence, read_ntu_skeleton, save_sequence, sequence_to_dict
from goras.liegroup import exp_se3_array, make_pose, pose_distance_array, unit_sphere_weight
from goras.sequence import (
    apply_reparameterization,
    compose_trg,
    generate_synthetic,
    invert_trg,
    normalize_skeleton,
    random_trg,
    resample,
    uniform_times,
)
from goras.skeleton import Reparameterization, SkeletonSequence

from conftest import random_pose

seeds = st.integers(0, 2**32 - 1)


def canonical_skeleton(T=5, seed=0):
    """root at origin, spine along +y at unit length, hips along x."""
    rng = np.random.default_rng(seed)
    n = 5
    frames = random_pose(rng, (T, n), max_angle=1.5)
    frames[0, 0, :3, 3] = [0, 0, 0]
    frames[0, 1, :3, 3] = [0, 1, 0]
    frames[0, 2, :3, 3] = [-0.3, -0.1, 0.2]
    frames[0, 3, :3, 3] = [0.3, -0.1, 0.2]
    return SkeletonSequence(("root", "spine", "hipL", "hipR", "hand"), uniform_times(T), frames)


LABELS = ("root", "spine", "hipL", "hipR")


# --------------------------------------------------------------- value types


def test_sequence_validation():
    frames = np.tile(np.eye(4), (3, 1, 1, 1))
    with pytest.raises(ParseError, match="start at 0"):
        SkeletonSequence(("a",), [0.1, 0.5, 1.0], frames)
    with pytest.raises(ParseError, match="non-monotone times at frame 2"):
        SkeletonSequence(("a",), [0.0, 0.5, 0.5, 1.0], np.tile(np.eye(4), (4, 1, 1, 1)))
    with pytest.raises(ParseError):
        SkeletonSequence(("a", "b"), [0.0, 0.5, 1.0], frames)


def test_reparameterization_validation():
    with pytest.raises(InvalidParameterError):
        Reparameterization([0, 0.5, 1], [0, 0.5, 0.9])
    with pytest.raises(InvalidParameterError):
        Reparameterization([0, 0.5, 1], [0, 0.6, 0.6])
    tau = Reparameterization.identity(uniform_times(4))
    assert np.array_equal(tau.values, tau.times)


def test_select_joints():
    seq = canonical_skeleton()
    sub = seq.select_joints(["hand", "root"])
    assert sub.joint_labels == ("hand", "root")
    assert np.array_equal(sub.frames[:, 0], seq.frames[:, 4])
    with pytest.raises(InvalidParameterError):
        seq.select_joints(["tail"])


# ---------------------------------------------------------------------- I/O


def test_gsk_round_trip(tmp_path):
    seq = generate_synthetic(3, 12, 4, 2)
    path = tmp_path / "a.gsk"
    save_sequence(seq, path)
    back = load_sequence(path)
    assert back.joint_labels == seq.joint_labels
    assert np.array_equal(back.times, seq.times)
    assert np.array_equal(back.frames, seq.frames)
    assert load_sequence(path, ["j2"]).n == 1


def test_gsk_non_monotone_times(tmp_path):
    doc = sequence_to_dict(generate_synthetic(0, 4, 1, 1))
    doc["times"] = [0, 0.5, 0.4, 1]
    path = tmp_path / "bad.gsk"
    path.write_text(json.dumps(doc))
    with pytest.raises(ParseError, match="non-monotone times at frame 2"):
        load_sequence(path)


def test_gsk_reflection_is_located(tmp_path):
    doc = sequence_to_dict(generate_synthetic(0, 4, 5, 1))
    pose = np.array(doc["frames"][0][3]).reshape(4, 4)
    pose[:3, 0] *= -1
    doc["frames"][0][3] = pose.ravel().tolist()
    path = tmp_path / "bad.gsk"
    path.write_text(json.dumps(doc))
    with pytest.raises(ParseError, match="frame 0, joint 3"):
        load_sequence(path)


def test_gsk_malformed(tmp_path):
    path = tmp_path / "bad.gsk"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        load_sequence(path)
    path.write_text(json.dumps({"joints": ["a"]}))
    with pytest.raises(ParseError):
        load_sequence(path)


def write_ntu(path, positions, quats):
    T, J = positions.shape[:2]
    lines = [str(T)]
    for t in range(T):
        lines += ["1", " ".join(["0"] * 10), str(J)]
        for j in range(J):
            x, y, z = positions[t, j]
            w, qx, qy, qz = quats[t, j]
            lines.append(f"{x} {y} {z} 0 0 0 0 {w} {qx} {qy} {qz} 2")
    path.write_text("\n".join(lines) + "\n")


def test_ntu_import(tmp_path):
    rng = np.random.default_rng(0)
    T, J = 6, 25
    pos = rng.standard_normal((T, J, 3))
    q = rng.standard_normal((T, J, 4))
    q /= np.linalg.norm(q, axis=-1, keepdims=True)
    q[:, 3] = 0.0  # Head has no orientation in NTU
    path = tmp_path / "clip.skeleton"
    write_ntu(path, pos, q)
    p2, q2 = read_ntu_skeleton(path)
    assert np.allclose(p2, pos) and np.allclose(q2, q)
    seq = import_ntu(path)
    assert seq.n == 24 and "Head" not in seq.joint_labels
    assert np.allclose(seq.frames[:, 0, :3, 3], pos[:, 0])
    w, x, y, z = q[2, 0]
    R = np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )
    assert np.allclose(seq.frames[2, 0, :3, :3], R)
    assert import_ntu(path, ["SpineBase", "HipLeft"]).joint_labels == ("SpineBase", "HipLeft")


def test_ntu_truncated(tmp_path):
    path = tmp_path / "cut.skeleton"
    path.write_text("3\n1\n0 0 0\n")
    with pytest.raises(ParseError):
        import_ntu(path)


# ------------------------------------------------------------ normalization


def test_normalize_fixed_point():
    seq = canonical_skeleton()
    out = normalize_skeleton(seq, *LABELS)
    assert np.allclose(out.frames, seq.frames, atol=1e-12)


def test_normalize_invariances(rng):
    seq = canonical_skeleton(seed=3)
    shift = random_pose(rng)
    moved = seq.with_frames(shift @ seq.frames)
    scaled_frames = seq.frames.copy()
    scaled_frames[..., :3, 3] *= 2.0
    scaled = seq.with_frames(scaled_frames)
    base = normalize_skeleton(seq, *LABELS).frames
    assert np.allclose(normalize_skeleton(moved, *LABELS).frames, base, atol=1e-9)
    assert np.allclose(normalize_skeleton(scaled, *LABELS).frames, base, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_normalize_idempotent_and_canonical(seed):
    rng = np.random.default_rng(seed)
    seq = SkeletonSequence(("root", "spine", "hipL", "hipR", "hand"), uniform_times(4), random_pose(rng, (4, 5)))
    once = normalize_skeleton(seq, *LABELS)
    twice = normalize_skeleton(once, *LABELS)
    assert np.allclose(once.frames, twice.frames, atol=1e-12)
    p = once.frames[0, :, :3, 3]
    assert np.allclose(p[0], 0, atol=1e-12)
    assert np.linalg.norm(p[1] - p[0]) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose((p[1] - p[0])[[0, 2]], 0, atol=1e-12)


def test_normalize_degenerate():
    seq = canonical_skeleton()
    frames = seq.frames.copy()
    frames[0, 1, :3, 3] = 0.0
    with pytest.raises(DegenerateSkeletonError):
        normalize_skeleton(seq.with_frames(frames), *LABELS)
    with pytest.raises(InvalidParameterError):
        normalize_skeleton(seq, "root", "spine", "hipL", "nope")


# ----------------------------------------------------------------- synthetic


def test_synthetic_properties():
    a = generate_synthetic(7, 30, 3, 2)
    b = generate_synthetic(7, 30, 3, 2)
    assert np.array_equal(a.frames, b.frames)
    static = generate_synthetic(7, 30, 3, 0)
    assert np.allclose(static.frames, static.frames[0], atol=0)
    SkeletonSequence(a.joint_labels, a.times, a.frames)  # passes full validation


# ---------------------------------------------------------------------- TRG


def test_random_trg_examples():
    tau = random_trg(0, 11, 0.0)
    assert np.allclose(tau.values, tau.times, atol=1e-15)
    for seed in range(20):
        tau = random_trg(seed, 50, 0.5)
        assert tau.values[0] == 0.0 and tau.values[-1] == 1.0
        assert np.all(np.diff(tau.values) > 0)
    for seed in range(100):
        assert np.abs(random_trg(seed, 20, 0.3).values - random_trg(seed + 1000, 20, 0.3).values).max() > 0


def test_apply_identity_and_knots():
    seq = generate_synthetic(1, 30, 3, 3)
    out = apply_reparameterization(seq, Reparameterization.identity(seq.times))
    assert np.allclose(out.frames, seq.frames, atol=1e-12)
    values = np.interp(seq.times, [0, seq.times[5], 1], [0, seq.times[7], 1])
    out = apply_reparameterization(seq, Reparameterization(seq.times, values))
    assert np.allclose(out.frames[5], seq.frames[7], atol=1e-9)
    assert out.n == seq.n and out.T == seq.T and out.joint_labels == seq.joint_labels


@pytest.mark.parametrize("seed", range(5))
def test_apply_then_invert(seed):
    # a smooth warp: piecewise-linear random draws put kinks into X(tau(t))
    # that no cubic interpolant reproduces to 1e-3
    seq = generate_synthetic(seed, 150, 4, 3)
    t = seq.times
    tau = Reparameterization(t, t + 0.1 * np.sin(np.pi * t) * (1 - 2 * (seed % 2)))
    warped = apply_reparameterization(seq, tau)
    back = apply_reparameterization(warped, invert_trg(tau))
    err = pose_distance_array(back.frames, seq.frames, unit_sphere_weight())
    assert err.max() < 1e-3


def test_compose_and_invert():
    t = uniform_times(40)
    tau = random_trg(4, 40, 0.4)
    ident = Reparameterization.identity(t)
    assert np.allclose(compose_trg(tau, ident).values, tau.values, atol=1e-12)
    assert np.allclose(invert_trg(ident).values, t, atol=1e-15)
    assert np.abs(compose_trg(tau, invert_trg(tau)).values - t).max() <= 2 * (t[1] - t[0])


@settings(max_examples=500, deadline=None)
@given(seeds, st.floats(0.0, 0.99))
def test_trg_closure(seed, roughness):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MonotonicityWarning)
        a = random_trg(seed, 25, roughness)
        b = random_trg(seed + 1, 25, roughness)
        for tau in (compose_trg(a, b), invert_trg(a)):
            assert tau.values[0] == 0.0 and tau.values[-1] == 1.0
            assert np.all(np.diff(tau.values) > 0)


def test_resample_uses_interpolant():
    seq = generate_synthetic(5, 61, 2, 2)
    coarse = resample(seq, 31)
    assert coarse.T == 31
    assert np.allclose(coarse.frames, seq.frames[::2], atol=1e-9)
    assert resample(seq, 61) is seq


def test_interpolation_against_ground_truth():
    from goras.sequence import SyntheticMotion

    motion = SyntheticMotion(11, 3, 3)
    seq = motion.sequence(uniform_times(150))
    q = np.linspace(0, 1, 401)
    frames = interpolate_skeleton(seq, differentiate_skeleton(seq), q)
    err = pose_distance_array(frames, motion.poses(q), unit_sphere_weight())
    assert err.max() < 1e-3


def test_make_pose_stack():
    R = exp_se3_array(np.array([[0.1, 0.2, 0.3]]), np.zeros((1, 3)))[:, :3, :3]
    g = make_pose(R, np.ones((1, 3)))
    assert g.shape == (1, 4, 4) and np.array_equal(g[0, 3], [0, 0, 0, 1])

"""
Skeleton-sequence operations: normalization, synthetic generation and the
temporal reparameterization group (random warps, application, composition,
inversion).
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import DegenerateSkeletonError, InvalidParameterError, MonotonicityWarning
from .interp_se3 import differentiate_skeleton, interpolate_skeleton
from .liegroup import exp_se3_array, make_pose
from .numerics import DEFAULT_STENCIL, SampledFunction, interpolate_scalar, invert_monotone
from .skeleton import Reparameterization, SkeletonSequence

# synthetic motion amplitudes (radians / metres)
BASE_ROTATION = 0.6
BASE_TRANSLATION = 0.3
ROTATION_AMPLITUDE = 0.25
TRANSLATION_AMPLITUDE = 0.1


def uniform_times(T: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, T)
    t[-1] = 1.0
    return t


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------


def normalize_skeleton(
    seq: SkeletonSequence,
    root_label: str,
    spine_label: str,
    hip_left_label: str,
    hip_right_label: str,
) -> SkeletonSequence:
    """
    Remove position, orientation and body size using frame 0 as reference.

    The root joint is moved to the origin, root->spine is turned onto +y,
    the hip line (orthogonalised against y) onto +x, and translations are
    divided by the root->spine length.  The same rigid change of world frame
    is applied to every frame, so the motion itself is untouched.
    """
    index = {label: k for k, label in enumerate(seq.joint_labels)}
    missing = [s for s in (root_label, spine_label, hip_left_label, hip_right_label) if s not in index]
    if missing:
        raise InvalidParameterError(f"unknown joint labels: {', '.join(missing)}")
    p = seq.frames[0, :, :3, 3]
    root = p[index[root_label]]
    up = p[index[spine_label]] - root
    length = np.linalg.norm(up)
    if length < 1e-12:
        raise DegenerateSkeletonError("root and spine joints coincide in frame 0")
    y = up / length
    side = p[index[hip_right_label]] - p[index[hip_left_label]]
    x = side - np.dot(side, y) * y
    if np.linalg.norm(x) < 1e-12:
        raise DegenerateSkeletonError("hip line is parallel to the spine in frame 0")
    x /= np.linalg.norm(x)
    z = np.cross(x, y)
    Q = np.stack([x, y, z])

    frames = seq.frames
    R = np.einsum("ij,...jk->...ik", Q, frames[..., :3, :3])
    r = np.einsum("ij,...j->...i", Q, frames[..., :3, 3] - root) / length
    return seq.with_frames(make_pose(R, r))


# ---------------------------------------------------------------------------
# Synthetic data
# ---------------------------------------------------------------------------


class SyntheticMotion:
    """
    Random smooth skeleton motion: joint ``j`` follows ``exp(xi_j(t))`` where
    ``xi_j`` is a constant twist plus ``smoothness`` sine/cosine harmonics.

    The curve can be evaluated at arbitrary times, which makes it usable as
    ground truth for interpolation tests.
    """

    def __init__(self, seed: int, n: int, smoothness: int) -> None:
        if n < 1 or smoothness < 0:
            raise InvalidParameterError("need n >= 1 and smoothness >= 0")
        rng = np.random.default_rng(seed)
        self.n = n
        self.smoothness = smoothness
        self.base = np.concatenate(
            [
                rng.uniform(-BASE_ROTATION, BASE_ROTATION, (n, 3)),
                rng.uniform(-BASE_TRANSLATION, BASE_TRANSLATION, (n, 3)),
            ],
            axis=1,
        )
        k = np.arange(1, smoothness + 1)
        amp = np.concatenate([np.full(3, ROTATION_AMPLITUDE), np.full(3, TRANSLATION_AMPLITUDE)])
        self.freq = np.pi * k
        self.sin_coef = rng.standard_normal((smoothness, n, 6)) * amp / k[:, None, None]
        self.cos_coef = rng.standard_normal((smoothness, n, 6)) * amp / k[:, None, None]

    def twists(self, times) -> np.ndarray:
        """Twist coordinates ``(omega, v)``, shape ``(T, n, 6)``."""
        t = np.asarray(times, dtype=float)
        phase = np.multiply.outer(t, self.freq)
        return (
            self.base
            + np.einsum("tk,knc->tnc", np.sin(phase), self.sin_coef)
            + np.einsum("tk,knc->tnc", np.cos(phase), self.cos_coef)
        )

    def poses(self, times) -> np.ndarray:
        xi = self.twists(times)
        return exp_se3_array(xi[..., :3], xi[..., 3:])

    def sequence(self, times, name: str = "synthetic") -> SkeletonSequence:
        labels = tuple(f"j{k}" for k in range(self.n))
        return SkeletonSequence(labels, times, self.poses(times), name=name, validate=False)


def generate_synthetic(seed: int, T: int, n: int, smoothness: int) -> SkeletonSequence:
    if T < 2:
        raise InvalidParameterError("need T >= 2")
    return SyntheticMotion(seed, n, smoothness).sequence(uniform_times(T), name=f"synthetic-{seed}")


# ---------------------------------------------------------------------------
# Temporal reparameterization group
# ---------------------------------------------------------------------------


def _restrictify(values: np.ndarray) -> np.ndarray:
    """Nudge tied samples apart by the smallest representable step."""
    values = values.copy()
    values[0], values[-1] = 0.0, 1.0
    if np.all(np.diff(values) > 0):
        return values
    warnings.warn("reparameterization lost strict monotonicity; ties perturbed", MonotonicityWarning, stacklevel=3)
    for i in range(1, values.size - 1):
        if values[i] <= values[i - 1]:
            values[i] = np.nextafter(values[i - 1], np.inf)
    for i in range(values.size - 2, 0, -1):
        if values[i] >= values[i + 1]:
            values[i] = np.nextafter(values[i + 1], -np.inf)
    return values


def random_trg(seed: int, T: int, roughness: float) -> Reparameterization:
    """
    Random warp on the uniform ``T``-point grid.

    Increments are ``exp(roughness * z)`` with standard normal ``z``,
    rescaled to sum to one, so the warp is strictly increasing with pinned
    endpoints whatever the draw.
    """
    if T < 2:
        raise InvalidParameterError("need T >= 2")
    if not 0.0 <= roughness:
        raise InvalidParameterError("roughness must be non-negative")
    z = np.random.default_rng(seed).standard_normal(T - 1)
    inc = np.exp(roughness * z)
    values = np.concatenate([[0.0], np.cumsum(inc / inc.sum())])
    return Reparameterization(uniform_times(T), _restrictify(values))


def warp_at(tau: Reparameterization, times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.shape == tau.times.shape and np.array_equal(times, tau.times):
        return tau.values.copy()
    return interpolate_scalar(SampledFunction(tau.times, tau.values), times)


def apply_reparameterization(
    seq: SkeletonSequence,
    tau: Reparameterization,
    stencil_size: int = DEFAULT_STENCIL,
    deriv: np.ndarray | None = None,
    J=None,
) -> SkeletonSequence:
    """Return ``X(tau(t))`` sampled on the sequence's own time grid."""
    if deriv is None:
        deriv = differentiate_skeleton(seq, min(stencil_size, seq.T))
    frames = interpolate_skeleton(seq, deriv, warp_at(tau, seq.times), J)
    return seq.with_frames(frames)


def resample(seq: SkeletonSequence, T: int, stencil_size: int = DEFAULT_STENCIL, J=None) -> SkeletonSequence:
    """Resample onto a uniform ``T``-point grid with the SE(3) cubic interpolant."""
    times = uniform_times(T)
    if times.shape == seq.times.shape and np.array_equal(times, seq.times):
        return seq
    deriv = differentiate_skeleton(seq, min(stencil_size, seq.T))
    return seq.with_frames(interpolate_skeleton(seq, deriv, times, J), times=times)


def compose_trg(tau1: Reparameterization, tau2: Reparameterization) -> Reparameterization:
    """Samples of ``tau1(tau2(t))`` on ``tau2``'s grid."""
    values = np.interp(tau2.values, tau1.times, tau1.values)
    return Reparameterization(tau2.times, _restrictify(values))


def invert_trg(tau: Reparameterization) -> Reparameterization:
    values = invert_monotone(SampledFunction(tau.times, tau.values), tau.times)
    return Reparameterization(tau.times, _restrictify(values))

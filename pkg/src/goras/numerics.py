"""One-dimensional numerical kernels: Fornberg weights, trapezoid quadrature,
monotone inversion and piecewise-linear lookup."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ClampWarning,
    InsufficientDataError,
    InvalidGridError,
    InvalidParameterError,
    InversionError,
)

DEFAULT_STENCIL = 5
TIE_TOL = 1e-14
RANGE_TOL = 1e-12


@dataclass(frozen=True)
class SampledFunction:
    """Samples ``values[i] = f(times[i])`` on a strictly increasing grid.

    ``values`` may carry trailing dimensions (one scalar function per entry).
    """

    times: np.ndarray
    values: np.ndarray
    unit_normalized: bool = False

    def __post_init__(self) -> None:
        t = np.array(self.times, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.ndim != 1 or t.size < 1:
            raise InvalidGridError("times must be a non-empty 1-D array")
        if v.shape[:1] != t.shape:
            raise InvalidGridError(f"values has {v.shape[:1]} samples, times has {t.size}")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise InvalidGridError("times must be strictly increasing")
        if not np.all(np.isfinite(v)) or not np.all(np.isfinite(t)):
            raise InvalidParameterError("samples must be finite")
        if self.unit_normalized and (t[0] != 0.0 or t[-1] != 1.0):
            raise InvalidGridError("unit-normalized grid must start at 0 and end at 1")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.times.size


def fornberg_weights(nodes, x0: float, order: int) -> np.ndarray:
    """
    Finite-difference weights for the ``order``-th derivative at ``x0``.

    Uses Fornberg's recursion, which works for arbitrarily spaced nodes.
    The result reproduces the derivative exactly for every polynomial of
    degree below ``len(nodes)``.
    """
    x = [float(v) for v in np.asarray(nodes, dtype=float).ravel()]
    n = len(x)
    if order < 0:
        raise InvalidParameterError("derivative order must be non-negative")
    if order >= n:
        raise InsufficientDataError(f"order {order} needs at least {order + 1} nodes, got {n}")
    if len(set(x)) != n:
        raise InvalidGridError("stencil nodes must be pairwise distinct")

    c = [[0.0] * (order + 1) for _ in range(n)]
    c[0][0] = 1.0
    c1 = 1.0
    c4 = x[0] - x0
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2
            for k in range(mn, 0, -1):
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3
            c[j][0] = c4 * c[j][0] / c3
        c1 = c2
    return np.array([row[order] for row in c])


def _stencil_nodes(i: int, T: int, size: int, order: int, boundary: str) -> np.ndarray:
    start = min(max(i - size // 2, 0), T - size)
    if boundary == "one-sided" or start == i - size // 2:
        return np.arange(start, start + size)
    # shrink: widest centred stencil that fits, one-sided minimum at the ends
    reach = min(i, T - 1 - i)
    if 2 * reach + 1 > order:
        return np.arange(i - reach, i + reach + 1)
    return np.arange(0, order + 1) if i < T - 1 - i else np.arange(T - order - 1, T)


def derivative_operator(times, stencil_size: int = DEFAULT_STENCIL, order: int = 1, boundary: str = "one-sided"):
    """
    Per-sample stencil indices and weights, shape ``(T, stencil_size)`` each.

    Stencils are centred where possible.  Near the ends, ``boundary`` picks
    either full-width one-sided stencils (``"one-sided"``, exact for
    polynomials below degree ``stencil_size``) or narrower centred stencils
    down to an ``order + 1``-point difference at the end samples
    (``"shrink"``, far less sensitive to sampling jitter).  Unused slots
    carry zero weight.
    """
    t = np.asarray(times, dtype=float)
    T = t.size
    if stencil_size < 2:
        raise InvalidParameterError("stencil_size must be at least 2")
    if boundary not in ("one-sided", "shrink"):
        raise InvalidParameterError(f"unknown boundary mode {boundary!r}")
    if T < stencil_size:
        raise InsufficientDataError(f"need at least {stencil_size} samples, got {T}")
    idx = np.empty((T, stencil_size), dtype=int)
    weights = np.zeros((T, stencil_size))
    for i in range(T):
        nodes = _stencil_nodes(i, T, stencil_size, order, boundary)
        idx[i, : nodes.size] = nodes
        idx[i, nodes.size :] = nodes[0]
        weights[i, : nodes.size] = fornberg_weights(t[nodes], t[i], order)
    return idx, weights


def differentiate_array(times, values, stencil_size: int = DEFAULT_STENCIL, boundary: str = "one-sided") -> np.ndarray:
    """First derivative of ``values`` (shape ``(T, ...)``) along axis 0."""
    idx, w = derivative_operator(times, stencil_size, boundary=boundary)
    v = np.asarray(values, dtype=float)
    return np.einsum("tk,tk...->t...", w, v[idx])


def differentiate_sequence(
    f: SampledFunction, stencil_size: int = DEFAULT_STENCIL, boundary: str = "one-sided"
) -> SampledFunction:
    return SampledFunction(f.times, differentiate_array(f.times, f.values, stencil_size, boundary), f.unit_normalized)


def cumulative_trapezoid(times, values) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    dt = np.diff(t).reshape((-1,) + (1,) * (v.ndim - 1))
    out = np.zeros_like(v)
    out[1:] = np.cumsum(0.5 * dt * (v[1:] + v[:-1]), axis=0)
    return out


def integrate_cumulative(f: SampledFunction) -> SampledFunction:
    """Running trapezoid integral, starting at zero."""
    return SampledFunction(f.times, cumulative_trapezoid(f.times, f.values), f.unit_normalized)


def _clamp(queries: np.ndarray, lo: float, hi: float, what: str) -> np.ndarray:
    tol = RANGE_TOL * max(1.0, abs(lo), abs(hi))
    if np.any(queries < lo - tol) or np.any(queries > hi + tol):
        warnings.warn(f"{what}: queries outside [{lo}, {hi}] were clamped", ClampWarning, stacklevel=3)
    return np.clip(queries, lo, hi)


def invert_monotone(F: SampledFunction, queries) -> np.ndarray:
    """
    Solve ``F(tau) = q`` for each query by piecewise-linear interpolation of
    the inverse.  Near-ties in ``F.values`` (within 1e-14) are merged first.
    """
    vals = np.asarray(F.values, dtype=float)
    if vals.ndim != 1:
        raise InversionError("can only invert scalar functions")
    steps = np.diff(vals)
    if np.any(steps < -TIE_TOL):
        bad = int(np.argmax(steps < -TIE_TOL)) + 1
        raise InversionError(f"function is not monotone (decreases at sample {bad})")
    keep = np.ones(vals.size, dtype=bool)
    keep[1:] = steps > TIE_TOL
    vals = vals[keep]
    times = F.times[keep]
    if vals.size < 2:
        raise InversionError("function is constant; inverse undefined")
    q = _clamp(np.asarray(queries, dtype=float), vals[0], vals[-1], "invert_monotone")
    return np.interp(q, vals, times)


def interpolate_scalar(f: SampledFunction, queries) -> np.ndarray:
    """Piecewise-linear lookup, exact at the nodes."""
    q = _clamp(np.asarray(queries, dtype=float), f.times[0], f.times[-1], "interpolate_scalar")
    vals = np.asarray(f.values, dtype=float)
    if vals.ndim == 1:
        return np.interp(q, f.times, vals)
    flat = vals.reshape(vals.shape[0], -1)
    out = np.stack([np.interp(q, f.times, col) for col in flat.T], axis=-1)
    return out.reshape(q.shape + vals.shape[1:])

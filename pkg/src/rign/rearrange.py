"""Non-increasing rearrangements of sampled functions.

The rearrangement ``u*`` of a grid function is an exact step function: every
cell contributes its volume as a width at the level ``|u|`` of that cell.
Everything downstream (Lorentz and Orlicz norms, ``u**``, Hardy-Littlewood-
Polya comparisons) is a quadrature against these steps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridFunction

__all__ = [
    "StepRearrangement",
    "rearrange",
    "rearrange_samples",
    "maximal_rearrangement",
    "maximal_majorant",
    "hlp_constant",
]


@dataclass(frozen=True, eq=False)
class StepRearrangement:
    """A non-increasing step function on ``(0, inf)``.

    On ``[t_{i-1}, t_i)`` the function equals ``values[i]`` where ``t_i`` are
    the cumulative ``widths``.  Beyond ``total_measure`` it equals
    ``tail / t``; ``tail == 0`` for genuine rearrangements and is only nonzero
    for the majorants of ``u**`` built by :func:`maximal_majorant`.
    """

    values: np.ndarray
    widths: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        w = np.asarray(self.widths, dtype=float).ravel()
        if v.shape != w.shape:
            raise ValueError("values and widths must have equal length")
        if np.any(v < 0) or np.any(~np.isfinite(v)):
            raise ValueError("values must be finite and nonnegative")
        if np.any(w <= 0) or np.any(~np.isfinite(w)):
            raise ValueError("widths must be finite and positive")
        if np.any(np.diff(v) > 0):
            raise ValueError("values must be non-increasing")
        if self.tail < 0:
            raise ValueError("tail must be nonnegative")
        v.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "widths", w)
        object.__setattr__(self, "breaks", np.cumsum(w))

    @classmethod
    def zero(cls) -> StepRearrangement:
        return cls(np.empty(0), np.empty(0))

    @classmethod
    def indicator(cls, measure: float, height: float = 1.0) -> StepRearrangement:
        return cls([height], [measure])

    @property
    def segments(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.widths.tolist()))

    @property
    def total_measure(self) -> float:
        return float(self.breaks[-1]) if self.values.size else 0.0

    @property
    def starts(self) -> np.ndarray:
        return np.concatenate(([0.0], self.breaks[:-1]))

    @property
    def is_zero(self) -> bool:
        return (self.values.size == 0 or self.values[0] == 0) and self.tail == 0

    @property
    def mass(self) -> float:
        """``int_0^T u*``; infinite when a hyperbolic tail is present."""
        if self.tail > 0:
            return np.inf
        return float(np.dot(self.values, self.widths))

    @property
    def sup(self) -> float:
        if self.values.size:
            return float(self.values[0])
        return 0.0

    def __call__(self, t):
        """Right-continuous evaluation ``u*(t)``."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breaks, t, side="right")
        padded = np.append(self.values, 0.0)
        out = padded[idx]
        if self.tail:
            beyond = idx == self.values.size
            out = np.where(beyond, self.tail / np.where(t > 0, t, 1.0), out)
        return out

    def integral(self, t):
        """Partial integrals ``int_0^t u*(s) ds``."""
        t = np.asarray(t, dtype=float)
        cum = np.concatenate(([0.0], np.cumsum(self.values * self.widths)))
        starts = np.concatenate(([0.0], self.breaks))
        idx = np.searchsorted(self.breaks, t, side="right")
        padded = np.append(self.values, 0.0)
        out = cum[idx] + padded[idx] * (t - starts[idx])
        if self.tail:
            beyond = idx == self.values.size
            T = self.total_measure
            ratio = np.where(beyond, t / T if T > 0 else 1.0, 1.0)
            out = out + np.where(beyond, self.tail * np.log(ratio), 0.0)
        return out

    def scaled(self, c: float) -> StepRearrangement:
        """Rearrangement of ``c u``."""
        c = abs(float(c))
        if c == 0:
            return StepRearrangement.zero()
        return StepRearrangement(self.values * c, self.widths, self.tail * c)

    def power(self, alpha: float) -> StepRearrangement:
        """Rearrangement of ``|u|^alpha``."""
        if self.tail:
            raise ValueError("power of a function with hyperbolic tail")
        return StepRearrangement(self.values**alpha, self.widths)

    def refine(self, breaks: np.ndarray) -> StepRearrangement:
        """Same function with additional (redundant) breakpoints."""
        if self.tail:
            raise ValueError("refine requires a finite step function")
        pts = np.union1d(self.breaks, breaks[(breaks > 0) & (breaks < self.total_measure)])
        mids = np.concatenate(([0.0], pts[:-1])) + np.diff(np.concatenate(([0.0], pts))) / 2
        return StepRearrangement(self(mids), np.diff(np.concatenate(([0.0], pts))))


def rearrange_samples(samples, cell_volume: float) -> StepRearrangement:
    """Rearrange an array of samples, each carrying measure ``cell_volume``.

    Equal magnitudes are merged on exact equality only; zero samples are
    dropped since they do not contribute to ``u*``.
    """
    a = np.abs(np.asarray(samples, dtype=float)).ravel()
    a = a[a > 0]
    if a.size == 0:
        return StepRearrangement.zero()
    levels, counts = np.unique(a, return_counts=True)
    return StepRearrangement(levels[::-1], counts[::-1] * float(cell_volume))


def rearrange(f: GridFunction) -> StepRearrangement:
    """Non-increasing rearrangement of ``|f|`` (Euclidean magnitude for tensors)."""
    return rearrange_samples(f.abs_values(), f.cell_volume)


def maximal_rearrangement(r: StepRearrangement, t):
    """``u**(t) = (1/t) int_0^t u*``; exact for step functions."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    return r.integral(t) / t


def maximal_majorant(r: StepRearrangement, points_per_segment: int = 16) -> StepRearrangement:
    """A step majorant of ``u**`` with the exact hyperbolic tail.

    Nodes are the breakpoints of ``r`` plus ``points_per_segment`` log-spaced
    interior points in every segment after the first (where ``u**`` is
    constant).  On each node interval the value at the left node is used,
    which dominates the non-increasing ``u**``.
    """
    if r.tail:
        raise ValueError("u** of a function with hyperbolic tail")
    if r.values.size == 0:
        return StepRearrangement.zero()
    starts = r.starts
    nodes = [r.breaks]
    if r.values.size > 1 and points_per_segment > 0:
        a = starts[1:, None]
        b = r.breaks[1:, None]
        frac = np.arange(1, points_per_segment + 1)[None, :] / (points_per_segment + 1)
        nodes.append((a * (b / a) ** frac).ravel())
    nodes = np.unique(np.concatenate(nodes))
    left = np.concatenate(([0.0], nodes[:-1]))
    values = np.empty(nodes.size)
    values[0] = r.values[0]
    values[1:] = maximal_rearrangement(r, left[1:])
    widths = np.diff(np.concatenate(([0.0], nodes)))
    keep = widths > 0
    values, widths = values[keep], widths[keep]
    # enforce monotonicity against rounding in the partial sums
    values = np.minimum.accumulate(values)
    return StepRearrangement(values, widths, tail=r.mass)


def hlp_constant(u: StepRearrangement, v: StepRearrangement) -> float:
    """Smallest ``C`` with ``int_0^t u* <= C int_0^t v*`` for all ``t > 0``.

    Both partial integrals are piecewise linear between the union of the
    breakpoints, so their ratio is monotone there and the supremum is attained
    at a breakpoint or in the limit ``t -> 0``.  A log-spaced refinement (64
    points per decade) is evaluated as well.
    """
    if v.is_zero:
        raise ValueError("v must not vanish identically")
    if u.is_zero:
        return 0.0
    best = u.sup / v.sup
    pts = np.union1d(u.breaks, v.breaks)
    lo, hi = pts[0], pts[-1]
    decades = max(np.log10(hi / lo), 1e-9)
    grid = np.logspace(np.log10(lo), np.log10(hi), int(np.ceil(64 * decades)) + 1)
    t = np.union1d(pts, grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = u.integral(t) / v.integral(t)
    if np.any(np.isnan(ratio)):
        return np.inf
    return float(max(best, ratio.max()))

"""Sampled functions on a uniform cubic grid and their derivative tensors.

A :class:`GridFunction` holds samples of a compactly supported function on the
box ``[-L, L]^n`` at the centres of ``res**n`` cubic cells.  Values may be
scalars or order-``j`` tensors (the ``n**j`` partial derivatives of order
``j``), stored in trailing axes of length ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "GridFunction",
    "Family",
    "SupportOverflowError",
    "ResolutionError",
    "gaussian_bump",
    "polynomial_bump",
    "sa_bump",
    "indicator",
    "sample",
    "zero_pad",
    "dilate",
    "derivative_tensor",
    "magnitude",
    "sa_bump_profile",
    "random_grid_function",
    "MARGIN",
]

#: Number of outer cell layers that must vanish for a sample to count as
#: compactly supported inside the box.
MARGIN = 2


class SupportOverflowError(ValueError):
    """The sampled function does not vanish on the outer layers of the box."""


class ResolutionError(ValueError):
    """The grid is too coarse for the requested derivative order."""


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a function on the cell centres of ``[-half_width, half_width]^dim``.

    ``values`` has shape ``(res,) * dim + (dim,) * order``; ``order == 0`` is a
    scalar field.  The array is made read-only on construction.
    """

    values: np.ndarray
    half_width: float
    dim: int
    order: int = 0
    strict: bool = field(default=True, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        expected_ndim = self.dim + self.order
        if values.ndim != expected_ndim:
            raise ValueError(
                f"values must have {expected_ndim} axes, got {values.ndim}")
        res = values.shape[0]
        if values.shape[: self.dim] != (res,) * self.dim:
            raise ValueError("grid axes must all have the same length")
        if values.shape[self.dim:] != (self.dim,) * self.order:
            raise ValueError("tensor axes must have length dim")
        if res < 8:
            raise ValueError("res must be at least 8")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if self.strict and np.any(_outer_layers(values, self.dim) != 0):
            raise SupportOverflowError(
                "function does not vanish on the outer "
                f"{MARGIN} cell layers of the box")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def res(self) -> int:
        return self.values.shape[0]

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.res

    @property
    def cell_volume(self) -> float:
        return (2.0 * self.half_width / self.res) ** self.dim

    @property
    def is_scalar(self) -> bool:
        return self.order == 0

    def axis(self) -> np.ndarray:
        """Cell-centre coordinates along one axis."""
        h = self.spacing
        return -self.half_width + (np.arange(self.res) + 0.5) * h

    def coordinates(self) -> np.ndarray:
        """Array of shape ``(res,)*dim + (dim,)`` with the cell centres."""
        return _cell_centres(self.dim, self.half_width, self.res)

    def abs_values(self) -> np.ndarray:
        """Pointwise magnitude as a plain array of shape ``(res,)*dim``."""
        if self.order == 0:
            return np.abs(self.values)
        flat = self.values.reshape(self.values.shape[: self.dim] + (-1,))
        return np.sqrt(np.sum(flat * flat, axis=-1))

    def with_values(self, values, order: int | None = None, strict=None) -> GridFunction:
        return GridFunction(
            values,
            self.half_width,
            self.dim,
            self.order if order is None else order,
            self.strict if strict is None else strict,
        )

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        _check_compatible(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        _check_compatible(self, other)
        return self.with_values(self.values - other.values)


def _check_compatible(f: GridFunction, g: GridFunction) -> None:
    if (f.dim, f.res, f.order) != (g.dim, g.res, g.order) or not math.isclose(
            f.half_width, g.half_width):
        raise ValueError("grid functions live on different grids")


def _outer_layers(values: np.ndarray, dim: int) -> np.ndarray:
    mask = np.zeros(values.shape[:dim], dtype=bool)
    for ax in range(dim):
        idx = [slice(None)] * dim
        idx[ax] = slice(0, MARGIN)
        mask[tuple(idx)] = True
        idx[ax] = slice(-MARGIN, None)
        mask[tuple(idx)] = True
    return values[mask]


def _cell_centres(dim: int, half_width: float, res: int) -> np.ndarray:
    h = 2.0 * half_width / res
    ax = -half_width + (np.arange(res) + 0.5) * h
    mesh = np.meshgrid(*([ax] * dim), indexing="ij")
    return np.stack(mesh, axis=-1)


# ---------------------------------------------------------------------------
# Closed-form test families


def sa_bump_profile(r, k: int):
    """Radial profile ``2 - r^k`` on ``r < 1``, ``(2 - r)^k`` on ``1 <= r <= 2``."""
    r = np.asarray(r, dtype=float)
    inner = 2.0 - r**k
    outer = np.clip(2.0 - r, 0.0, None) ** k
    return np.where(r < 1.0, inner, np.where(r <= 2.0, outer, 0.0))


def _mollifier(r):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = r < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
    return out


@dataclass(frozen=True)
class Family:
    """A closed-form compactly supported test function, possibly dilated.

    ``kind`` is one of ``gaussian_bump``, ``polynomial_bump``, ``sa_bump`` and
    ``indicator``.  ``scale`` is the accumulated dilation factor ``s`` of
    ``u(x) -> u(s x)``.
    """

    kind: str
    params: tuple = ()
    scale: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in _PROFILES:
            raise ValueError(f"unknown family {self.kind!r}")
        if not self.scale > 0:
            raise ValueError("dilation factor must be positive")

    @property
    def name(self) -> str:
        p = ",".join(f"{v:g}" for v in self.params)
        s = "" if self.scale == 1 else f"@s={self.scale:g}"
        return f"{self.kind}({p}){s}"

    def support_radius(self, dim: int) -> float:
        """Radius of a ball (about the origin) containing the support."""
        return _SUPPORT[self.kind](self.params, dim) / self.scale

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at points ``x`` of shape ``(..., dim)``."""
        x = np.asarray(x, dtype=float) * self.scale
        return self.amplitude * _PROFILES[self.kind](x, self.params)


def _radial(fn: Callable, width_index: int | None = 0):
    def evaluate(x, params):
        w = params[width_index] if width_index is not None else 1.0
        return fn(np.linalg.norm(x, axis=-1) / w, params)
    return evaluate


def _indicator_profile(x, params):
    (measure,) = params
    side = measure ** (1.0 / x.shape[-1])
    inside = np.all((x >= 0.0) & (x < side), axis=-1)
    return inside.astype(float)


_PROFILES = {
    "gaussian_bump": _radial(lambda r, p: _mollifier(r)),
    "polynomial_bump": _radial(
        lambda r, p: np.clip(1.0 - r**2, 0.0, None) ** (p[1] if len(p) > 1 else 6)),
    "sa_bump": _radial(lambda r, p: sa_bump_profile(r, int(p[0])), None),
    "indicator": _indicator_profile,
}

_SUPPORT = {
    "gaussian_bump": lambda p, n: p[0],
    "polynomial_bump": lambda p, n: p[0],
    "sa_bump": lambda p, n: 2.0,
    "indicator": lambda p, n: math.sqrt(n) * p[0] ** (1.0 / n),
}


def gaussian_bump(width: float = 1.0) -> Family:
    """Smooth bump ``exp(1 - 1/(1 - |x/w|^2))``; value 1 at the origin."""
    return Family("gaussian_bump", (float(width),))


def polynomial_bump(width: float = 1.0, power: int = 6) -> Family:
    """``(1 - |x/w|^2)_+^power``."""
    return Family("polynomial_bump", (float(width), float(power)))


def sa_bump(k: int) -> Family:
    """The three-piece radial bump used in the scaling argument."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    return Family("sa_bump", (int(k),))


def indicator(measure: float = 1.0) -> Family:
    """Indicator of the cube ``[0, measure**(1/n))^n``."""
    if measure <= 0:
        raise ValueError("measure must be positive")
    return Family("indicator", (float(measure),))


def dilate(spec: Family, s: float) -> Family:
    """Return the family member ``x -> u(s x)``."""
    if not s > 0:
        raise ValueError("dilation factor must be positive")
    return Family(spec.kind, spec.params, spec.scale * s, spec.amplitude)


def sample(spec: Family, dim: int, half_width: float, res: int) -> GridFunction:
    """Evaluate ``spec`` at the cell centres of the grid.

    Raises :class:`SupportOverflowError` when the (dilated) support reaches the
    outer :data:`MARGIN` layers of cells.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    x = _cell_centres(dim, half_width, res)
    values = spec(x)
    try:
        return GridFunction(values, half_width, dim)
    except SupportOverflowError as exc:
        raise SupportOverflowError(
            f"{spec.name} does not fit in the box of half-width {half_width:g} "
            f"at res {res}") from exc


def zero_pad(f: GridFunction, cells: int) -> GridFunction:
    """Extend ``f`` by ``cells`` zero layers on every side, keeping the spacing.

    The zero extension is the function itself, so norms and rearrangements are
    unchanged; the maximal function gains the room to decay outside the
    original box.
    """
    if cells < 0:
        raise ValueError("cells must be non-negative")
    widths = [(cells, cells)] * f.dim + [(0, 0)] * (f.values.ndim - f.dim)
    return GridFunction(np.pad(f.values, widths), f.half_width + cells * f.spacing, f.dim,
                        f.order, strict=False)


# ---------------------------------------------------------------------------
# Derivatives


def _central_difference(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    out = np.zeros_like(values)
    n = values.shape[axis]
    hi = [slice(None)] * values.ndim
    lo = [slice(None)] * values.ndim
    mid = [slice(None)] * values.ndim
    hi[axis] = slice(2, n)
    lo[axis] = slice(0, n - 2)
    mid[axis] = slice(1, n - 1)
    out[tuple(mid)] = (values[tuple(hi)] - values[tuple(lo)]) / (2.0 * h)
    return out


def derivative_tensor(f: GridFunction, j: int) -> GridFunction:
    """All order-``j`` partial derivatives by iterated central differences.

    The result has ``order == j``; entry ``[..., a1, ..., aj]`` approximates
    ``d^j f / dx_a1 ... dx_aj``.  Each differencing pass zeroes the outermost
    cell layer.
    """
    if not f.is_scalar:
        raise ValueError("derivative_tensor expects a scalar-valued function")
    if j < 1:
        raise ValueError("j must be >= 1")
    if 2 * j >= f.res:
        raise ResolutionError(f"res={f.res} too coarse for j={j}")
    h = f.spacing
    values = f.values
    for _ in range(j):
        values = np.stack(
            [_central_difference(values, ax, h) for ax in range(f.dim)], axis=-1)
    return GridFunction(values, f.half_width, f.dim, order=j, strict=False)


def magnitude(f: GridFunction) -> GridFunction:
    """Pointwise Euclidean norm over all tensor entries."""
    return GridFunction(f.abs_values(), f.half_width, f.dim, 0, strict=False)


def random_grid_function(rng: np.random.Generator, res: int = 256, dim: int = 1,
                         half_width: float = 1.0, levels: int | None = None,
                         zero_fraction: float = 0.3) -> GridFunction:
    """A random step function on the grid with vanishing outer layers.

    With ``levels`` set, values are drawn from ``levels`` distinct magnitudes
    so that ties (equal levels on several cells) occur.
    """
    shape = (res,) * dim
    if levels:
        table = rng.lognormal(0.0, 1.0, size=levels)
        values = table[rng.integers(0, levels, size=shape)]
    else:
        values = rng.lognormal(0.0, 1.0, size=shape)
    values = values * (rng.random(shape) >= zero_fraction)
    values *= rng.choice([-1.0, 1.0], size=shape)
    inner = (slice(MARGIN, res - MARGIN),) * dim
    out = np.zeros(shape)
    out[inner] = values[inner]
    return GridFunction(out, half_width, dim)

"""Discrete uncentred cubic Hardy-Littlewood maximal operator."""

from __future__ import annotations

import itertools

import numpy as np
from scipy.ndimage import maximum_filter

from .grid import GridFunction
from .rearrange import maximal_rearrangement, rearrange

__all__ = ["maximal_operator", "riesz_herz_curve", "riesz_herz_ratio", "default_t_grid"]


def _summed_area_table(a: np.ndarray) -> np.ndarray:
    sat = np.pad(a, [(1, 0)] * a.ndim)
    for ax in range(a.ndim):
        sat = np.cumsum(sat, axis=ax)
    return sat


def _cube_sums(sat: np.ndarray, side: int) -> np.ndarray:
    """Sums over all cubes of ``side`` cells lying inside the box, by corner index."""
    dim = sat.ndim
    m = sat.shape[0] - 1
    count = m - side + 1
    out = np.zeros((count,) * dim)
    for corner in itertools.product((0, 1), repeat=dim):
        idx = tuple(slice(side, side + count) if c else slice(0, count) for c in corner)
        sign = (-1) ** (dim - sum(corner))
        out += sign * sat[idx]
    return out


def maximal_operator(f: GridFunction) -> GridFunction:
    """``Mf(x) = sup_{Q ni x} |Q|^{-1} int_Q |f|`` over discrete cubes inside the box.

    Cubes are unions of ``side**dim`` cells, ``side = 1..res``, at every
    position that contains the cell and fits in the box.  Averages come from
    an ``n``-dimensional summed-area table; the sup over positions is a
    trailing window maximum per scale.
    """
    a = f.abs_values()
    m = f.res
    dim = f.dim
    sat = _summed_area_table(a)
    best = a.copy()
    for side in range(2, m + 1):
        avg = np.maximum(_cube_sums(sat, side), 0.0) / side**dim
        padded = np.full((m,) * dim, -np.inf)
        padded[(slice(0, m - side + 1),) * dim] = avg
        # window over corners [x - side + 1, x] along every axis
        win = maximum_filter(padded, size=side, origin=(side - 1) // 2,
                             mode="constant", cval=-np.inf)
        np.maximum(best, win, out=best)
    return GridFunction(best, f.half_width, dim, 0, strict=False)


def default_t_grid(measure: float, per_decade: int = 64, lo: float = 1e-3, hi: float = 1e2):
    """Log-spaced ``t`` over ``(lo, hi) * measure``."""
    decades = np.log10(hi / lo)
    return measure * np.logspace(np.log10(lo), np.log10(hi), int(per_decade * decades) + 1)


def riesz_herz_curve(f: GridFunction, t_grid=None, Mf: GridFunction | None = None,
                     window: float = 2.0):
    """``(t, u**(t) / (Mu)*(t))`` for ``t`` in ``t_grid`` below ``window`` times the support measure.

    ``t`` is also kept below the box volume, beyond which the discrete
    ``(Mu)*`` vanishes; a wider window therefore needs a wider box.
    """
    r = rearrange(f)
    if r.is_zero:
        raise ValueError("riesz_herz_ratio needs a nonzero function")
    m = rearrange(maximal_operator(f) if Mf is None else Mf)
    T = r.total_measure
    t = default_t_grid(T) if t_grid is None else np.asarray(t_grid, float)
    box = (2.0 * f.half_width) ** f.dim
    t = t[(t > 0) & (t < min(window * T, box))]
    return t, maximal_rearrangement(r, t) / m(t)


def riesz_herz_ratio(f: GridFunction, t_grid=None, Mf: GridFunction | None = None,
                     window: float = 2.0):
    """``(c_min, c_max)`` of ``u**/(Mu)*`` over ``t_grid`` restricted as in :func:`riesz_herz_curve`."""
    _, ratio = riesz_herz_curve(f, t_grid, Mf, window)
    return float(ratio.min()), float(ratio.max())

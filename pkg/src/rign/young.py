"""Young functions: evaluation, inversion and asymptotic exponents.

Four forms are supported:

``power(p)``          ``t**p`` with ``p > 1``
``power_log(p, a)``   ``t**p * log(e + t)**a`` with ``p > 1``
``composed(A, alpha)`` ``A(t**alpha)`` (the generator of a convexified space)
``tabulated(t, A)``   piecewise power law through the knots, extended by the
                      end exponents

For the parametric forms the behaviour ``A(t) ~ c t**e |log t|**l`` at both
ends is known exactly and exposed by :meth:`YoungFunction.asymptotics`; it is
what decides whether ratios of inverses stay bounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "YoungFunction",
    "power",
    "power_log",
    "composed",
    "tabulated",
    "young_inverse",
    "bisect_inverse",
    "check_young",
    "T_MIN",
    "T_MAX",
    "NotYoungError",
]

T_MIN = 1e-12
T_MAX = 1e12


class NotYoungError(ValueError):
    """A generator failed one of the Young-function axioms; ``failures`` names them."""

    def __init__(self, name: str, failures: list):
        super().__init__(f"{name} is not a Young function: fails {', '.join(failures)}")
        self.failures = list(failures)


@dataclass(frozen=True)
class YoungFunction:
    form: str
    params: tuple

    def __post_init__(self):
        if self.form == "power":
            (p,) = self.params
            if not p > 1:
                raise ValueError(f"power exponent must exceed 1, got {p}")
        elif self.form == "power_log":
            p, a = self.params
            if not p > 1:
                raise ValueError(f"power_log exponent must exceed 1, got {p}")
        elif self.form == "composed":
            base, alpha = self.params
            if not isinstance(base, YoungFunction) or not alpha > 0:
                raise ValueError("composed needs a YoungFunction and alpha > 0")
        elif self.form == "tabulated":
            t, y = self.params
            if len(t) < 2 or len(t) != len(y):
                raise ValueError("tabulated needs at least two knots")
            if np.any(np.diff(t) <= 0) or np.any(np.diff(y) <= 0) or min(t) <= 0 or min(y) <= 0:
                raise ValueError("tabulated knots must be positive and increasing")
        else:
            raise ValueError(f"unknown Young function form {self.form!r}")
        if self.form != "power":
            failures = [k for k, ok in check_young(self).items() if not ok]
            if failures:
                raise NotYoungError(str(self), failures)

    # -- evaluation -------------------------------------------------------

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            if self.form == "power":
                return t ** self.params[0]
            if self.form == "power_log":
                p, a = self.params
                return t**p * np.log(np.e + t) ** a
            if self.form == "composed":
                base, alpha = self.params
                return base(t**alpha)
            return self._tabulated(t)

    def _tabulated(self, t):
        lt, ly, slopes = self._log_knots()
        x = np.log(np.where(t > 0, t, 1.0))
        i = np.clip(np.searchsorted(lt, x, side="right") - 1, 0, lt.size - 2)
        # extrapolate with the end exponents
        e = np.where(x < lt[0], slopes[0], np.where(x > lt[-1], slopes[-1], slopes[i]))
        anchor = np.where(x < lt[0], 0, np.where(x > lt[-1], lt.size - 1, i))
        out = np.exp(ly[anchor] + e * (x - lt[anchor]))
        return np.where(t > 0, out, 0.0)

    def _log_knots(self):
        t, y = self.params
        lt, ly = np.log(np.asarray(t, float)), np.log(np.asarray(y, float))
        return lt, ly, np.diff(ly) / np.diff(lt)

    def inverse(self, y):
        """``A^{-1}(y)``; see :func:`young_inverse`."""
        return young_inverse(self, y)

    # -- structure --------------------------------------------------------

    def asymptotics(self):
        """Exponents ``(e, l)`` with ``A(t) ~ c t**e |log t|**l`` as ``t -> 0`` and ``t -> inf``.

        Returns ``{"zero": (e, l), "inf": (e, l)}`` or ``None`` for tabulated
        generators, whose tails are only known through the end exponents.
        """
        if self.form == "power":
            p = float(self.params[0])
            return {"zero": (p, 0.0), "inf": (p, 0.0)}
        if self.form == "power_log":
            p, a = map(float, self.params)
            return {"zero": (p, 0.0), "inf": (p, a)}
        if self.form == "composed":
            base, alpha = self.params
            inner = base.asymptotics()
            if inner is None:
                return None
            return {end: (alpha * e, l) for end, (e, l) in inner.items()}
        return None

    def inverse_asymptotics(self):
        """Exponents of ``A^{-1}(y) ~ c y**e |log y|**l`` at ``y -> 0`` and ``y -> inf``."""
        asym = self.asymptotics()
        if asym is None:
            return None
        return {end: (1.0 / e, -l / e) for end, (e, l) in asym.items()}

    @property
    def heuristic(self) -> bool:
        """True when tail behaviour is extrapolated rather than known in closed form."""
        return self.asymptotics() is None

    def __str__(self):
        if self.form == "power":
            return f"pow:{self.params[0]:g}"
        if self.form == "power_log":
            return f"plog:{self.params[0]:g},{self.params[1]:g}"
        if self.form == "composed":
            return f"comp:{self.params[0]}:{self.params[1]:g}"
        t, y = self.params
        return "tab:" + ";".join(f"{a:g}/{b:g}" for a, b in zip(t, y))


def power(p: float) -> YoungFunction:
    return YoungFunction("power", (float(p),))


def power_log(p: float, a: float) -> YoungFunction:
    return YoungFunction("power_log", (float(p), float(a)))


def composed(base: YoungFunction, alpha: float) -> YoungFunction:
    """``t -> base(t**alpha)``, simplified for powers and nested compositions."""
    alpha = float(alpha)
    if alpha == 1.0:
        return base
    if base.form == "power":
        return power(base.params[0] * alpha)
    if base.form == "composed":
        return composed(base.params[0], base.params[1] * alpha)
    return YoungFunction("composed", (base, alpha))


def tabulated(t, values) -> YoungFunction:
    return YoungFunction("tabulated", (tuple(map(float, t)), tuple(map(float, values))))


# ---------------------------------------------------------------------------
# Inversion


def bisect_inverse(fn, y, guess=None, rtol: float = 1e-12, max_iter: int = 200):
    """Solve ``fn(t) = y`` for increasing ``fn`` by bisection in ``log t``.

    Works elementwise on arrays.  ``guess`` seeds the bracket search.
    """
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    if np.any(y <= 0) or np.any(~np.isfinite(y)):
        raise ValueError("y must be positive and finite")
    lo = np.ones_like(y) if guess is None else np.atleast_1d(np.asarray(guess, float)).copy()
    lo = np.broadcast_to(lo, y.shape).copy()
    hi = lo.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(2000):
            low = fn(lo) > y
            if not np.any(low):
                break
            lo[low] *= 0.5
        for _ in range(2000):
            high = fn(hi) < y
            if not np.any(high):
                break
            hi[high] *= 2.0
        llo, lhi = np.log(lo), np.log(hi)
        for _ in range(max_iter):
            mid = 0.5 * (llo + lhi)
            below = fn(np.exp(mid)) < y
            llo = np.where(below, mid, llo)
            lhi = np.where(below, lhi, mid)
            if np.all(lhi - llo <= rtol):
                break
    out = np.exp(0.5 * (llo + lhi))
    return out[0] if scalar else out


def young_inverse(A: YoungFunction, y):
    """Inverse ``A^{-1}(y)`` for ``y > 0``.

    Closed forms are used for powers, compositions and tabulated generators;
    power-log generators go through :func:`bisect_inverse` (relative tolerance
    1e-12 in ``t``).
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0) or np.any(~np.isfinite(y)):
        raise ValueError("young_inverse is defined for finite y > 0")
    if A.form == "power":
        return y ** (1.0 / A.params[0])
    if A.form == "composed":
        base, alpha = A.params
        return young_inverse(base, y) ** (1.0 / alpha)
    if A.form == "tabulated":
        lt, ly, slopes = A._log_knots()
        x = np.log(y)
        i = np.clip(np.searchsorted(ly, x, side="right") - 1, 0, ly.size - 2)
        e = np.where(x < ly[0], slopes[0], np.where(x > ly[-1], slopes[-1], slopes[i]))
        anchor = np.where(x < ly[0], 0, np.where(x > ly[-1], ly.size - 1, i))
        return np.exp(lt[anchor] + (x - ly[anchor]) / e)
    p = A.params[0]
    return bisect_inverse(A, y, guess=y ** (1.0 / p))


# ---------------------------------------------------------------------------
# Validation


def check_young(A: YoungFunction, points: int = 128) -> dict:
    """Numerical and structural checks of the Young-function axioms.

    ``increasing`` and ``convex`` (midpoint test between neighbours) are
    checked on a ``points``-long log-grid over ``[T_MIN, T_MAX]``.  The limits
    ``A(t)/t -> 0`` and ``-> inf`` are decided from the asymptotic exponents
    when known, and from the proxies ``A(T_MAX)/T_MAX > 1e3 A(1)`` and
    ``A(T_MIN)/T_MIN < 1e-3 A(1)`` otherwise.
    """
    t = np.logspace(np.log10(T_MIN), np.log10(T_MAX), points)
    with np.errstate(over="ignore", invalid="ignore"):
        a = A(t)
        mid = A(0.5 * (t[1:] + t[:-1]))
    # compare only representable values (no underflow to 0, no overflow)
    finite = np.isfinite(a) & (a > 0)
    increasing = bool(np.all(np.diff(a[finite]) > 0)) and float(A(0.0)) == 0.0
    chord = 0.5 * (a[1:] + a[:-1])
    ok = np.isfinite(chord) & np.isfinite(mid)
    convex = bool(np.all(mid[ok] <= chord[ok] * (1 + 1e-12)))
    asym = A.asymptotics()
    if asym is not None:
        e0, l0 = asym["zero"]
        ei, li = asym["inf"]
        sub = e0 > 1 or (e0 == 1 and l0 > 0)
        sup = ei > 1 or (ei == 1 and li > 0)
    else:
        a1 = float(A(1.0))
        sup = bool(float(A(T_MAX)) / T_MAX > 1e3 * a1)
        sub = bool(float(A(T_MIN)) / T_MIN < 1e-3 * a1)
    return {"increasing": increasing, "convex": convex,
            "superlinear": bool(sup), "sublinear_at_zero": bool(sub)}

"""Rearrangement-invariant spaces: Lebesgue, Lorentz and Orlicz.

All norms are evaluated on a :class:`~rign.rearrange.StepRearrangement`, so
rearrangement invariance is structural.  Lorentz functionals use exact
power-function antiderivatives on every segment; Orlicz norms solve for the
Luxemburg level by bracketing root finding on the modular.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from . import young as yf
from .rearrange import StepRearrangement
from .tails import Tail
from .young import YoungFunction

__all__ = [
    "SpaceSpec",
    "Lebesgue",
    "Lorentz",
    "Orlicz",
    "SpaceParseError",
    "parse_space",
    "lorentz_norm",
    "orlicz_modular",
    "luxemburg_norm",
    "fundamental_function",
    "fundamental_tail",
    "convexify",
    "space_norm",
    "upper_index_estimate",
    "dilation_index",
]

INF = math.inf


class SpaceParseError(ValueError):
    """Malformed space string; ``field`` names the offending component."""

    def __init__(self, text: str, field: str, message: str):
        super().__init__(f"cannot parse space {text!r}: {field}: {message}")
        self.text = text
        self.field = field


@dataclass(frozen=True)
class SpaceSpec:
    """``kind`` is ``"lebesgue"``, ``"lorentz"`` or ``"orlicz"``.

    Lebesgue spaces carry their exponent in ``P`` (and ``p == P``); Lorentz
    spaces carry the primary exponent ``P`` and secondary ``p``; Orlicz spaces
    carry the Young function ``A``.
    """

    kind: str
    P: float | None = None
    p: float | None = None
    A: YoungFunction | None = None

    def __post_init__(self):
        if self.kind == "lebesgue":
            if not (self.P is not None and self.P >= 1):
                raise ValueError(f"Lebesgue exponent must be in [1, inf], got {self.P}")
            object.__setattr__(self, "p", self.P)
        elif self.kind == "lorentz":
            if self.P is None or self.p is None:
                raise ValueError("Lorentz space needs P and p")
            if not 1 <= self.P <= INF or not 1 <= self.p <= INF:
                raise ValueError(f"Lorentz exponents must be >= 1, got ({self.P}, {self.p})")
            if self.P == INF and self.p != INF:
                raise ValueError("Lorentz(inf, p) is only allowed with p = inf")
        elif self.kind == "orlicz":
            if not isinstance(self.A, YoungFunction):
                raise ValueError("Orlicz space needs a YoungFunction")
        else:
            raise ValueError(f"unknown space kind {self.kind!r}")

    @property
    def is_orlicz(self) -> bool:
        return self.kind == "orlicz"

    def __str__(self):
        if self.kind == "lebesgue":
            return f"Lp:{_fmt(self.P)}"
        if self.kind == "lorentz":
            return f"Lor:{_fmt(self.P)},{_fmt(self.p)}"
        return f"Orl:{self.A}"


def _fmt(x: float) -> str:
    return "inf" if x == INF else f"{x:g}"


def Lebesgue(p: float) -> SpaceSpec:
    return SpaceSpec("lebesgue", P=float(p))


def Lorentz(P: float, p: float) -> SpaceSpec:
    return SpaceSpec("lorentz", P=float(P), p=float(p))


def Orlicz(A: YoungFunction) -> SpaceSpec:
    return SpaceSpec("orlicz", A=A)


# ---------------------------------------------------------------------------
# Parsing


def _number(text: str, field: str, token: str) -> float:
    token = token.strip()
    if token.lower() in ("inf", "infinity", "oo"):
        return INF
    try:
        value = float(token)
    except ValueError:
        raise SpaceParseError(text, field, f"expected a number, got {token!r}") from None
    if "/" in token:
        raise SpaceParseError(text, field, f"expected a number, got {token!r}")
    return value


def _parse_young(text: str, parts: list[str]) -> YoungFunction:
    if not parts:
        raise SpaceParseError(text, "young", "missing Young function form")
    form, rest = parts[0], parts[1:]
    try:
        if form == "pow":
            if len(rest) != 1:
                raise SpaceParseError(text, "pow.p", "expected 'pow:p'")
            return yf.power(_number(text, "pow.p", rest[0]))
        if form == "plog":
            if len(rest) != 1 or len(rest[0].split(",")) != 2:
                raise SpaceParseError(text, "plog.a", "expected 'plog:p,a'")
            p, a = rest[0].split(",")
            return yf.power_log(_number(text, "plog.p", p), _number(text, "plog.a", a))
        if form == "comp":
            if len(rest) < 2:
                raise SpaceParseError(text, "comp.alpha", "expected 'comp:<young>:alpha'")
            base = _parse_young(text, rest[:-1])
            return yf.composed(base, _number(text, "comp.alpha", rest[-1]))
        if form == "tab":
            if len(rest) != 1:
                raise SpaceParseError(text, "tab.knots", "expected 'tab:t1/A1;t2/A2;...'")
            knots = [k.split("/") for k in rest[0].split(";") if k]
            if any(len(k) != 2 for k in knots):
                raise SpaceParseError(text, "tab.knots", "each knot must be 't/A'")
            return yf.tabulated([float(a) for a, _ in knots], [float(b) for _, b in knots])
    except (SpaceParseError, yf.NotYoungError):
        raise
    except ValueError as exc:
        raise SpaceParseError(text, form, str(exc)) from None
    raise SpaceParseError(text, "young", f"unknown form {form!r}")


def parse_space(text: str) -> SpaceSpec:
    """Parse the textual space form, e.g. ``Lp:2``, ``Lor:2,1``, ``Orl:plog:2,1``."""
    parts = [s.strip() for s in re.split(r":", text.strip())]
    head, rest = parts[0], parts[1:]
    try:
        if head == "Lp":
            if len(rest) != 1:
                raise SpaceParseError(text, "Lp.p", "expected 'Lp:p'")
            return Lebesgue(_number(text, "Lp.p", rest[0]))
        if head == "Lor":
            if len(rest) != 1:
                raise SpaceParseError(text, "Lor.P", "expected 'Lor:P,p'")
            fields = rest[0].split(",")
            if len(fields) != 2:
                raise SpaceParseError(text, "Lor.p", "missing secondary exponent (expected 'Lor:P,p')")
            return Lorentz(_number(text, "Lor.P", fields[0]), _number(text, "Lor.p", fields[1]))
        if head == "Orl":
            return Orlicz(_parse_young(text, rest))
    except (SpaceParseError, yf.NotYoungError):
        raise
    except ValueError as exc:
        raise SpaceParseError(text, head, str(exc)) from None
    raise SpaceParseError(text, "kind", f"unknown space kind {head!r} (use Lp, Lor or Orl)")


# ---------------------------------------------------------------------------
# Norms


def _segment_weights(r: StepRearrangement, a: float) -> np.ndarray:
    """``int_{t_{i-1}}^{t_i} s**(a-1) ds`` for each segment, ``a > 0``."""
    starts = r.starts
    out = np.empty(r.values.size)
    first = starts == 0
    out[first] = r.breaks[first] ** a / a
    s = starts[~first]
    w = r.widths[~first]
    out[~first] = s**a * np.expm1(a * np.log1p(w / s)) / a
    return out


def lorentz_norm(r: StepRearrangement, P: float, p: float) -> float:
    """``(p/P)**(1/p) || t**(1/P - 1/p) u*(t) ||_{L^p(0, inf)}``.

    The factor ``(p/P)**(1/p)`` makes ``||chi_E|| = |E|**(1/P)`` exactly, so
    the fundamental function is ``t**(1/P)`` for every ``p``.  ``P == inf`` (only with ``p == inf``) gives the essential supremum.  A
    hyperbolic tail ``m/t`` beyond the last segment is integrated in closed
    form; it is infinite when ``P == 1`` and ``p < inf``.
    """
    if not (1 <= P <= INF and 1 <= p <= INF):
        raise ValueError("Lorentz exponents must be >= 1")
    if r.is_zero:
        return 0.0
    scale = max(r.sup, r.tail / r.total_measure if r.tail else 0.0)
    v = r.values / scale
    m = r.tail / scale
    T = r.total_measure
    if P == INF:
        return scale * max(r.sup / scale, m / T if m else 0.0)
    if p == INF:
        body = float(np.max(v * r.breaks ** (1.0 / P))) if v.size else 0.0
        tail = 0.0
        if m:
            tail = m if P == 1 else m * T ** (1.0 / P - 1.0)
        return scale * max(body, tail)
    a = p / P
    body = float(np.dot(v**p, _segment_weights(r, a)))
    tail = 0.0
    if m:
        if P == 1:
            return INF
        tail = m**p * T ** (a - p) / (p - a)
    return scale * (a * (body + tail)) ** (1.0 / p)


def _tail_modular(A: YoungFunction, m: float, T: float) -> float:
    """``int_T^inf A(m/t) dt = m int_0^{m/T} A(y)/y**2 dy``."""
    if m == 0:
        return 0.0
    top = m / T
    if A.form == "power":
        p = A.params[0]
        return m * top ** (p - 1) / (p - 1)
    lt = math.log(top)

    def integrand(x):
        y = math.exp(x)
        return float(A(y)) / y if y > 0 else 0.0

    val, _ = integrate.quad(integrand, -np.inf, lt, limit=200, epsabs=0, epsrel=1e-12)
    return m * val


def orlicz_modular(r: StepRearrangement, A: YoungFunction) -> float:
    """``rho_A(u) = sum_i A(u_i) |E_i|`` (plus the tail integral, if any)."""
    if r.is_zero:
        return 0.0
    with np.errstate(over="ignore"):
        body = float(np.dot(A(r.values), r.widths))
    tail = _tail_modular(A, r.tail, r.total_measure) if r.tail else 0.0
    return body + tail


def luxemburg_norm(r: StepRearrangement, A: YoungFunction) -> float:
    """``inf{lam > 0 : rho_A(u/lam) <= 1}``, relative accuracy ~1e-13."""
    if r.is_zero:
        return 0.0

    def excess(log_lam):
        lam = math.exp(log_lam)
        rho = orlicz_modular(r.scaled(1.0 / lam), A)
        if rho == 0:
            return -INF
        return math.log(rho) if math.isfinite(rho) else INF

    guess = math.log(max(r.sup, 1e-300))
    lo = hi = guess
    for _ in range(400):
        if excess(hi) <= 0:
            break
        hi += 2.0
    else:
        raise ArithmeticError("failed to bracket the Luxemburg norm from above")
    for _ in range(400):
        if excess(lo) >= 0:
            break
        lo -= 2.0
    else:
        raise ArithmeticError("failed to bracket the Luxemburg norm from below")
    if lo == hi:
        return math.exp(lo)
    root = optimize.brentq(excess, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)
    return math.exp(root)


def space_norm(r: StepRearrangement, space: SpaceSpec) -> float:
    """Norm of the function with rearrangement ``r`` in ``space``."""
    if space.kind == "orlicz":
        return luxemburg_norm(r, space.A)
    return lorentz_norm(r, space.P, space.p)


def fundamental_function(space: SpaceSpec, t):
    """``phi_X(t) = ||chi_E||_X`` for ``|E| = t``."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    if space.kind == "orlicz":
        return 1.0 / yf.young_inverse(space.A, 1.0 / t)
    if space.P == INF:
        return np.ones_like(t)
    return t ** (1.0 / space.P)


def fundamental_tail(space: SpaceSpec) -> Tail | None:
    """Exponents of ``phi_X(t) ~ t**e |log t|**l`` at both ends, when known."""
    if space.kind != "orlicz":
        e = 0.0 if space.P == INF else 1.0 / space.P
        return {"zero": (e, 0.0), "inf": (e, 0.0)}
    inv = space.A.inverse_asymptotics()
    if inv is None:
        return None
    # phi(t) = 1 / A^{-1}(1/t): t -> 0 probes A^{-1} at infinity and vice versa
    return {"zero": inv["inf"], "inf": inv["zero"]}


def convexify(space: SpaceSpec, alpha: float) -> SpaceSpec:
    """The ``alpha``-convexification ``X**alpha`` with ``||u|| = || |u|**alpha ||_X**(1/alpha)``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if space.kind == "lebesgue":
        if alpha * space.P < 1:
            raise ValueError(f"convexification {space}^{alpha:g} is not a valid space")
        return Lebesgue(alpha * space.P)
    if space.kind == "lorentz":
        if alpha * space.P < 1 or alpha * space.p < 1:
            raise ValueError(f"convexification {space}^{alpha:g} is not a valid space")
        return Lorentz(alpha * space.P, alpha * space.p)
    try:
        return Orlicz(yf.composed(space.A, alpha))
    except ValueError as exc:
        raise ValueError(f"convexification {space}^{alpha:g} is not a valid space: {exc}") from None


def dilation_index(A: YoungFunction, points: int = 256) -> float:
    """Numerical upper dilation index of ``phi(t) = 1/A^{-1}(1/t)``.

    ``h(s) = max_t phi(s t)/phi(t)`` over a ``points``-long log-grid of ``t`` in
    ``[1e-12, 1e12]``; the estimate is ``max_s log h(s) / log s`` over
    ``s = 2**2, 2**4, ..., 2**20``.  Exact for powers.  Logarithmic factors
    bias it upward and the bias decays only like ``log log s / log s``.
    """
    t = np.logspace(-12, 12, points)
    space = Orlicz(A)
    phi_t = fundamental_function(space, t)
    best = -INF
    for k in range(2, 21, 2):
        s = 2.0**k
        h = float(np.max(fundamental_function(space, s * t) / phi_t))
        best = max(best, math.log(h) / math.log(s))
    return best


def upper_index_estimate(A: YoungFunction, points: int = 256) -> float:
    """Upper Boyd index of ``L^A`` over ``R^n``.

    For generators with known tail exponents ``A(t) ~ t**e |log t|**l`` the
    index is ``max(1/e_zero, 1/e_inf)`` (logarithmic factors do not move
    it).  Tabulated generators fall back to :func:`dilation_index`.
    """
    asym = A.asymptotics()
    if asym is None:
        return dilation_index(A, points)
    return max(1.0 / asym["zero"][0], 1.0 / asym["inf"][0])

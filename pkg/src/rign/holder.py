"""Hoelder factorization: Lorentz exponent arithmetic, saturating partners,
multiplier-norm lower bounds and the Orlicz factorization conditions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import tails
from .grid import GridFunction, random_grid_function
from .rearrange import rearrange
from .spaces import (INF, Lorentz, Orlicz, SpaceSpec, fundamental_function,
                     fundamental_tail, space_norm)
from .young import YoungFunction, young_inverse

__all__ = [
    "InfeasibleExponents",
    "LorentzFactorization",
    "lorentz_factor",
    "holder_check",
    "lorentz_saturator",
    "local_embedding_proxy",
    "multiplier_norm_estimate",
    "OrliczFactorReport",
    "orlicz_factor_check",
    "inverse_ratio",
]


class InfeasibleExponents(ValueError):
    """No multiplier exponents ``Q, q >= 1`` exist for the requested pair."""


def _inv(x: float) -> float:
    return 0.0 if x == INF else 1.0 / x


def _from_inv(y: float) -> float:
    return INF if abs(y) <= 1e-15 else 1.0 / y


@dataclass(frozen=True)
class LorentzFactorization:
    """``L^{Q,q} = (L^{R,r})^{L^{P,p}}``: ``1/P = 1/R + 1/Q`` and ``1/p = 1/r + 1/q``."""

    P: float
    p: float
    R: float
    r: float
    Q: float
    q: float

    def recombine(self) -> tuple[float, float]:
        return (_from_inv(_inv(self.R) + _inv(self.Q)),
                _from_inv(_inv(self.r) + _inv(self.q)))


def lorentz_factor(P: float, p: float, R: float, r: float) -> LorentzFactorization:
    """Exponents of the multiplier space of ``L^{R,r}`` into ``L^{P,p}``."""
    dQ = _inv(P) - _inv(R)
    dq = _inv(p) - _inv(r)
    if dQ <= 1e-15:
        raise InfeasibleExponents(f"1/P = {_inv(P):g} must exceed 1/R = {_inv(R):g}")
    if dq < -1e-15:
        raise InfeasibleExponents(f"1/p = {_inv(p):g} must be at least 1/r = {_inv(r):g}")
    Q, q = 1.0 / dQ, _from_inv(dq)
    if Q < 1 or q < 1:
        raise InfeasibleExponents(f"multiplier exponents ({Q:g}, {q:g}) fall below 1")
    return LorentzFactorization(P, p, R, r, Q, q)


def _product(f: GridFunction, g: GridFunction) -> GridFunction:
    return GridFunction(f.abs_values() * g.abs_values(), f.half_width, f.dim, 0, strict=False)


def holder_check(f: GridFunction, g: GridFunction, X: SpaceSpec, Y: SpaceSpec,
                 Z: SpaceSpec) -> float:
    """``||fg||_X / (||f||_Y ||g||_Z)``.

    Raises ``ZeroDivisionError`` if a right-hand norm vanishes while the
    product does not, which cannot happen for genuine function norms.
    """
    lhs = space_norm(rearrange(_product(f, g)), X)
    den = space_norm(rearrange(f), Y) * space_norm(rearrange(g), Z)
    if den == 0:
        if lhs == 0:
            return 0.0
        raise ZeroDivisionError("right-hand norm vanished with nonzero product")
    return lhs / den


def _rank_order(f: GridFunction) -> np.ndarray:
    """Flat cell indices sorted by ``|f|`` descending, ties by cell index."""
    a = f.abs_values().ravel()
    return np.argsort(-a, kind="stable")


def _interval_weights(starts, ends, a):
    """``int_s^e x**(a-1) dx`` per interval."""
    out = np.empty_like(ends)
    first = starts == 0
    out[first] = ends[first] ** a / a
    s = starts[~first]
    out[~first] = s**a * np.expm1(a * np.log1p((ends[~first] - s) / s)) / a
    return out


def _pooled_optimum(a: np.ndarray, b: np.ndarray, gap: float) -> np.ndarray:
    """Non-increasing maximiser of ``sum a g**p`` on ``sum b g**q = const``.

    Each cell alone would take ``(a/b)**(1/gap)``, ``gap = q - p``.  In the
    variable ``x = g**q`` the objective is separable and concave, so pooling
    adjacent violators gives the constrained optimum: a merged block takes
    ``(sum a / sum b)**(1/gap)``.  Returned up to a positive factor.
    """
    scale = a.max()
    blocks_a, blocks_b, sizes = [], [], []
    for ai, bi in zip(a / scale, b):
        blocks_a.append(ai)
        blocks_b.append(bi)
        sizes.append(1)
        while len(sizes) > 1 and blocks_a[-1] / blocks_b[-1] > blocks_a[-2] / blocks_b[-2]:
            ai, bi, n = blocks_a.pop(), blocks_b.pop(), sizes.pop()
            blocks_a[-1] += ai
            blocks_b[-1] += bi
            sizes[-1] += n
    level = np.log(np.array(blocks_a) / np.array(blocks_b)) / gap
    return np.repeat(np.exp(level - level.max()), sizes)


def lorentz_saturator(f: GridFunction, P: float, p: float, R: float, r: float) -> GridFunction:
    """A partner ``g`` saturating ``||fg||_{P,p} <= ||f||_{R,r} ||g||_{Q,q}``.

    ``g`` is placed by the rank of ``|f|`` (ties by cell index), so
    ``(fg)* = f* g*`` on the grid.  On the cell occupying ``(s0, s1)`` of the
    rearranged axis its value is

        ``g = (f^p W / V) ** (1/(q - p))``,
        ``W = int s**(p/P - 1)``, ``V = int s**(q/Q - 1)``,

    the maximiser of ``||fg||_{P,p}`` at fixed ``||g||_{Q,q}`` for a single
    cell; adjacent cells whose values would increase along the ranking are
    pooled, which makes ``g`` the exact maximiser among non-increasing step
    partners.  For fine cells this follows the profile
    ``g*(s) ~ f*(s)**(r/q) s**(r/(q R) - 1/Q)`` wherever that decreases; when
    ``P/p = R/r`` it is exactly ``f**(r/q)`` and the inequality becomes an
    equality.
    """
    if p == INF or r == INF:
        raise InfeasibleExponents("saturator defined only for finite p and r")
    fac = lorentz_factor(P, p, R, r)
    Q, q = fac.Q, fac.q
    order = _rank_order(f)
    a = f.abs_values().ravel()[order]
    n = int(np.count_nonzero(a))
    if n == 0:
        raise ValueError("saturator needs a nonzero f")
    h = f.cell_volume
    ends = h * np.arange(1, n + 1, dtype=float)
    starts = ends - h
    starts[0] = 0.0
    fa = a[:n] / a[0]
    if q == INF:
        # sup constraint s**(1/Q) g*(s) <= 1 is tight at each right endpoint
        vals = ends ** (-1.0 / Q)
    else:
        W = _interval_weights(starts, ends, p / P)
        V = _interval_weights(starts, ends, q / Q)
        vals = _pooled_optimum(fa**p * W, V, q - p)
    g = np.zeros(a.size)
    g[order[:n]] = vals
    return GridFunction(g.reshape(f.abs_values().shape), f.half_width, f.dim, 0, strict=False)


def local_embedding_proxy(Y: SpaceSpec, X: SpaceSpec, t_lo: float = 1e-6):
    """``sup_{t <= 1} phi_X(t) / phi_Y(t)``; infinite when the ratio blows up as ``t -> 0``.

    Necessary for ``Y -> X`` locally, and sufficient for the implemented
    families.  Returns ``(sup, method)``.
    """
    t = np.logspace(math.log10(t_lo), 0.0, 257)
    ratio = fundamental_function(X, t) / fundamental_function(Y, t)
    tail = tails.combine((fundamental_tail(X), 1.0), (fundamental_tail(Y), -1.0))
    if tail is not None:
        bad = "zero" in tails.divergent_ends(tail)
        method = "proxy:asymptotic"
    else:
        bad = "zero" in tails.numeric_divergence(t, ratio)
        method = "proxy:heuristic"
    return (INF if bad else float(ratio.max())), method


def _aligned(f: GridFunction, profile: np.ndarray) -> GridFunction:
    """Place a non-increasing profile (one value per cell) by the rank of ``|f|``."""
    order = _rank_order(f)
    g = np.zeros(order.size)
    g[order[: profile.size]] = profile
    return GridFunction(g.reshape(f.abs_values().shape), f.half_width, f.dim, 0, strict=False)


@dataclass
class MultiplierEstimate:
    value: float
    best_candidate: str
    embedding_proxy: float
    method: str
    candidates: dict = field(default_factory=dict)


def multiplier_norm_estimate(f: GridFunction, X: SpaceSpec, Y: SpaceSpec,
                             n_indicators: int = 24,
                             betas=(0.1, 0.25, 0.5, 0.75, 0.9)) -> MultiplierEstimate:
    """Certified lower bound for ``||f||_{Y^X} = sup_{||g||_Y <= 1} ||fg||_X``.

    Candidates ``g`` are rank-aligned with ``f``: indicator profiles of
    log-spaced measures, truncated powers ``s**(-beta)``, and the Lorentz
    saturator when both spaces are Lorentz.  Returns an infinite value when
    the local-embedding proxy for ``Y -> X`` fails.
    """
    proxy, method = local_embedding_proxy(Y, X)
    if not math.isfinite(proxy):
        return MultiplierEstimate(INF, "embedding proxy fails", proxy, method)
    total = f.res**f.dim
    h = f.cell_volume
    candidates = {}
    counts = np.unique(np.geomspace(1, total, n_indicators).astype(int))
    for c in counts:
        candidates[f"chi(0,{c * h:g})"] = _aligned(f, np.ones(c))
    s = h * (np.arange(total) + 0.5)
    for beta in betas:
        for c in counts[:: max(1, counts.size // 6)]:
            candidates[f"s^-{beta:g} on (0,{c * h:g})"] = _aligned(f, s[:c] ** (-beta))
    if X.kind in ("lorentz", "lebesgue") and Y.kind in ("lorentz", "lebesgue"):
        try:
            fac = lorentz_factor(X.P, X.p, Y.P, Y.p)
            candidates["saturator"] = lorentz_saturator(f, X.P, X.p, fac.Q, fac.q)
        except (InfeasibleExponents, ValueError):
            pass
    values = {}
    for name, g in candidates.items():
        den = space_norm(rearrange(g), Y)
        if den > 0:
            values[name] = space_norm(rearrange(_product(f, g)), X) / den
    best = max(values, key=values.get)
    return MultiplierEstimate(values[best], best, proxy, method, values)


# ---------------------------------------------------------------------------
# Orlicz factorization


def inverse_ratio(A: YoungFunction, B: YoungFunction, C: YoungFunction, t,
                  b_exp: float = 1.0, c_exp: float = 1.0):
    """``B^{-1}(t)**b_exp C^{-1}(t)**c_exp / A^{-1}(t)``."""
    t = np.asarray(t, float)
    return (young_inverse(B, t) ** b_exp * young_inverse(C, t) ** c_exp
            / young_inverse(A, t))


def inverse_ratio_sup(A, B, C, b_exp=1.0, c_exp=1.0, points=512):
    """Grid sup of :func:`inverse_ratio` on ``[1e-12, 1e12]`` refined near the maximiser.

    Returns ``(sup, verdict)`` where ``verdict`` is a
    :class:`~rign.tails.DivergenceVerdict`; ``sup`` is infinite when the ratio
    is unbounded.
    """
    t = np.logspace(-12, 12, points)
    ratio = inverse_ratio(A, B, C, t, b_exp, c_exp)
    tail = tails.combine((B.inverse_asymptotics(), b_exp), (C.inverse_asymptotics(), c_exp),
                         (A.inverse_asymptotics(), -1.0))
    verdict = tails.decide(t, ratio, tail)
    if not verdict.bounded:
        return INF, verdict
    i = int(np.argmax(ratio))
    lo = math.log(t[max(i - 1, 0)])
    hi = math.log(t[min(i + 1, t.size - 1)])
    best = float(ratio[i])
    if hi > lo:
        res = optimize.minimize_scalar(
            lambda x: -float(inverse_ratio(A, B, C, math.exp(x), b_exp, c_exp)),
            bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
        best = max(best, -float(res.fun))
    verdict.sup = best
    return best, verdict


@dataclass
class OrliczFactorReport:
    """Checks of the three equivalent Orlicz factorization conditions."""

    K_iii: float
    bounded: bool
    ii_max: float
    ii_pass: bool
    ratio_i: float
    i_pass: bool
    compat_K: float
    divergence: dict

    @property
    def marker(self) -> str | None:
        return None if self.bounded else "unbounded"

    def to_dict(self) -> dict:
        return {"K_iii": self.K_iii, "bounded": self.bounded, "ii_max": self.ii_max,
                "ii_pass": self.ii_pass, "ratio_i": self.ratio_i, "i_pass": self.i_pass,
                "compat_K": self.compat_K, "marker": self.marker,
                "divergence": self.divergence}


def orlicz_factor_check(A: YoungFunction, B: YoungFunction, C: YoungFunction,
                        pairs: int = 50, seed: int = 0, delta: float = 1.0,
                        res: int = 128) -> OrliczFactorReport:
    """Test ``C^{-1} B^{-1} <= K A^{-1}``, ``A(st/K) <= B(s) + C(t)`` and the Hoelder bound.

    * ``K_iii``: sup of ``C^{-1}(t) B^{-1}(t) / A^{-1}(t)`` (512-point log-grid,
      refined at the maximiser); infinite when unbounded.
    * ``ii``: ``max A(st/K) / (B(s) + C(t))`` over a 64x64 grid of ``(s, t)``
      with ``B(s), C(t)`` in ``[1e-10, 1e11]`` and ``K = K_iii``.
    * ``ratio_i``: largest ``||fg||_A / (||f||_B ||g||_C)`` over ``pairs``
      random step functions, to be compared with ``2 K_iii``.
    * ``compat_K``: ``sup_{t > delta} B^{-1}(A(t)) / t``, the constant of
      ``A(t) <= B(K t)``.
    """
    K, verdict = inverse_ratio_sup(A, B, C)
    tt = np.logspace(math.log10(delta), 12, 256)
    compat = float(np.max(young_inverse(B, A(tt)) / tt))
    if not math.isfinite(K):
        return OrliczFactorReport(INF, False, INF, False, INF, False, compat, verdict.to_dict())
    levels = np.logspace(-10, 11, 64)
    s = young_inverse(B, levels)[:, None]
    t = young_inverse(C, levels)[None, :]
    ii = A(s * t / K) / (B(s) + C(t))
    ii_max = float(np.max(ii))
    rng = np.random.default_rng(seed)
    X, Y, Z = Orlicz(A), Orlicz(B), Orlicz(C)
    ratio_i = 0.0
    for _ in range(pairs):
        f = random_grid_function(rng, res=res)
        g = random_grid_function(rng, res=res)
        ratio_i = max(ratio_i, holder_check(f, g, X, Y, Z))
    return OrliczFactorReport(K, True, ii_max, ii_max <= 1 + 1e-9, ratio_i,
                              ratio_i <= 2 * K * (1 + 1e-6), compat, verdict.to_dict())

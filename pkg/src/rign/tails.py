"""Boundedness decisions for ratios of power-log tails.

Ratios of fundamental functions or of Young-function inverses behave like
``t**e * |log t|**l`` near ``0`` and near ``inf``.  When those exponents are
known in closed form the ratio is bounded on ``(0, inf)`` iff neither end
blows up; otherwise a grid-based heuristic is used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Tail", "combine", "divergent_ends", "fit_slope", "numeric_divergence",
           "DivergenceVerdict", "decide", "GROWTH_FACTOR", "GROWTH_DECADES"]

#: Growth a sampled ratio must show over ``GROWTH_DECADES`` to be declared divergent.
GROWTH_FACTOR = 100.0
GROWTH_DECADES = 4.0

_EXP_TOL = 1e-12

Tail = dict  # {"zero": (e, l), "inf": (e, l)}


def combine(*terms) -> Tail | None:
    """Tail exponents of ``prod_i f_i**c_i`` given ``(tail_i, c_i)`` pairs."""
    out = {"zero": [0.0, 0.0], "inf": [0.0, 0.0]}
    for tail, c in terms:
        if tail is None:
            return None
        for end in out:
            e, l = tail[end]
            out[end][0] += c * e
            out[end][1] += c * l
    return {end: (e, l) for end, (e, l) in out.items()}


def divergent_ends(tail: Tail) -> list[str]:
    """Ends (``"zero"``/``"inf"``) at which ``t**e |log t|**l`` is unbounded."""
    ends = []
    e, l = tail["zero"]
    if e < -_EXP_TOL or (abs(e) <= _EXP_TOL and l > _EXP_TOL):
        ends.append("zero")
    e, l = tail["inf"]
    if e > _EXP_TOL or (abs(e) <= _EXP_TOL and l > _EXP_TOL):
        ends.append("inf")
    return ends


def fit_slope(t, ratio, end: str, decades: float = GROWTH_DECADES) -> float:
    """Least-squares log-log slope of ``ratio`` over the last ``decades`` at ``end``."""
    lt = np.log10(np.asarray(t, float))
    lr = np.log10(np.asarray(ratio, float))
    mask = lt <= lt.min() + decades if end == "zero" else lt >= lt.max() - decades
    mask &= np.isfinite(lr)
    if mask.sum() < 2:
        return 0.0
    return float(np.polyfit(lt[mask], lr[mask], 1)[0])


def numeric_divergence(t, ratio, growth: float = GROWTH_FACTOR,
                       decades: float = GROWTH_DECADES) -> list[str]:
    """Ends toward which the sampled ratio grows by ``growth`` within ``decades``.

    The ratio must also increase monotonically toward that end over the
    window; slowly varying (logarithmic) growth is deliberately not flagged.
    """
    t = np.asarray(t, float)
    r = np.asarray(ratio, float)
    order = np.argsort(t)
    t, r = t[order], r[order]
    lt = np.log10(t)
    ends = []
    if np.any(~np.isfinite(r)):
        bad = ~np.isfinite(r)
        if bad[0]:
            ends.append("zero")
        if bad[-1]:
            ends.append("inf")
        return ends
    for end in ("zero", "inf"):
        if end == "zero":
            w = lt <= lt[0] + decades
            seg = r[w][::-1]
        else:
            w = lt >= lt[-1] - decades
            seg = r[w]
        if seg.size < 2 or seg[0] <= 0:
            continue
        monotone = np.all(np.diff(seg) >= -1e-12 * np.abs(seg[1:]))
        if monotone and seg[-1] / seg[0] >= growth:
            ends.append(end)
    return ends


@dataclass
class DivergenceVerdict:
    """Outcome of a boundedness test on a ratio curve."""

    bounded: bool
    sup: float
    witness: list
    slopes: dict
    method: str

    def to_dict(self) -> dict:
        return {"bounded": self.bounded, "sup": self.sup, "witness": self.witness,
                "slopes": self.slopes, "method": self.method}


def decide(t, ratio, tail: Tail | None) -> DivergenceVerdict:
    """Combine closed-form tail exponents (when known) with the sampled curve."""
    t = np.asarray(t, float)
    ratio = np.asarray(ratio, float)
    slopes = {end: fit_slope(t, ratio, end) for end in ("zero", "inf")}
    if tail is not None:
        witness = divergent_ends(tail)
        method = "asymptotic"
    else:
        witness = numeric_divergence(t, ratio)
        method = "heuristic"
    sup = float(np.max(ratio)) if not witness else float("inf")
    return DivergenceVerdict(not witness, sup, witness, slopes, method)

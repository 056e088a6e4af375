"""Dilation tests: the fundamental-function necessary condition and falsification
of Gagliardo-Nirenberg inequalities for incompatible space triples."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import tails
from .gn import GNProblem, best_constant_scan
from .grid import sa_bump
from .spaces import SpaceSpec, fundamental_function, fundamental_tail

__all__ = [
    "NecessaryResult",
    "necessary_condition",
    "ball_volume",
    "bump_norm_closed_forms",
    "FalsifyResult",
    "falsify",
]


@dataclass
class NecessaryResult:
    t: np.ndarray
    ratio: np.ndarray
    verdict: tails.DivergenceVerdict

    @property
    def sup(self) -> float:
        return self.verdict.sup

    @property
    def holds(self) -> bool:
        return self.verdict.bounded


def _gnnc_tail(X, Y, Z, theta):
    return tails.combine((fundamental_tail(X), 1.0), (fundamental_tail(Y), -theta),
                         (fundamental_tail(Z), -(1.0 - theta)))


def necessary_condition(X: SpaceSpec, Y: SpaceSpec, Z: SpaceSpec, j: int, k: int,
                        t_grid=None) -> NecessaryResult:
    """``phi_X(t) / (phi_Y(t)^(j/k) phi_Z(t)^(1-j/k))`` on ``t_grid``.

    The default grid has 64 points per decade over ``(1e-6, 1e6)``.  The
    sup is infinite when the ratio is unbounded at either end, decided from
    the tail exponents when known and by the growth heuristic otherwise.
    """
    theta = j / k
    t = np.logspace(-6, 6, 769) if t_grid is None else np.asarray(t_grid, float)
    ratio = (fundamental_function(X, t)
             / (fundamental_function(Y, t) ** theta * fundamental_function(Z, t) ** (1 - theta)))
    return NecessaryResult(t, ratio, tails.decide(t, ratio, _gnnc_tail(X, Y, Z, theta)))


def ball_volume(dim: int) -> float:
    """Volume of the unit ball in ``R^dim``; 2 for ``dim = 1``."""
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1)


def bump_norm_closed_forms(s, space: SpaceSpec, level: int, dim: int = 1):
    """``s**level * phi(|B(0, 2/s)|)``, the size of ``grad^level`` of the dilated bump.

    Equivalent to the actual norm up to constants independent of ``s``.
    """
    s = np.asarray(s, float)
    measure = ball_volume(dim) * (2.0 / s) ** dim
    return s**level * fundamental_function(space, measure)


@dataclass
class FalsifyResult:
    s: np.ndarray
    analytic: np.ndarray
    empirical: np.ndarray | None
    verdict: str
    witness: list
    slopes: dict
    method: str

    @property
    def band(self) -> float:
        """Spread ``max/min`` of ``empirical / analytic`` over ``s``."""
        if self.empirical is None:
            return math.nan
        q = self.empirical / self.analytic
        return float(q.max() / q.min())

    def growth(self, decades: float = tails.GROWTH_DECADES) -> float:
        """Largest factor by which the analytic curve grows toward one end within ``decades``."""
        ls = np.log10(self.s)
        lo = self.analytic[ls <= ls.min() + decades]
        hi = self.analytic[ls >= ls.max() - decades]
        return float(max(lo[0] / lo[-1], hi[-1] / hi[0]))

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "witness": self.witness, "slopes": self.slopes,
                "method": self.method, "band": self.band, "growth": self.growth(),
                "s": self.s.tolist(), "analytic": self.analytic.tolist(),
                "empirical": None if self.empirical is None else self.empirical.tolist()}


def falsify(X: SpaceSpec, Y: SpaceSpec, Z: SpaceSpec, j: int, k: int, s_values=None,
            dim: int = 1, res: int = 512, empirical: bool = True) -> FalsifyResult:
    """Test the inequality on ``u(s x)`` for the three-piece bump.

    The analytic curve is ``s^j phi_X / ((s^k phi_Y)^(j/k) phi_Z^(1-j/k))`` at
    measure ``|B(0, 2/s)|``.  The empirical curve evaluates the plain ratio
    on the sampled bump in a box rescaled with ``s``.  The verdict is
    ``"falsified"`` when the analytic curve is unbounded as ``s -> 0`` or
    ``s -> inf``; witnesses name that direction and ``slopes`` hold the fitted
    log-log slope at each end.
    """
    theta = j / k
    s = np.logspace(-2, 2, 33) if s_values is None else np.asarray(s_values, float)
    lhs = bump_norm_closed_forms(s, X, j, dim)
    rhs = (bump_norm_closed_forms(s, Y, k, dim) ** theta
           * bump_norm_closed_forms(s, Z, 0, dim) ** (1 - theta))
    analytic = lhs / rhs
    # measure ~ s^-dim, so the measure tail at inf drives s -> 0 and vice versa
    mtail = _gnnc_tail(X, Y, Z, theta)
    stail = None
    if mtail is not None:
        stail = {"zero": (-dim * mtail["inf"][0], mtail["inf"][1]),
                 "inf": (-dim * mtail["zero"][0], mtail["zero"][1])}
    v = tails.decide(s, analytic, stail)
    emp = None
    if empirical:
        problem = GNProblem(j, k, X, Y, Z, [sa_bump(k)], dim=dim, res=res, mode="ribfs")
        emp = best_constant_scan(problem, s, box="rescaled", starred=False).best
    witness = [f"s->{'0' if end == 'zero' else 'inf'}" for end in v.witness]
    return FalsifyResult(s, analytic, emp, "consistent" if v.bounded else "falsified",
                         witness, v.slopes, v.method)

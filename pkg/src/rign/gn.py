"""Numerical verification of Gagliardo-Nirenberg inequalities on test families.

Three modes share one evaluation core:

``ribfs``    ``||grad^j u||_X <= C ||(grad^k u)**||_Y^(j/k) ||u**||_Z^(1-j/k)``
             with ``Z`` supplied by the user as the multiplier-space stand-in
``lorentz``  plain Lorentz norms under the exponent balance
``orlicz``   ``**`` form for Young triples satisfying the inverse condition,
             plus the plain form when both upper indices are below one

Every ratio is evaluated at the requested resolution and once more at twice
that resolution; a verdict passes when the worst ratio is finite and moves by
at most :data:`STABILITY_TOL` under the refinement.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .grid import (Family, GridFunction, derivative_tensor, dilate, magnitude, sample)
from .holder import inverse_ratio_sup, local_embedding_proxy
from .maximal import maximal_operator
from .rearrange import maximal_majorant, rearrange
from .spaces import INF, SpaceSpec, convexify, space_norm, upper_index_estimate

__all__ = [
    "GNProblem",
    "FunctionRecord",
    "VerificationReport",
    "HypothesisError",
    "ExponentBalanceError",
    "mazya_ratio",
    "gn_terms",
    "verify_ribfs",
    "verify_lorentz",
    "verify_orlicz",
    "verify",
    "best_constant_scan",
    "ScanResult",
    "proof_chain",
    "STABILITY_TOL",
    "MAZYA_FLOOR",
    "CFO_LIMIT",
    "BALANCE_TOL",
]

#: Largest relative change of the best constant allowed under one doubling of ``res``.
STABILITY_TOL = 0.2
#: Cells with ``Mu <= MAZYA_FLOOR * sup|u|`` are left out of the pointwise sup.
MAZYA_FLOOR = 1e-12
#: A finite-grid inverse-ratio sup above this counts as divergent.
CFO_LIMIT = 1e6
BALANCE_TOL = 1e-12
MODES = ("ribfs", "lorentz", "orlicz")


class HypothesisError(ValueError):
    """The local embedding ``Y^(k/j) -> X`` fails its fundamental-function proxy."""


class ExponentBalanceError(ValueError):
    """The Lorentz exponents do not satisfy the balance ``1/P = (j/k)/R + (1-j/k)/Q``."""


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GN_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    items = list(items)
    n = min(_threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Problem and report types


@dataclass
class GNProblem:
    """One verification task.

    ``half_width`` defaults to 1.5 times the largest support radius in the
    family, so every member vanishes well inside the box.
    """

    j: int
    k: int
    X: SpaceSpec
    Y: SpaceSpec
    Z: SpaceSpec
    families: list
    dim: int = 1
    res: int = 512
    half_width: float | None = None
    mode: str = "ribfs"

    def __post_init__(self):
        if not (isinstance(self.j, int) and isinstance(self.k, int) and 1 <= self.j < self.k <= 4):
            raise ValueError(f"need integers 1 <= j < k <= 4, got j={self.j}, k={self.k}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.families:
            raise ValueError("family list is empty")
        if self.half_width is None:
            self.half_width = 1.5 * max(f.support_radius(self.dim) for f in self.families)

    @property
    def theta(self) -> float:
        return self.j / self.k

    def describe(self) -> dict:
        return {"mode": self.mode, "j": self.j, "k": self.k, "X": str(self.X),
                "Y": str(self.Y), "Z": str(self.Z),
                "families": [f.name for f in self.families], "dim": self.dim,
                "res": self.res, "half_width": self.half_width}


@dataclass
class FunctionRecord:
    name: str
    lhs: float
    rhs: float
    ratio: float
    ratio_refined: float


@dataclass
class VerificationReport:
    """Per-function ratios, the best constant and the stability verdict."""

    mode: str
    records: list
    best_constant: float
    best_constant_refined: float
    verdict: str
    marker: str | None = None
    metadata: dict = field(default_factory=dict)
    sub_reports: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass" and all(r.passed for r in self.sub_reports.values())

    def to_dict(self) -> dict:
        return {"mode": self.mode, "verdict": self.verdict, "marker": self.marker,
                "best_constant": self.best_constant,
                "best_constant_refined": self.best_constant_refined,
                "records": [asdict(r) for r in self.records],
                "metadata": self.metadata,
                "sub_reports": {k: v.to_dict() for k, v in self.sub_reports.items()}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_default)

    def to_text(self) -> str:
        lines = [f"mode: {self.mode}", f"verdict: {self.verdict}"]
        if self.marker:
            lines.append(f"marker: {self.marker}")
        lines.append(f"best constant: {self.best_constant:.6g} "
                     f"(refined {self.best_constant_refined:.6g})")
        if self.records:
            width = max(len(r.name) for r in self.records)
            lines.append(f"{'function':<{width}}  {'lhs':>12}  {'rhs':>12}  "
                         f"{'ratio':>12}  {'refined':>12}")
            for r in self.records:
                lines.append(f"{r.name:<{width}}  {r.lhs:12.6g}  {r.rhs:12.6g}  "
                             f"{r.ratio:12.6g}  {r.ratio_refined:12.6g}")
        for name, sub in self.sub_reports.items():
            lines.append("")
            lines.append(f"[{name}]")
            lines.append(sub.to_text())
        return "\n".join(lines)


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


# ---------------------------------------------------------------------------
# Pointwise estimate


def mazya_ratio(u: GridFunction, j: int, k: int) -> float:
    """``sup |grad^j u| / (M(grad^k u)^(j/k) (Mu)^(1-j/k))`` over cells above the floor.

    Cells where ``Mu <= MAZYA_FLOOR * sup|u|`` are skipped.  Returns 0 for
    ``u == 0``.
    """
    if not 1 <= j < k:
        raise ValueError("need 1 <= j < k")
    a = u.abs_values()
    top = float(a.max())
    if top == 0:
        return 0.0
    theta = j / k
    dj = derivative_tensor(u, j).abs_values()
    mk = maximal_operator(magnitude(derivative_tensor(u, k))).values
    mu = maximal_operator(u).values
    mask = mu > MAZYA_FLOOR * top
    den = mk[mask] ** theta * mu[mask] ** (1 - theta)
    num = dj[mask]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(den > 0, num / den, np.where(num > 0, INF, 0.0))
    return float(ratio.max()) if ratio.size else 0.0


# ---------------------------------------------------------------------------
# Two sides of the inequality


def _norm(f: GridFunction, space: SpaceSpec, starred: bool) -> float:
    r = rearrange(f)
    if starred:
        r = maximal_majorant(r)
    return space_norm(r, space)


def gn_terms(u: GridFunction, j: int, k: int, X: SpaceSpec, Y: SpaceSpec, Z: SpaceSpec,
             starred: bool):
    """``(lhs, rhs)`` for one sampled function.

    ``starred`` replaces ``grad^k u`` and ``u`` on the right by step majorants
    of their maximal rearrangements.
    """
    theta = j / k
    lhs = space_norm(rearrange(magnitude(derivative_tensor(u, j))), X)
    yk = _norm(magnitude(derivative_tensor(u, k)), Y, starred)
    zu = _norm(u, Z, starred)
    rhs = yk**theta * zu ** (1 - theta)
    return lhs, rhs


def _ratio(lhs: float, rhs: float) -> float:
    if rhs == 0:
        return 0.0 if lhs == 0 else INF
    return lhs / rhs


def _evaluate(problem: GNProblem, family: Family, res: int, starred: bool,
              half_width: float | None = None):
    u = sample(family, problem.dim, problem.half_width if half_width is None else half_width, res)
    lhs, rhs = gn_terms(u, problem.j, problem.k, problem.X, problem.Y, problem.Z, starred)
    return lhs, rhs, _ratio(lhs, rhs)


def _report(problem: GNProblem, starred: bool, label: str, extra: dict | None = None):
    def run(fam):
        lhs, rhs, ratio = _evaluate(problem, fam, problem.res, starred)
        _, _, refined = _evaluate(problem, fam, 2 * problem.res, starred)
        return FunctionRecord(fam.name, lhs, rhs, ratio, refined)

    records = _pmap(run, problem.families)
    best = max(r.ratio for r in records)
    best2 = max(r.ratio_refined for r in records)
    stable = (math.isfinite(best) and math.isfinite(best2)
              and (best == best2 or abs(best2 / best - 1) <= STABILITY_TOL))
    meta = {"problem": problem.describe(), "form": label, "version": __version__,
            "tolerances": {"stability": STABILITY_TOL, "mazya_floor": MAZYA_FLOOR,
                           "cfo_limit": CFO_LIMIT, "balance": BALANCE_TOL}}
    if extra:
        meta.update(extra)
    return VerificationReport(problem.mode, records, best, best2,
                              "pass" if stable else "fail", None, meta)


# ---------------------------------------------------------------------------
# Verification modes


def verify_ribfs(problem: GNProblem) -> VerificationReport:
    """General rearrangement-invariant form with ``**`` norms.

    ``problem.Z`` is the space in which ``u**`` is measured, raised to the
    power ``1 - j/k`` on the right-hand side.  The hypothesis
    ``Y^(k/j) -> X`` locally is tested with the fundamental-function proxy
    and raises :class:`HypothesisError` when it fails.
    """
    Yc = convexify(problem.Y, problem.k / problem.j)
    proxy, method = local_embedding_proxy(Yc, problem.X)
    if not math.isfinite(proxy):
        raise HypothesisError(
            f"local embedding {Yc} -> {problem.X} fails: "
            f"phi_X/phi_Y^(k/j) is unbounded as t -> 0 ({method})")
    return _report(problem, True, "starred",
                   {"embedding_proxy": proxy, "embedding_method": method})


def _balanced(problem: GNProblem) -> None:
    X, Y, Z = problem.X, problem.Y, problem.Z
    if any(s.kind == "orlicz" for s in (X, Y, Z)):
        raise ExponentBalanceError("lorentz mode needs Lebesgue or Lorentz spaces")
    if not (X.P > 1 and Y.P > 1 and Z.P > 1):
        raise ExponentBalanceError("lorentz mode needs P, Q, R > 1")
    th = problem.theta
    inv = lambda x: 0.0 if x == INF else 1.0 / x  # noqa: E731
    for lhs, r, q, name in ((X.P, Y.P, Z.P, "1/P = (j/k)/R + (1-j/k)/Q"),
                            (X.p, Y.p, Z.p, "1/p = (j/k)/r + (1-j/k)/q")):
        if abs(inv(lhs) - th * inv(r) - (1 - th) * inv(q)) > BALANCE_TOL:
            raise ExponentBalanceError(f"exponent balance violated: {name}")


def verify_lorentz(problem: GNProblem) -> VerificationReport:
    """Plain Lorentz norms on both sides; requires the two balance equations."""
    _balanced(problem)
    return _report(problem, False, "plain")


def verify_orlicz(problem: GNProblem) -> VerificationReport:
    """Young triple ``X = L^A, Y = L^B, Z = L^C``.

    The inverse condition ``B^-1(t)^(j/k) C^-1(t)^(1-j/k) <= K A^-1(t)`` is
    checked first; when it diverges (or ``K > CFO_LIMIT``) the report fails
    with marker ``"CFO divergent"``.  Otherwise the ``**`` report is always
    produced and the plain one only when both upper indices are below one.
    """
    X, Y, Z = problem.X, problem.Y, problem.Z
    if not all(s.kind == "orlicz" for s in (X, Y, Z)):
        raise ValueError("orlicz mode needs three Orlicz spaces")
    th = problem.theta
    K, verdict = inverse_ratio_sup(X.A, Y.A, Z.A, th, 1 - th)
    cfo = {"K_cfo": K, "cfo": verdict.to_dict()}
    if not math.isfinite(K) or K > CFO_LIMIT:
        meta = {"problem": problem.describe(), "version": __version__, **cfo}
        return VerificationReport(problem.mode, [], INF, INF, "fail", "CFO divergent", meta)
    starred = _report(problem, True, "starred", cfo)
    ib, ic = upper_index_estimate(Y.A), upper_index_estimate(Z.A)
    starred.metadata["upper_index"] = {"B": ib, "C": ic}
    if ib < 1 and ic < 1:
        starred.sub_reports["plain"] = _report(problem, False, "plain", cfo)
    return starred


def verify(problem: GNProblem) -> VerificationReport:
    return {"ribfs": verify_ribfs, "lorentz": verify_lorentz,
            "orlicz": verify_orlicz}[problem.mode](problem)


# ---------------------------------------------------------------------------
# Dilation scans


@dataclass
class ScanResult:
    s: np.ndarray
    ratios: dict  # family name -> array over s
    box: str

    @property
    def best(self) -> np.ndarray:
        return np.max(np.vstack(list(self.ratios.values())), axis=0)

    @property
    def max(self) -> float:
        return float(self.best.max())

    @property
    def min(self) -> float:
        return float(self.best.min())

    @property
    def flatness(self) -> float:
        """``max / min`` of the best-constant curve over ``s``."""
        return self.max / self.min if self.min > 0 else INF


def best_constant_scan(problem: GNProblem, s_values, box: str = "fixed",
                       starred: bool | None = None) -> ScanResult:
    """Ratio of each family member dilated by every ``s``.

    ``box="fixed"`` keeps ``problem.half_width``; the dilated supports must
    fit.  ``box="rescaled"`` uses half-width ``problem.half_width / s`` so the
    dilated function is sampled at the same relative resolution, which is an
    exact discrete dilation.  ``starred`` defaults to the form used by the
    problem's mode.
    """
    if box not in ("fixed", "rescaled"):
        raise ValueError("box must be 'fixed' or 'rescaled'")
    s_values = np.atleast_1d(np.asarray(s_values, float))
    if starred is None:
        starred = problem.mode != "lorentz"

    def one(args):
        fam, s = args
        hw = problem.half_width / s if box == "rescaled" else problem.half_width
        return _evaluate(problem, dilate(fam, s), problem.res, starred, hw)[2]

    ratios = {}
    for fam in problem.families:
        ratios[fam.name] = np.array(_pmap(one, [(fam, s) for s in s_values]))
    return ScanResult(s_values, ratios, box)


# ---------------------------------------------------------------------------
# Proof chain


def proof_chain(u: GridFunction, problem: GNProblem) -> dict:
    """Constants of the three steps bounding ``lhs`` by the ``**`` right-hand side.

    * ``mazya``: pointwise ratio, so ``lhs <= mazya * ||M(grad^k u)^th (Mu)^(1-th)||_X``
    * ``holder``: that norm over ``||M grad^k u||_Y^th ||Mu||_Z^(1-th)``
    * ``riesz_herz_k`` and ``riesz_herz_0``: ``||Mf||/||f**||`` for ``grad^k u`` and ``u``

    ``consistent`` records ``ratio <= product`` with relative slack 1e-9.
    """
    j, k, th = problem.j, problem.k, problem.theta
    X, Y, Z = problem.X, problem.Y, problem.Z
    dk = magnitude(derivative_tensor(u, k))
    mk, mu = maximal_operator(dk), maximal_operator(u)
    c_m = mazya_ratio(u, j, k)
    middle = GridFunction(mk.values**th * mu.values ** (1 - th), u.half_width, u.dim, 0,
                          strict=False)
    mid_norm = space_norm(rearrange(middle), X)
    mk_y = space_norm(rearrange(mk), Y)
    mu_z = space_norm(rearrange(mu), Z)
    c_h = _ratio(mid_norm, mk_y**th * mu_z ** (1 - th))
    c_rk = _ratio(mk_y, _norm(dk, Y, True))
    c_r0 = _ratio(mu_z, _norm(u, Z, True))
    lhs, rhs = gn_terms(u, j, k, X, Y, Z, True)
    ratio = _ratio(lhs, rhs)
    product = c_m * c_h * c_rk**th * c_r0 ** (1 - th)
    return {"ratio": ratio, "mazya": c_m, "holder": c_h, "riesz_herz_k": c_rk,
            "riesz_herz_0": c_r0, "product": product,
            "consistent": bool(ratio <= product * (1 + 1e-9))}

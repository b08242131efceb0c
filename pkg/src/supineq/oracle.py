"""Brute-force lower bounds on best constants, and criterion/oracle comparison.

The oracle maximizes the Rayleigh quotient ``||T f||_{q,w} / ||f||_{p,v}``
over step-function witnesses in the input cone.  Because operator outputs
are computed exactly at knots (or under-estimated inside regions) and the
denominator is exact for step functions, every quotient it reports is a
certified lower bound on the best constant.  It is a *lower-bound oracle*:
it can under-report, never over-report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from .extreal import INF, adiv, amul, apow, xdiv, xmul, xpow
from .gridfn import (
    DEFAULT_GRID,
    Grid,
    GridFunction,
    make_log_grid,
    project_cone,
    region_measures,
    sample_monotone,
    sample_nonneg,
)
from .operators import OperatorKind, apply_spec, b_cumulative
from .criteria import CriterionResult, InequalitySpec
from .weights import Exponents, PowerWeight, Weight, weight_pow, weight_scale

__all__ = [
    "OracleBudget",
    "OracleResult",
    "EquivalenceReport",
    "RayleighEngine",
    "best_constant_lower",
    "down_dual_constant",
    "equivalence_report",
    "verify_three_way",
    "default_grid",
]


def default_grid() -> Grid:
    return make_log_grid(**DEFAULT_GRID)


@dataclass(frozen=True)
class OracleBudget:
    """Search effort: characteristic scans, random samples, ascent sweeps."""

    n_char: int = 512
    n_random: int = 200
    n_ascent: int = 50

    def __post_init__(self) -> None:
        if min(self.n_char, self.n_random, self.n_ascent) < 0:
            raise ValueError("budget entries must be nonnegative")
        if self.n_char == 0 and self.n_random == 0 and self.n_ascent == 0:
            raise ValueError("budget must allow at least one evaluation")


@dataclass(frozen=True)
class OracleResult:
    lower_bound: float
    witness: np.ndarray  # knot values of the best step function found
    trace: Tuple[float, ...]  # best-so-far after each stage (non-decreasing)
    divergence_flag: bool
    tail_side: Optional[str] = None  # which boundary drove the divergence flag


@dataclass(frozen=True)
class EquivalenceReport:
    verdict: str  # "consistent" | "inconsistent_finiteness" | "ratio_out_of_band"
    criterion_total: float
    oracle_lower: float
    ratio: float  # criterion / oracle
    band: float
    divergence_flag: bool


class RayleighEngine:
    """Fast evaluation of the Rayleigh quotient for a fixed spec and grid."""

    def __init__(self, spec: InequalitySpec, grid: Optional[Grid] = None):
        self.spec = spec
        self.grid = grid or default_grid()
        self.cone = spec.cone
        ks = self.grid.array()
        self.ks = ks
        n = self.grid.n
        self.n = n
        self.dV = region_measures(self.grid, spec.v)
        self.dW = region_measures(self.grid, spec.w)
        k = spec.kind
        self._u_rsups = None
        self._uB = None
        if k.base in ("S", "S*") or k.compose is not None:
            lo = np.concatenate([[0.0], ks])
            hi = np.concatenate([ks, [INF]])
            self._u_rsups = np.array(
                [k.u.sup_on_interval(a, b) for a, b in zip(lo, hi)]
            )
            self._u_knots = np.asarray(k.u(ks), dtype=float)
            self._u_liminf = _safe_limit_inf(k.u)
        if k.base in ("T_ub", "SS_ub"):
            B = b_cumulative(k.b)
            self.Bk = np.asarray(B(ks), dtype=float)
            self.dB = region_measures(self.grid, k.b)
            self._uB = adiv(np.asarray(k.u(ks), dtype=float), self.Bk)
            from .operators import _ratio_weight

            ratio_w = _ratio_weight(k.u, B)
            self._uB_tail_sup = ratio_w.sup_on_interval(ks[-1], INF)
            self._uB_liminf = _safe_limit_inf(ratio_w)
        lengths = np.concatenate([[ks[0]], np.diff(ks), [INF]])
        self.lengths = lengths

    # -- step-function plumbing ------------------------------------------------
    def _segvals(self, values: np.ndarray, cone: str, head: float, tail: float) -> np.ndarray:
        if cone == "non_increasing":
            return np.concatenate([values, [tail]])
        return np.concatenate([[head], values])

    def _norm(self, segvals: np.ndarray, p: float, measures: np.ndarray) -> float:
        return xpow(float(np.sum(amul(apow(segvals, p), measures))), 1.0 / p)

    # -- the quotient -----------------------------------------------------------
    def ratio(self, values: np.ndarray) -> float:
        f = np.asarray(values, dtype=float)
        cone = self.cone
        head = f[0] if cone == "non_increasing" else 0.0
        tail = f[-1] if cone == "non_decreasing" else 0.0
        segv = self._segvals(f, cone, head, tail)
        den = self._norm(segv, self.spec.exps.p, self.dV)
        if den == 0.0:
            return 0.0
        out_segv = self._output_segvals(f, segv)
        num = self._norm(out_segv, self.spec.exps.q, self.dW)
        return xdiv(num, den)

    def _output_segvals(self, f: np.ndarray, segv: np.ndarray) -> np.ndarray:
        k = self.spec.kind
        if k.base == "T_ub":
            cum = np.cumsum(amul(segv[:-1], self.dB[:-1]))
            if segv[-1] > 0.0 and self.dB[-1] > 0.0:
                tail_cum = INF
            else:
                tail_cum = cum[-1]
            point = amul(self._uB, cum)
            tail_term = xmul(tail_cum, self._uB_tail_sup)
            out = np.maximum.accumulate(np.concatenate([point, [tail_term]])[::-1])[::-1]
            vals = out[:-1]
            tail_val = min(xmul(tail_cum, self._uB_liminf), vals[-1])
            return np.concatenate([vals, [tail_val]])
        if k.base == "SS_ub":
            inner = np.maximum.accumulate(amul(segv[:-1], self.Bk))
            inner_tail = inner[-1] if segv[-1] == 0.0 else INF
            point = amul(self._uB, inner)
            tail_term = xmul(inner_tail, self._uB_tail_sup)
            out = np.maximum.accumulate(np.concatenate([point, [tail_term]])[::-1])[::-1]
            vals = out[:-1]
            tail_val = min(xmul(inner_tail, self._uB_liminf), vals[-1])
            return np.concatenate([vals, [tail_val]])
        # supremal (possibly composed) operators
        if k.compose == "H":
            cum = np.cumsum(amul(segv[:-1], self.lengths[:-1]))
            g_vals, g_cone = cum, "non_decreasing"
            g_head, g_tail = 0.0, cum[-1] if segv[-1] == 0.0 else INF
        elif k.compose == "H*":
            above = amul(segv[1:], self.lengths[1:])
            rev = np.cumsum(above[::-1])[::-1]
            g_vals, g_cone = rev, "non_increasing"
            g_head, g_tail = rev[0], 0.0
        else:
            g_vals, g_cone = f, self.cone
            g_head = segv[0] if self.cone == "non_increasing" else 0.0
            g_tail = segv[-1]
        gsegv = self._segvals(g_vals, g_cone, g_head, g_tail)
        prods = amul(self._u_rsups, gsegv)
        if k.base == "S":
            # out(k_j) = sup over regions R_0..R_j; output is non-decreasing, so
            # region R_i takes out(k_{i-1}) and the tail region takes out(k_{n-1})
            vals = np.maximum.accumulate(prods[:-1])
            return np.concatenate([[0.0], vals])
        # S*: out(k_j) = max(u(k_j) g(k_j), sup over regions R_{j+1}..R_n);
        # output is non-increasing, region R_i takes out(k_i)
        gk = gsegv[:-1] if g_cone == "non_increasing" else gsegv[1:]
        point = amul(self._u_knots, gk)
        above = np.maximum.accumulate(prods[1:][::-1])[::-1]
        vals = np.maximum(point, above)
        tail = xmul(gsegv[-1], self._u_liminf)
        return np.concatenate([vals, [min(tail, float(vals[-1]))]])


def _safe_limit_inf(w: Weight) -> float:
    try:
        return w.limit_inf()
    except Exception:  # pragma: no cover
        return float(np.asarray(w(1e14), dtype=float))


def _characteristic_values(n: int, j: int, cone: str) -> np.ndarray:
    """chi_(0, k_j] for non-increasing/none witnesses, chi_[k_j, oo) for non-decreasing."""
    vals = np.zeros(n)
    if cone == "non_decreasing":
        vals[j:] = 1.0
    else:
        vals[: j + 1] = 1.0
    return vals


def best_constant_lower(
    spec: InequalitySpec,
    budget: OracleBudget = OracleBudget(),
    seed: int = 0,
    grid: Optional[Grid] = None,
) -> OracleResult:
    """Certified lower bound on the best constant of ``spec``'s inequality."""
    engine = RayleighEngine(spec, grid)
    n = engine.n
    cone = spec.cone
    best = 0.0
    best_vals = np.zeros(n)
    trace = []

    char_scans = []  # (knots used, ratios)
    if budget.n_char > 0:
        idxs = np.unique(np.linspace(0, n - 1, min(budget.n_char, n)).astype(int))
        fams = [cone] if cone != "none" else ["non_increasing", "non_decreasing"]
        for fam in fams:
            rs = np.zeros(len(idxs))
            for pos, j in enumerate(idxs):
                vals = _characteristic_values(n, int(j), fam)
                r = engine.ratio(vals)
                rs[pos] = r if np.isfinite(r) else 0.0
                if np.isfinite(r) and r > best:
                    best = r
                    best_vals = vals
            char_scans.append((engine.ks[idxs], rs))
    trace.append(best)

    for i in range(budget.n_random):
        if cone == "none":
            f = sample_nonneg(engine.grid, seed + 7919 * (i + 1))
        else:
            f = sample_monotone(cone, engine.grid, seed + 7919 * (i + 1))
        r = engine.ratio(f.values)
        if np.isfinite(r) and r > best:
            best = r
            best_vals = np.asarray(f.values, dtype=float).copy()
    trace.append(best)

    if budget.n_ascent > 0 and best > 0.0:
        vals = best_vals.copy()
        factors = (2.0, 0.5, 1.1, 1.0 / 1.1)
        rng = np.random.default_rng(seed + 104729)
        for sweep in range(budget.n_ascent):
            improved = False
            order = rng.permutation(n)
            for j in order:
                for fac in factors:
                    cand = vals.copy()
                    cand[j] = cand[j] * fac if cand[j] > 0 else fac - 1.0 if fac > 1 else 0.0
                    cand = _project_values(cand, cone)
                    r = engine.ratio(cand)
                    if np.isfinite(r) and r > best * (1.0 + 1e-12):
                        best, vals, improved = r, cand, True
                        break
            if not improved:
                break
        best_vals = vals
    trace.append(best)

    div_flag, side = _divergence_from_char(char_scans)
    return OracleResult(
        lower_bound=float(best),
        witness=best_vals,
        trace=tuple(trace),
        divergence_flag=div_flag,
        tail_side=side,
    )


def _project_values(vals: np.ndarray, cone: str) -> np.ndarray:
    if cone == "non_increasing":
        return np.maximum.accumulate(vals[::-1])[::-1]
    if cone == "non_decreasing":
        return np.maximum.accumulate(vals)
    return np.maximum(vals, 0.0)


def _divergence_from_char(char_scans) -> Tuple[bool, Optional[str]]:
    """Power-law growth of characteristic ratios toward a boundary => divergence."""
    m = 8
    for knots, rs in char_scans:
        if len(rs) < 2 * m:
            continue
        for side, sel in (("left", slice(0, m)), ("right", slice(-m, None))):
            x = np.log(knots[sel])
            y = rs[sel]
            if np.any(y <= 0.0):
                continue
            ly = np.log(y)
            slope, intercept = np.polyfit(x, ly, 1)
            pred = slope * x + intercept
            ss_res = float(np.sum((ly - pred) ** 2))
            ss_tot = float(np.sum((ly - ly.mean()) ** 2))
            r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
            grow = (side == "left" and slope < -0.05) or (side == "right" and slope > 0.05)
            if grow and r2 > 0.99:
                return True, side
    return False, None


def down_dual_constant(g: Weight, v: Weight, p: float,
                       grid: Optional[Grid] = None) -> float:
    """sup_t G(t) V(t)^{-1/p} with G(t) = esssup_{(0,t]} g, for p <= 1.

    This is the closed-form best constant of ``||g f||_oo-type`` functionals
    over non-increasing f with ||f||_{p,v} <= 1."""
    if p > 1.0:
        raise ValueError("the closed form holds for p <= 1")
    grid = grid or default_grid()
    ks = grid.array()
    Gt = np.array([g.sup_on_interval(0.0, t) for t in ks])
    Vt = np.array([v.cum_low(t) for t in ks])
    cand = amul(Gt, apow(Vt, -1.0 / p))
    tail = xmul(g.sup_on_interval(0.0, INF), xpow(v.total(), -1.0 / p))
    return float(np.max(np.concatenate([cand, [tail]])))


def equivalence_report(
    crit: CriterionResult,
    oracle: OracleResult,
    band: float = 64.0,
    safety: float = 4.0,
) -> EquivalenceReport:
    """Compare a criterion total with an oracle lower bound.

    ``consistent`` requires matching finiteness and, when both are finite,
    ``1/band <= criterion/oracle <= band * safety`` (the safety factor absorbs
    the oracle's discretization bias, which only ever pushes it down)."""
    if band <= 1.0:
        raise ValueError("band must exceed 1")
    total = crit.total
    lb = oracle.lower_bound
    ratio = xdiv(total, lb)
    crit_inf = not crit.finite
    if crit_inf != oracle.divergence_flag:
        # a huge finite lower bound is also fine evidence of divergence
        if not (crit_inf and lb > 1e6):
            verdict = "inconsistent_finiteness"
            return EquivalenceReport(verdict, total, lb, ratio, band, oracle.divergence_flag)
    if crit_inf:
        return EquivalenceReport("consistent", total, lb, ratio, band, oracle.divergence_flag)
    if total == 0.0 and lb == 0.0:
        return EquivalenceReport("consistent", total, lb, 1.0, band, oracle.divergence_flag)
    if 1.0 / band <= ratio <= band * safety:
        return EquivalenceReport("consistent", total, lb, ratio, band, oracle.divergence_flag)
    return EquivalenceReport("ratio_out_of_band", total, lb, ratio, band, oracle.divergence_flag)


def verify_three_way(
    u: Weight,
    b: Weight,
    v: Weight,
    w: Weight,
    e: Exponents,
    budget: OracleBudget = OracleBudget(n_char=256, n_random=60, n_ascent=10),
    seed: int = 0,
    grid: Optional[Grid] = None,
) -> dict:
    """Oracle bounds for the three equivalent forms of the combined inequality
    (p <= 1): the direct form, the power-substituted form, and the double-sup
    form.  Returns the three bounds, their pairwise ratios, and flags."""
    p, q = e.p, e.q
    if p > 1.0:
        raise ValueError("the three-way equivalence is stated for p <= 1")
    direct = InequalitySpec(OperatorKind("T_ub", None, u, b), "non_increasing", v, w, e)
    B = b_cumulative(b)
    u_hat = weight_scale(weight_pow(u, p), 1.0 / p)
    from .weights import weight_mul

    b_hat = weight_mul(weight_pow(B, p - 1.0), b)
    powered = InequalitySpec(
        OperatorKind("T_ub", None, u_hat, b_hat), "non_increasing", v, w, Exponents(1.0, q / p)
    )
    double = InequalitySpec(OperatorKind("SS_ub", None, u, b), "non_increasing", v, w, e)
    r1 = best_constant_lower(direct, budget, seed, grid)
    r2 = best_constant_lower(powered, budget, seed, grid)
    r3 = best_constant_lower(double, budget, seed, grid)
    lbs = {
        "direct": r1.lower_bound,
        "powered": xpow(r2.lower_bound, 1.0 / p),
        "double_sup": r3.lower_bound,
    }
    names = list(lbs)
    ratios = {}
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            a_, b_ = lbs[names[i]], lbs[names[j]]
            ratios[f"{names[i]}/{names[j]}"] = xdiv(a_, b_)
    return {
        "lower_bounds": lbs,
        "ratios": ratios,
        "divergence_flags": {
            "direct": r1.divergence_flag,
            "powered": r2.divergence_flag,
            "double_sup": r3.divergence_flag,
        },
    }

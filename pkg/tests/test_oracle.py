"""Brute-force lower-bound search: soundness, reproducibility, reporting."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supineq.criteria import CriterionResult, InequalitySpec
from supineq.extreal import INF
from supineq.gridfn import make_log_grid
from supineq.operators import OperatorKind
from supineq.oracle import (
    OracleBudget,
    OracleResult,
    RayleighEngine,
    best_constant_lower,
    down_dual_constant,
    equivalence_report,
    verify_three_way,
)
from supineq.weights import Exponents, PowerWeight

GRID = make_log_grid(1e-4, 1e4, 49)
ONE = PowerWeight(1.0, 0.0)
EXP = PowerWeight(1.0, 0.0, 1.0)


def down_spec(p=1.0, q=1.0):
    return InequalitySpec(kind=OperatorKind(base="S", u=PowerWeight(1.0, 1.0)),
                          cone="non_increasing", v=ONE, w=EXP, exps=Exponents(p, q))


def tub_spec(p=1.0, q=1.0):
    return InequalitySpec(kind=OperatorKind(base="T_ub", u=PowerWeight(1.0, 1.0), b=ONE),
                          cone="non_increasing", v=ONE, w=EXP, exps=Exponents(p, q))


class TestSoundness:
    @pytest.mark.parametrize("spec", [down_spec(), down_spec(2.0, 2.0), tub_spec(),
                                      tub_spec(0.5, 0.5)],
                             ids=["S-p1", "S-p2", "Tub-p1", "Tub-p.5"])
    def test_witness_reproduces_bound(self, spec):
        orc = best_constant_lower(spec, OracleBudget(128, 40, 10), seed=7, grid=GRID)
        eng = RayleighEngine(spec, GRID)
        assert eng.ratio(orc.witness) == pytest.approx(orc.lower_bound, rel=1e-10)

    def test_trace_is_non_decreasing(self):
        orc = best_constant_lower(down_spec(), OracleBudget(64, 30, 5), seed=11, grid=GRID)
        t = np.asarray(orc.trace)
        assert np.all(np.diff(t) >= 0)
        assert t[-1] == orc.lower_bound

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=10, deadline=None)
    def test_deterministic_given_seed(self, seed):
        a = best_constant_lower(down_spec(), OracleBudget(32, 10, 3), seed=seed, grid=GRID)
        b = best_constant_lower(down_spec(), OracleBudget(32, 10, 3), seed=seed, grid=GRID)
        assert a.lower_bound == b.lower_bound
        assert np.array_equal(a.witness, b.witness)

    def test_budget_monotone(self):
        small = best_constant_lower(down_spec(2.0, 2.0), OracleBudget(16, 5, 2),
                                    seed=5, grid=GRID)
        big = best_constant_lower(down_spec(2.0, 2.0), OracleBudget(128, 40, 10),
                                  seed=5, grid=GRID)
        assert big.lower_bound >= small.lower_bound * (1 - 1e-12)

    def test_zero_budget_rejected(self):
        with pytest.raises(ValueError):
            OracleBudget(0, 0, 0)

    def test_ratio_never_exceeds_true_constant(self):
        # u = t, v = 1, w = e^{-t}, p = q = 1 on the non-increasing cone has
        # best constant exactly 1 (characteristic functions are extremal)
        orc = best_constant_lower(down_spec(), OracleBudget(256, 100, 20), seed=123, grid=GRID)
        assert orc.lower_bound <= 1.0 + 1e-9
        assert orc.lower_bound >= 0.99


class TestDivergenceDetection:
    def test_flags_unbounded_constant(self):
        # u = t^2 against w = t^{-1.5}: the weighted sup grows without
        # bound, so characteristic scans diverge toward the right edge
        spec = InequalitySpec(kind=OperatorKind(base="S", u=PowerWeight(1.0, 2.0)),
                              cone="non_increasing", v=ONE,
                              w=PowerWeight(1.0, -1.5), exps=Exponents(1.0, 1.0))
        orc = best_constant_lower(spec, OracleBudget(256, 20, 5), seed=2, grid=GRID)
        assert orc.divergence_flag

    def test_no_flag_on_bounded_problem(self):
        orc = best_constant_lower(down_spec(), OracleBudget(256, 20, 5), seed=2, grid=GRID)
        assert not orc.divergence_flag


class TestEquivalenceReport:
    def mkcrit(self, total, finite=True):
        return CriterionResult(theorem_id="X", regime="p=1,p<=q",
                               terms={"A1": total}, total=total,
                               finite=finite, hypothesis_report={}, flags=())

    def mkorc(self, lb, div=False):
        return OracleResult(lower_bound=lb, witness=np.zeros(1), trace=(lb,),
                            divergence_flag=div, tail_side=None)

    def test_matching_finite_values_consistent(self):
        rep = equivalence_report(self.mkcrit(2.0), self.mkorc(1.9), band=64.0)
        assert rep.verdict == "consistent"
        assert rep.ratio == pytest.approx(2.0 / 1.9)

    def test_band_violation_inconsistent(self):
        rep = equivalence_report(self.mkcrit(1000.0), self.mkorc(1.0), band=4.0)
        assert rep.verdict == "ratio_out_of_band"

    def test_oracle_above_criterion_band_inconsistent(self):
        rep = equivalence_report(self.mkcrit(1.0), self.mkorc(500.0), band=4.0)
        assert rep.verdict == "ratio_out_of_band"

    def test_infinite_criterion_needs_divergence_evidence(self):
        inf_crit = self.mkcrit(INF, finite=False)
        assert equivalence_report(inf_crit, self.mkorc(3.0, div=True)).verdict == "consistent"
        assert equivalence_report(inf_crit, self.mkorc(3.0, div=False)).verdict == "inconsistent_finiteness"

    def test_zero_zero_consistent(self):
        rep = equivalence_report(self.mkcrit(0.0), self.mkorc(0.0))
        assert rep.verdict == "consistent"

    def test_band_recorded(self):
        rep = equivalence_report(self.mkcrit(1.0), self.mkorc(1.0), band=32.0)
        assert rep.band == 32.0


class TestHelpers:
    def test_down_dual_constant_matches_ratio(self):
        # g = V for v = 1, p = 1: the quotient G(t) V(t)^{-1} is exactly 1
        g = PowerWeight(1.0, 1.0)
        val = down_dual_constant(g, ONE, 1.0, grid=GRID)
        assert val == pytest.approx(1.0, rel=1e-9)

    def test_verify_three_way_structure(self):
        out = verify_three_way(PowerWeight(1.0, 1.0), ONE, ONE, EXP,
                               Exponents(0.5, 0.5),
                               budget=OracleBudget(64, 10, 3), seed=4, grid=GRID)
        assert set(out["lower_bounds"]) == {"direct", "powered", "double_sup"}
        for v in out["lower_bounds"].values():
            assert v >= 0.0
        assert "ratios" in out and "divergence_flags" in out

"""Weighted-inequality criteria for supremal and Hardy-type operators,
with a brute-force best-constant oracle."""

from .extreal import ExtNonneg, INF
from .weights import (
    Exponents,
    FuncWeight,
    PiecewisePowerWeight,
    PowerWeight,
    TabulatedWeight,
    Weight,
    dual_substitute,
    parse_weight,
    phi_weights,
    psi_weights,
    running_sup,
    sigma_p,
)
from .gridfn import (
    Grid,
    GridFunction,
    make_log_grid,
    project_cone,
    sample_monotone,
    weighted_norm,
)
from .operators import OperatorKind, apply_spec, copson, double_sup, hardy, sup_op, t_ub
from .criteria import (
    CriterionResult,
    CritCtx,
    InequalitySpec,
    TheoremInapplicable,
    crit_iterated,
    crit_restricted_sup,
    crit_tub,
    evaluate_criterion,
    reduce_spec,
)
from .oracle import (
    EquivalenceReport,
    OracleBudget,
    OracleResult,
    best_constant_lower,
    down_dual_constant,
    equivalence_report,
    verify_three_way,
)

__version__ = "0.1.0"

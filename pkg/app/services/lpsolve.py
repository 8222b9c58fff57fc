# File: app/services/lpsolve.py
"""
/app/services/lpsolve.py
LP solve through scipy HiGHS and independent optimality certification
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np
import scipy
from scipy.optimize import linprog

from app.models.lp_instance import ConstraintTag, LpInstance, Sense, TagKind, to_marginal
from app.models.market_system import ModelKind
from app.models.solution import (
    DualMatch,
    DualSolution,
    OptimalityReport,
    PrimalSolution,
    SolverInfo,
    Tolerances,
)
from app.utils.errors import ConfigError, Infeasible, NumericalFailure, Unbounded

logger = logging.getLogger(__name__)

STATUS_TEXT = {
    0: "optimal",
    1: "iteration limit reached",
    2: "infeasible",
    3: "unbounded",
    4: "numerical difficulties",
}


def _split_rows(lp: LpInstance):
    senses = lp.senses()
    eq_rows = [r for r, s in enumerate(senses) if s is Sense.EQ]
    ub_rows = [r for r, s in enumerate(senses) if s is Sense.LE]
    return eq_rows, ub_rows


def solve(
    lp: LpInstance, method: str = "highs-ds"
) -> Tuple[PrimalSolution, DualSolution, SolverInfo]:
    """
    Solve to primal-dual optimality.

    Args:
        lp: Tagged instance
        method: scipy linprog HiGHS method

    Returns:
        Primal values, duals with market sign conventions and solver metadata

    Raises:
        Infeasible, Unbounded, NumericalFailure
    """
    if not method.startswith("highs"):
        raise ConfigError(f"Solver method '{method}' does not expose row marginals")

    a, b = lp.matrix(), lp.rhs_vector()
    eq_rows, ub_rows = _split_rows(lp)

    res = linprog(
        lp.cost_vector(),
        A_ub=a[ub_rows] if ub_rows else None,
        b_ub=b[ub_rows] if ub_rows else None,
        A_eq=a[eq_rows] if eq_rows else None,
        b_eq=b[eq_rows] if eq_rows else None,
        bounds=lp.bounds(),
        method=method,
    )

    info = SolverInfo(
        method=method,
        status=int(res.status),
        message=str(res.message),
        iterations=int(getattr(res, "nit", 0) or 0),
        extra={"scipy": scipy.__version__},
    )
    diagnostics = info.to_dict()
    diagnostics.update(
        variables=lp.n_variables,
        equalities=len(eq_rows),
        inequalities=len(ub_rows),
    )

    if res.status == 2:
        logger.error(f"LP infeasible: {res.message}")
        raise Infeasible(f"LP is infeasible: {res.message}", diagnostics)
    if res.status == 3:
        logger.error(f"LP unbounded: {res.message}")
        raise Unbounded(f"LP is unbounded: {res.message}", diagnostics)
    if res.status != 0 or res.x is None:
        logger.error(f"LP solve failed ({STATUS_TEXT.get(res.status, res.status)})")
        raise NumericalFailure(
            f"LP solve failed: {STATUS_TEXT.get(res.status, res.status)}", diagnostics
        )

    primal = PrimalSolution(
        values={var.key: float(x) for var, x in zip(lp.variables, res.x)},
        objective=float(res.fun),
    )

    marginals = np.zeros(len(lp.constraints))
    if eq_rows:
        marginals[eq_rows] = res.eqlin.marginals
    if ub_rows:
        marginals[ub_rows] = res.ineqlin.marginals
    dual = DualSolution(
        values={
            con.tag: to_marginal(con.tag, con.sense, float(m)) + 0.0
            for con, m in zip(lp.constraints, marginals)
        },
        buses=lp.buses,
        contingencies=lp.contingencies,
        lines=lp.lines,
    )

    logger.info(
        f"Solved {lp.model_kind.value} LP: objective {primal.objective:.6f} "
        f"in {info.iterations} iterations"
    )
    return primal, dual, info


# =============================================================================
# Dual bookkeeping
# =============================================================================


def marginal_vector(lp: LpInstance, dual: DualSolution) -> np.ndarray:
    """Raw multipliers (d objective / d rhs) in row order; missing tags read as 0"""
    return np.array(
        [to_marginal(c.tag, c.sense, dual.values.get(c.tag, 0.0)) for c in lp.constraints],
        dtype=float,
    )


def dual_objective(lp: LpInstance, dual: DualSolution) -> float:
    return float(lp.rhs_vector() @ marginal_vector(lp, dual))


def duality_gap(lp: LpInstance, primal: PrimalSolution, dual: DualSolution) -> float:
    """Primal objective minus dual objective; >= 0 for feasible pairs"""
    return lp.evaluate_objective(primal.values) - dual_objective(lp, dual)


def _scales(lp: LpInstance) -> Tuple[float, float]:
    c, b = lp.cost_vector(), lp.rhs_vector()
    c_scale = 1.0 + (float(np.max(np.abs(c))) if c.size else 0.0)
    b_scale = 1.0 + (float(np.max(np.abs(b))) if b.size else 0.0)
    return c_scale, b_scale


def complete_dual(
    lp: LpInstance,
    primal: PrimalSolution,
    partial: DualSolution,
    tolerances: Optional[Tolerances] = None,
) -> DualSolution:
    """
    Fill in the multipliers a partial dual leaves out.

    The missing multipliers solve a small LP that minimises the L1
    stationarity residual, with sign restrictions and zero multipliers on
    rows that are slack at the given primal. Multipliers already present
    are kept exactly.
    """
    tolerances = tolerances or Tolerances()
    missing = [r for r, c in enumerate(lp.constraints) if c.tag not in partial.values]
    if not missing:
        return partial

    a, b, c = lp.matrix(), lp.rhs_vector(), lp.cost_vector()
    x = lp.vector(primal.values)
    _, b_scale = _scales(lp)
    active_tol = tolerances.feas * b_scale

    missing_set = set(missing)
    known = np.array([r not in missing_set for r in range(len(lp.constraints))])
    lam_known = np.where(known, marginal_vector(lp, partial), 0.0)
    reduced = c - a.T @ lam_known

    n_u, n = len(missing), lp.n_variables
    a_u = a[missing]  # n_u x n
    basic = np.array(
        [var.is_free or x[j] > active_tol for j, var in enumerate(lp.variables)]
    )

    # columns: lam (n_u), u (n), v (n)
    cost = np.concatenate([np.zeros(n_u), np.ones(n), np.ones(n)])
    eq_a, eq_b, ub_a, ub_b = [], [], [], []
    for j in range(n):
        u_col, v_col = np.zeros(n), np.zeros(n)
        if basic[j]:
            u_col[j], v_col[j] = -1.0, 1.0
            eq_a.append(np.concatenate([-a_u[:, j], u_col, v_col]))
            eq_b.append(-reduced[j])
        else:
            v_col[j] = -1.0
            ub_a.append(np.concatenate([a_u[:, j], u_col, v_col]))
            ub_b.append(reduced[j])

    bounds = []
    slack = b - a @ x
    for r in missing:
        con = lp.constraints[r]
        if con.sense is Sense.EQ:
            bounds.append((None, None))
        elif slack[r] > active_tol:
            bounds.append((0.0, 0.0))
        else:
            bounds.append((None, 0.0))
    bounds += [(0.0, None)] * (2 * n)
    for j in range(n):
        if not basic[j]:
            bounds[n_u + j] = (0.0, 0.0)

    res = linprog(
        cost,
        A_ub=np.array(ub_a) if ub_a else None,
        b_ub=np.array(ub_b) if ub_b else None,
        A_eq=np.array(eq_a) if eq_a else None,
        b_eq=np.array(eq_b) if eq_b else None,
        bounds=bounds,
        method="highs",
    )
    if res.status != 0:
        raise NumericalFailure(
            f"Could not complete partial dual: {res.message}",
            {"missing_tags": len(missing), "status": int(res.status)},
        )

    values: Dict[ConstraintTag, float] = dict(partial.values)
    for offset, r in enumerate(missing):
        con = lp.constraints[r]
        values[con.tag] = to_marginal(con.tag, con.sense, float(res.x[offset])) + 0.0
    logger.debug(
        f"Completed {len(missing)} multipliers, stationarity residual {res.fun:.3e}"
    )
    return DualSolution(
        values=values,
        buses=partial.buses or lp.buses,
        contingencies=partial.contingencies or lp.contingencies,
        lines=partial.lines or lp.lines,
    )


# =============================================================================
# Optimality certificate
# =============================================================================


def check_kkt(
    lp: LpInstance,
    primal: PrimalSolution,
    dual: DualSolution,
    tolerances: Optional[Tolerances] = None,
) -> OptimalityReport:
    """
    Stationarity, primal and dual feasibility, complementary slackness and
    duality gap of a primal-dual pair. Partial duals are completed first.
    """
    tol = tolerances or Tolerances()
    missing = dual.missing(lp.tags)
    if missing:
        dual = complete_dual(lp, primal, dual, tol)

    a, b, c = lp.matrix(), lp.rhs_vector(), lp.cost_vector()
    x = lp.vector(primal.values)
    lam = marginal_vector(lp, dual)
    c_scale, b_scale = _scales(lp)
    senses = lp.senses()
    le = np.array([s is Sense.LE for s in senses], dtype=bool)
    free = np.array([v.is_free for v in lp.variables], dtype=bool)

    activity = a @ x
    residual = np.where(le, np.maximum(activity - b, 0.0), np.abs(activity - b))
    bound_residual = np.where(free, 0.0, np.maximum(-x, 0.0))
    primal_residual = float(
        max(residual.max(initial=0.0), bound_residual.max(initial=0.0))
    )

    rc = c - a.T @ lam
    stationarity = np.where(free, np.abs(rc), np.maximum(-rc, 0.0))
    max_kkt_residual = float(stationarity.max(initial=0.0))

    slack = b - activity
    row_cs = np.where(le, np.abs(lam * slack), 0.0)
    col_cs = np.where(free, 0.0, np.abs(rc * x))
    slackness = float(max(row_cs.max(initial=0.0), col_cs.max(initial=0.0)))

    sign_violations = []
    for con, value in zip(lp.constraints, lam):
        if con.sense is Sense.LE and value > tol.feas:
            sign_violations.append(f"{con.tag}: {dual.values[con.tag]:+.3e}")
    if lp.model_kind is ModelKind.SINGLE_BUS:
        for con in lp.constraints:
            if con.tag.kind is TagKind.POST_BALANCE and dual.values[con.tag] < -tol.sign:
                sign_violations.append(
                    f"{con.tag}: {dual.values[con.tag]:+.3e} (contingency price must be >= 0)"
                )

    flow_pair = 0.0
    for line in lp.lines:
        for state in dual.states:
            plus, minus = dual.flow_plus(line, state), dual.flow_minus(line, state)
            if plus is not None and minus is not None:
                flow_pair = max(flow_pair, abs(plus * minus))

    objective = lp.evaluate_objective(primal.values)
    gap = duality_gap(lp, primal, dual)

    failures = []
    if abs(gap) > tol.gap * (1.0 + abs(objective)):
        failures.append(f"duality gap {gap:.3e}")
    if primal_residual > tol.feas * b_scale:
        failures.append(f"primal residual {primal_residual:.3e}")
    if max_kkt_residual > tol.cs * c_scale:
        failures.append(f"stationarity residual {max_kkt_residual:.3e}")
    if slackness > tol.cs * c_scale:
        failures.append(f"complementary slackness {slackness:.3e}")
    if flow_pair > tol.cs * c_scale:
        failures.append(f"flow dual pair product {flow_pair:.3e}")
    if sign_violations:
        failures.append(f"{len(sign_violations)} dual sign violation(s)")

    report = OptimalityReport(
        duality_gap=gap,
        max_kkt_residual=max_kkt_residual,
        primal_residual=primal_residual,
        slackness_violation=slackness,
        flow_pair_violation=flow_pair,
        sign_violations=tuple(sign_violations),
        failures=tuple(failures),
        completed_tags=len(missing),
    )
    if report.passed:
        logger.debug(f"Optimality certified (gap {gap:.3e})")
    else:
        logger.warning(f"Optimality check failed: {', '.join(failures)}")
    return report


def classify_dual(
    candidate: DualSolution,
    reference: DualSolution,
    optimality: OptimalityReport,
    tol: float = 1e-4,
) -> DualMatch:
    """
    MATCH when the candidate agrees with every reference multiplier,
    ALTERNATE_OPTIMUM when it differs but is certified optimal,
    MISMATCH otherwise.
    """
    agrees = all(
        abs(candidate.values.get(tag, 0.0) - value) <= tol
        for tag, value in reference.values.items()
    )
    if agrees:
        return DualMatch.MATCH
    if optimality.passed:
        logger.warning("Solver returned an alternate optimal dual")
        return DualMatch.ALTERNATE_OPTIMUM
    return DualMatch.MISMATCH

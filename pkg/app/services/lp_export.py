# File: app/services/lp_export.py
"""
/app/services/lp_export.py
CPLEX-LP export of a tagged instance through a pyomo model
"""

import logging
from collections import OrderedDict
from typing import Dict, List, Tuple

import pyomo.environ as pyo
from pyomo.opt import ProblemFormat

from app.models.lp_instance import LpInstance, Sense

logger = logging.getLogger(__name__)


def _index(owner: str, state) -> Tuple[str, ...]:
    return (owner,) if state is None else (owner, state)


def _unwrap(idx: Tuple[str, ...]):
    return idx[0] if len(idx) == 1 else idx


def build_pyomo_model(lp: LpInstance) -> pyo.ConcreteModel:
    """
    One indexed Var per variable role and one indexed Constraint per tag
    kind, so the LP text carries names like g0(G1) and PostBalance(B1_K1).
    """
    m = pyo.ConcreteModel(name=f"marketclear_{lp.model_kind.value}")

    by_role: Dict[str, List] = OrderedDict()
    for var in lp.variables:
        by_role.setdefault(var.role.value, []).append(var)

    handles = [None] * len(lp.variables)
    positions = {var.key: j for j, var in enumerate(lp.variables)}
    for role, variables in by_role.items():
        keys = [_unwrap(_index(v.owner, v.state)) for v in variables]
        bounds = {key: (v.lower, v.upper) for key, v in zip(keys, variables)}
        dimen = len(_index(variables[0].owner, variables[0].state))
        m.add_component(f"{role}_index", pyo.Set(initialize=keys, dimen=dimen, ordered=True))
        component = pyo.Var(
            getattr(m, f"{role}_index"),
            domain=pyo.Reals,
            bounds=lambda model, *idx, b=bounds: b[_unwrap(idx)],
        )
        m.add_component(role, component)
        for key, v in zip(keys, variables):
            handles[positions[v.key]] = component[key]

    m.obj = pyo.Objective(
        expr=sum(var.cost * handles[j] for j, var in enumerate(lp.variables) if var.cost),
        sense=pyo.minimize,
    )

    by_kind: Dict[str, List] = OrderedDict()
    for con in lp.constraints:
        by_kind.setdefault(con.tag.kind.value, []).append(con)

    for kind, rows in by_kind.items():
        keys = [_unwrap(_index(c.tag.element, c.tag.state)) for c in rows]
        lookup = dict(zip(keys, rows))
        dimen = len(_index(rows[0].tag.element, rows[0].tag.state))

        def rule(model, *idx, lookup=lookup):
            con = lookup[_unwrap(idx)]
            if not con.coefficients:
                return pyo.Constraint.Skip
            body = sum(coef * handles[j] for j, coef in con.coefficients)
            if con.sense is Sense.EQ:
                return body == con.rhs
            return body <= con.rhs

        m.add_component(f"{kind}_index", pyo.Set(initialize=keys, dimen=dimen, ordered=True))
        m.add_component(kind, pyo.Constraint(getattr(m, f"{kind}_index"), rule=rule))

    return m


def write_lp(lp: LpInstance, path: str) -> str:
    """Write the instance as CPLEX-LP text with symbolic labels; returns the path"""
    model = build_pyomo_model(lp)
    model.write(
        path,
        format=ProblemFormat.cpxlp,
        io_options={"symbolic_solver_labels": True},
    )
    logger.info(f"Exported {lp.n_variables}-variable LP to {path}")
    return path

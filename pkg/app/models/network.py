# File: app/models/network.py
"""
/app/models/network.py
DC load flow matrices and per-state availability views
"""

import logging
from dataclasses import dataclass
from typing import FrozenSet, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from app.models.market_system import PRE_CONTINGENCY, Contingency, MarketSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NetworkMatrices:
    """
    Topology matrices of the intact network.

    incidence is bus x line with +1 at the from-bus and -1 at the to-bus.
    branch_flow is line x bus, row l = (e_from - e_to) / x_l, so that the
    flow on every line in MW is base_mva * branch_flow @ theta.
    """

    bus_ids: Tuple[str, ...]
    line_ids: Tuple[str, ...]
    generator_ids: Tuple[str, ...]
    load_ids: Tuple[str, ...]
    incidence: np.ndarray
    branch_flow: np.ndarray
    gen_map: np.ndarray
    load_map: np.ndarray

    def laplacian(self) -> np.ndarray:
        """Bus susceptance pattern A @ H (symmetric, rows sum to zero)"""
        return self.incidence @ self.branch_flow


@dataclass(frozen=True, eq=False)
class ContingencyView:
    state: str
    availability: np.ndarray
    incidence: np.ndarray
    branch_flow: np.ndarray
    active_lines: Tuple[str, ...]
    islands: Tuple[FrozenSet[str], ...]
    references: Tuple[str, ...]

    @property
    def is_islanded(self) -> bool:
        return len(self.islands) > 1


def build_matrices(system: MarketSystem) -> NetworkMatrices:
    bus_ids = system.bus_ids
    bus_index = {bus_id: i for i, bus_id in enumerate(bus_ids)}
    n_bus, n_line = len(bus_ids), len(system.lines)

    incidence = np.zeros((n_bus, n_line))
    branch_flow = np.zeros((n_line, n_bus))
    for l, line in enumerate(system.lines):
        f, t = bus_index[line.from_bus], bus_index[line.to_bus]
        incidence[f, l] = 1.0
        incidence[t, l] = -1.0
        branch_flow[l, f] = 1.0 / line.reactance
        branch_flow[l, t] = -1.0 / line.reactance

    gen_map = np.zeros((n_bus, len(system.generators)))
    for i, gen in enumerate(system.generators):
        gen_map[bus_index[gen.bus], i] = 1.0

    load_map = np.zeros((n_bus, len(system.loads)))
    for j, load in enumerate(system.loads):
        load_map[bus_index[load.bus], j] = 1.0

    logger.debug(f"Built network matrices: {n_bus} buses, {n_line} lines")
    return NetworkMatrices(
        bus_ids=bus_ids,
        line_ids=tuple(line.id for line in system.lines),
        generator_ids=tuple(g.id for g in system.generators),
        load_ids=tuple(d.id for d in system.loads),
        incidence=incidence,
        branch_flow=branch_flow,
        gen_map=gen_map,
        load_map=load_map,
    )


def find_islands(
    bus_ids: Tuple[str, ...], incidence: np.ndarray
) -> Tuple[FrozenSet[str], ...]:
    """Connected bus sets, ordered by the position of their first bus"""
    n_bus = len(bus_ids)
    adjacency = np.zeros((n_bus, n_bus))
    for column in incidence.T:
        ends = np.flatnonzero(column)
        if len(ends) == 2:
            adjacency[ends[0], ends[1]] = adjacency[ends[1], ends[0]] = 1.0
    _, labels = connected_components(csr_matrix(adjacency), directed=False)

    islands = []
    seen = set()
    for label in labels:
        if label in seen:
            continue
        seen.add(label)
        islands.append(
            frozenset(bus_ids[i] for i in np.flatnonzero(labels == label))
        )
    return tuple(islands)


def contingency_view(
    system: MarketSystem,
    k: Optional[Contingency],
    matrices: Optional[NetworkMatrices] = None,
) -> ContingencyView:
    """
    Availability vector and reduced topology for one state.
    k=None yields the pre-contingency view.
    """
    matrices = matrices or build_matrices(system)
    outaged_gens = k.outaged_generators if k else frozenset()
    outaged_lines = k.outaged_lines if k else frozenset()

    availability = np.array(
        [0.0 if gen.id in outaged_gens else 1.0 for gen in system.generators]
    )
    keep = np.array(
        [line_id not in outaged_lines for line_id in matrices.line_ids], dtype=float
    )
    incidence = matrices.incidence * keep[np.newaxis, :]
    branch_flow = matrices.branch_flow * keep[:, np.newaxis]

    islands = find_islands(matrices.bus_ids, incidence)
    flagged = system.reference_bus
    references = []
    for island in islands:
        if flagged in island:
            references.append(flagged)
        else:
            references.append(next(b for b in matrices.bus_ids if b in island))

    state = k.id if k else PRE_CONTINGENCY
    if len(islands) > 1 and k is not None:
        logger.info(f"State {state} splits the network into {len(islands)} islands")

    return ContingencyView(
        state=state,
        availability=availability,
        incidence=incidence,
        branch_flow=branch_flow,
        active_lines=tuple(
            line_id for line_id in matrices.line_ids if line_id not in outaged_lines
        ),
        islands=islands,
        references=tuple(references),
    )


def state_views(system: MarketSystem) -> Tuple[ContingencyView, ...]:
    """Pre-contingency view followed by one view per contingency"""
    matrices = build_matrices(system)
    views = [contingency_view(system, None, matrices)]
    views.extend(contingency_view(system, k, matrices) for k in system.contingencies)
    return tuple(views)

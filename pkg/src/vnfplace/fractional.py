"""Fractional traffic allocation.

Two objects live here:

* the single-LP optimal fractional allocation of a node *set* (the placement
  value of an unordered selection), and
* the iterative, node-by-node allocation of a node *sequence*: nodes are
  visited in order, each node greedily grabs the most traffic an LP allows
  while all previously fixed node totals are held as equality constraints.

The sequence value is what the greedy placement maximizes; it sandwiches the
set value within a factor of two (property-tested in the suite).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from . import lp as lpmod
from .errors import InvalidRates, NumericalFailure
from .model import Instance, flow_total_demand

__all__ = [
    "AssignmentMatrix",
    "AllocationResult",
    "unique_sequence",
    "build_node_lp",
    "iterative_allocation",
    "full_fractional_allocation",
    "r4_with_rates",
]

RatesLike = Union[Mapping[str, float], Sequence[float], None]


@dataclass(frozen=True)
class AssignmentMatrix:
    """Sparse (flow, node) -> assigned traffic."""

    entries: Mapping[tuple[str, str], float]

    def value(self, flow_id: str, node_id: str) -> float:
        return self.entries.get((flow_id, node_id), 0.0)

    def flow_total(self, flow_id: str) -> float:
        return sum(v for (f, _), v in self.entries.items() if f == flow_id)

    def node_total(self, node_id: str) -> float:
        return sum(v for (_, n), v in self.entries.items() if n == node_id)

    def total(self) -> float:
        return sum(self.entries.values())

    def flow_totals(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for (f, _), v in self.entries.items():
            out[f] = out.get(f, 0.0) + v
        return out


@dataclass(frozen=True)
class AllocationResult:
    sequence: tuple[str, ...]
    node_totals: tuple[float, ...]
    matrix: AssignmentMatrix
    total: float


class _Ctx:
    """Per-instance lookup tables, built once and attached to the instance."""

    def __init__(self, instance: Instance):
        self.flow_ids = [f.id for f in instance.flows]
        self.rates = {f.id: f.rate for f in instance.flows}
        self.rate_vec = np.array([f.rate for f in instance.flows])
        self.path_nodes = {f.id: frozenset(f.path) for f in instance.flows}
        self.resources = instance.resources
        self.delta = {
            (f.id, r): flow_total_demand(instance, f.id, r)
            for f in instance.flows
            for r in instance.resources
        }
        self.delta_vec = {
            r: np.array([self.delta[(f.id, r)] for f in instance.flows])
            for r in instance.resources
        }
        self.capacity = {
            (n.id, r): n.capacity[r] for n in instance.nodes for r in instance.resources
        }
        # flow indices whose path covers each node
        self.cover = {
            n.id: np.array(
                [fi for fi, f in enumerate(instance.flows) if n.id in self.path_nodes[f.id]],
                dtype=int,
            )
            for n in instance.nodes
        }


def _ctx(instance: Instance) -> _Ctx:
    ctx = instance.__dict__.get("_vnfplace_ctx")
    if ctx is None:
        ctx = _Ctx(instance)
        object.__setattr__(instance, "_vnfplace_ctx", ctx)
    return ctx


def unique_sequence(sequence: Sequence[str]) -> tuple[str, ...]:
    """Drop later repetitions of the same node, keeping first appearances."""
    seen: set[str] = set()
    out = []
    for v in sequence:
        if v not in seen:
            seen.add(v)
            out.append(v)
    return tuple(out)


def _resolve_rates(instance: Instance, rates: RatesLike) -> np.ndarray:
    ctx = _ctx(instance)
    if rates is None:
        return ctx.rate_vec.copy()
    if isinstance(rates, Mapping):
        vec = np.array([float(rates.get(fid, 0.0)) for fid in ctx.flow_ids])
    else:
        if len(rates) != len(ctx.flow_ids):
            raise InvalidRates("rate vector length mismatch")
        vec = np.asarray(rates, dtype=float)
    if np.any(vec < -1e-9) or np.any(vec > ctx.rate_vec + 1e-9):
        raise InvalidRates("rates outside [0, lambda] element-wise")
    return np.clip(vec, 0.0, ctx.rate_vec)


def _allocation_lp(
    instance: Instance,
    seq: tuple[str, ...],
    rate_vec: np.ndarray,
    objective_position: Optional[int],
    node_totals: Optional[Sequence[float]],
) -> lpmod.LinearProgram:
    """Shared LP builder for both the per-position and the whole-set LPs.

    Variables are x[f, v] for every flow f and sequence position v (index
    ``fi * len(seq) + si``); off-path variables are pinned to zero via their
    bounds.  With ``objective_position`` set, the objective is that node's
    column sum and every other position's column sum is pinned by equality to
    ``node_totals``; otherwise the objective is the full matrix sum.
    """
    ctx = _ctx(instance)
    flow_ids = ctx.flow_ids
    ns = len(seq)
    nf = len(flow_ids)
    nvars = nf * ns

    on_path = np.zeros((nf, ns), dtype=bool)
    for si, v in enumerate(seq):
        on_path[ctx.cover[v], si] = True

    objective = np.zeros(nvars)
    bounds: list[tuple[float, Optional[float]]] = [
        (0.0, None) if on_path[fi, si] else (0.0, 0.0)
        for fi in range(nf)
        for si in range(ns)
    ]
    if objective_position is None:
        objective[on_path.reshape(-1)] = 1.0
    else:
        si = objective_position - 1
        cols = ctx.cover[seq[si]] * ns + si
        objective[cols] = 1.0

    leq: list[tuple[np.ndarray, float]] = []
    for fi in range(nf):
        sis = np.nonzero(on_path[fi])[0]
        if sis.size == 0:
            continue
        row = np.zeros(nvars)
        row[fi * ns + sis] = 1.0
        leq.append((row, float(rate_vec[fi])))
    for si, v in enumerate(seq):
        fis = ctx.cover[v]
        for r in ctx.resources:
            d = ctx.delta_vec[r][fis]
            if fis.size == 0 or not np.any(d):
                continue
            row = np.zeros(nvars)
            row[fis * ns + si] = d
            leq.append((row, ctx.capacity[(v, r)]))

    eq: list[tuple[np.ndarray, float]] = []
    if objective_position is not None:
        for si in range(ns):
            if si == objective_position - 1:
                continue
            fis = ctx.cover[seq[si]]
            row = np.zeros(nvars)
            row[fis * ns + si] = 1.0
            target = float(node_totals[si])
            if fis.size or abs(target) > lpmod.EPS_FEAS:
                eq.append((row, target))

    return lpmod.LinearProgram(
        num_vars=nvars, objective=objective, leq=leq, eq=eq, bounds=bounds
    )


def build_node_lp(
    instance: Instance,
    sequence: Sequence[str],
    node_totals: Sequence[float],
    j: int,
    rates: RatesLike = None,
) -> lpmod.LinearProgram:
    """LP maximizing the traffic assignable to the ``j``-th node (1-based) of
    ``sequence`` while every other node's column sum is pinned to
    ``node_totals``."""
    seq = tuple(sequence)
    if not (1 <= j <= len(seq)):
        raise IndexError(f"position {j} outside 1..{len(seq)}")
    if len(node_totals) != len(seq):
        raise IndexError("node_totals length must match sequence length")
    rate_vec = _resolve_rates(instance, rates)
    return _allocation_lp(instance, seq, rate_vec, j, node_totals)


def _solution_matrix(ctx: _Ctx, seq, values) -> AssignmentMatrix:
    ns = len(seq)
    entries: dict[tuple[str, str], float] = {}
    for si, v in enumerate(seq):
        for fi in ctx.cover[v]:
            x = float(values[fi * ns + si])
            if x > 0.0:
                entries[(ctx.flow_ids[fi], v)] = x
    return AssignmentMatrix(entries)


def iterative_allocation(
    instance: Instance,
    sequence: Sequence[str],
    rates: RatesLike = None,
) -> AllocationResult:
    """Visit the sequence nodes in order; at step i solve the node LP for
    position i given the totals fixed so far, then pin that node's total.

    Repeated nodes are deduplicated (first appearance wins).  Returns the
    final per-node totals, the final assignment and the grand total.
    """
    seq = unique_sequence(sequence)
    ns = len(seq)
    ctx = _ctx(instance)
    if ns == 0:
        return AllocationResult((), (), AssignmentMatrix({}), 0.0)
    rate_vec = _resolve_rates(instance, rates)
    y = [0.0] * ns
    last = None
    for i in range(1, ns + 1):
        sol = lpmod.solve(_allocation_lp(instance, seq, rate_vec, i, y))
        if sol.status is not lpmod.LpStatus.OPTIMAL:
            raise NumericalFailure(f"node LP at position {i} is {sol.status.value}")
        cols = ctx.cover[seq[i - 1]] * ns + (i - 1)
        y[i - 1] = float(sol.values[cols].sum()) if cols.size else 0.0
        last = sol.values
    matrix = _solution_matrix(ctx, seq, last)
    # Totals recomputed from the final matrix so column sums and reported
    # node totals agree exactly.
    y_final = tuple(
        sum(v for (f, n), v in matrix.entries.items() if n == node) for node in seq
    )
    return AllocationResult(seq, y_final, matrix, float(sum(y_final)))


def full_fractional_allocation(
    instance: Instance,
    nodes: Sequence[str],
    rates: RatesLike = None,
) -> tuple[float, AssignmentMatrix]:
    """Optimal fractional allocation over an unordered node set: one LP
    maximizing total assigned traffic under rate caps and node capacities."""
    u = tuple(sorted(set(nodes)))
    if not u:
        return 0.0, AssignmentMatrix({})
    rate_vec = _resolve_rates(instance, rates)
    sol = lpmod.solve(_allocation_lp(instance, u, rate_vec, None, None))
    if sol.status is not lpmod.LpStatus.OPTIMAL:
        raise NumericalFailure(f"set allocation LP is {sol.status.value}")
    matrix = _solution_matrix(_ctx(instance), u, sol.values)
    return float(sol.objective_value), matrix


def r4_with_rates(
    instance: Instance, sequence: Sequence[str], rates: RatesLike
) -> float:
    """Sequence value evaluated with the flow rates replaced by ``rates``."""
    return iterative_allocation(instance, sequence, rates=rates).total

"""Integral whole-flow allocation on placed nodes.

Both allocators view the (normalized) per-resource capacity duals as prices:
a flow is assigned wholesale to a cheap node with the best rate-to-weighted-
demand ratio, and prices of the chosen node rise multiplicatively.  The run
continues while any remaining flow still fits; since assignments are never
undone, the processed traffic can only exceed what the priced-capacity
certification point guarantees.  The global variant prices all nodes
together; the per-node variant allocates one node at a time in a
caller-chosen order.

Assignments never violate capacities: a candidate that does not fit the
remaining capacity is skipped (strictly more conservative than letting the
final flow overshoot and stopping).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from . import lp as lpmod
from .errors import DegenerateInstance, NumericalFailure, ZTooSmall
from .fractional import AssignmentMatrix, _ctx
from .model import Instance

__all__ = [
    "NormalizedInstance",
    "IntegralAssignment",
    "normalize",
    "pra",
    "nra",
    "processed_traffic",
    "allocation_lp_bound",
    "Z_EPS",
]

Z_EPS = 1e-6


@dataclass(frozen=True)
class NormalizedInstance:
    """Demands and capacities rescaled by the maximum per-flow total demand."""

    d_max: float
    d: Mapping[tuple[str, str], float]        # (flow, resource) -> normalized demand
    c_bar: Mapping[tuple[str, str], float]    # (node, resource) -> normalized capacity
    z: float                                  # min normalized capacity over placed nodes


@dataclass
class IntegralAssignment:
    """Whole-flow placements: each assigned flow sits entirely on one node."""

    assigned: dict[str, str]                     # flow -> node
    residual: dict[tuple[str, str], float]       # (node, resource) -> remaining capacity

    def matrix(self, instance: Instance) -> AssignmentMatrix:
        ctx = _ctx(instance)
        return AssignmentMatrix(
            {(f, v): ctx.rates[f] for f, v in self.assigned.items()}
        )

    def assigned_flows(self) -> frozenset[str]:
        return frozenset(self.assigned)


def normalize(instance: Instance, nodes: Sequence[str]) -> NormalizedInstance:
    """Normalize demands/capacities by the maximum total per-flow demand;
    the stretch ``z`` is the minimum normalized capacity over ``nodes``."""
    u = sorted(set(nodes))
    if not u:
        raise ValueError("need a non-empty placed node set")
    ctx = _ctx(instance)
    d_max = max(
        (ctx.delta[(f.id, r)] * f.rate for f in instance.flows for r in instance.resources),
        default=0.0,
    )
    if d_max <= 0.0:
        raise DegenerateInstance("all flow demands are zero")
    d = {
        (f.id, r): ctx.delta[(f.id, r)] * f.rate / d_max
        for f in instance.flows
        for r in instance.resources
    }
    c_bar = {
        (v, r): ctx.capacity[(v, r)] / d_max for v in u for r in instance.resources
    }
    z = min(c_bar[(v, r)] for v in u for r in instance.resources)
    return NormalizedInstance(d_max=d_max, d=d, c_bar=c_bar, z=z)


def _fits(ctx, norm, residual, fid: str, v: str, resources) -> bool:
    return all(
        ctx.delta[(fid, r)] * ctx.rates[fid] <= residual[(v, r)] + lpmod.EPS_FEAS
        for r in resources
    )


def _consume(ctx, residual, fid: str, v: str, resources) -> None:
    for r in resources:
        residual[(v, r)] -= ctx.delta[(fid, r)] * ctx.rates[fid]


def pra(instance: Instance, norm: NormalizedInstance, nodes: Sequence[str]) -> IntegralAssignment:
    """Global primal-dual allocation over the placed nodes.

    Each round: every flow gets its cheapest placed on-path node (minimum
    price sum), the flow with the best rate/priced-demand ratio is assigned
    wholesale, and that node's prices rise.  Runs until every flow is placed
    or nothing left fits anywhere.
    """
    u = sorted(set(nodes))
    if not u:
        return IntegralAssignment({}, {})
    if norm.z <= 1.0 + Z_EPS:
        raise ZTooSmall(f"resource stretch {norm.z} too close to 1")
    ctx = _ctx(instance)
    resources = instance.resources
    z = norm.z
    factor_base = math.exp(z - 1.0) * len(resources) * len(u)
    prices = {(v, r): 1.0 / norm.c_bar[(v, r)] for v in u for r in resources}
    residual = {(v, r): ctx.capacity[(v, r)] for v in u for r in resources}
    assigned: dict[str, str] = {}
    remaining = [
        f.id for f in instance.flows if any(v in ctx.path_nodes[f.id] for v in u)
    ]
    # Flows with zero demand on every resource are free: place them on their
    # smallest covered node up front (their price ratio is undefined).
    for fid in list(remaining):
        if all(ctx.delta[(fid, r)] == 0.0 for r in resources):
            v = min(v for v in u if v in ctx.path_nodes[fid])
            assigned[fid] = v
            remaining.remove(fid)

    while remaining:
        best_fid = None
        best_node = None
        best_ratio = None
        for fid in remaining:
            options = [
                v for v in u
                if v in ctx.path_nodes[fid] and _fits(ctx, norm, residual, fid, v, resources)
            ]
            if not options:
                continue
            vf = min(options, key=lambda v: (sum(prices[(v, r)] for r in resources), v))
            weighted = sum(norm.d[(fid, r)] * prices[(vf, r)] for r in resources)
            ratio = ctx.rates[fid] / weighted
            if best_ratio is None or ratio > best_ratio + 1e-15:
                best_fid, best_node, best_ratio = fid, vf, ratio
        if best_fid is None:
            break  # nothing fits anywhere
        assigned[best_fid] = best_node
        _consume(ctx, residual, best_fid, best_node, resources)
        remaining.remove(best_fid)
        for r in resources:
            c = norm.c_bar[(best_node, r)]
            prices[(best_node, r)] *= factor_base ** (norm.d[(best_fid, r)] / (c - 1.0))
    return IntegralAssignment(assigned, residual)


def nra(
    instance: Instance,
    norm: NormalizedInstance,
    nodes: Sequence[str],
    order: Optional[Sequence[str]] = None,
) -> IntegralAssignment:
    """Per-node primal-dual allocation: nodes are priced and filled one at a
    time in ``order`` (defaults to the order ``nodes`` was given in, e.g. the
    greedy selection order); each node keeps taking the remaining flow with
    the best rate/priced-demand ratio until nothing left fits on it."""
    u = sorted(set(nodes))
    if not u:
        return IntegralAssignment({}, {})
    if order is None:
        order = list(dict.fromkeys(nodes))
    if sorted(order) != u:
        raise ValueError("order must be a permutation of the placed nodes")
    if norm.z <= 1.0 + Z_EPS:
        raise ZTooSmall(f"resource stretch {norm.z} too close to 1")
    ctx = _ctx(instance)
    resources = instance.resources
    z = norm.z
    factor_base = math.exp(z - 1.0) * len(resources)
    residual = {(v, r): ctx.capacity[(v, r)] for v in u for r in resources}
    assigned: dict[str, str] = {}
    remaining = [
        f.id for f in instance.flows if any(v in ctx.path_nodes[f.id] for v in u)
    ]
    for v in order:
        prices = {r: 1.0 / norm.c_bar[(v, r)] for r in resources}
        # Free flows covered by this node are placed immediately.
        for fid in list(remaining):
            if v in ctx.path_nodes[fid] and all(
                ctx.delta[(fid, r)] == 0.0 for r in resources
            ):
                assigned[fid] = v
                remaining.remove(fid)
        while remaining:
            best_fid = None
            best_ratio = None
            for fid in remaining:
                if v not in ctx.path_nodes[fid]:
                    continue
                if not _fits(ctx, norm, residual, fid, v, resources):
                    continue
                weighted = sum(norm.d[(fid, r)] * prices[r] for r in resources)
                ratio = ctx.rates[fid] / weighted
                if best_ratio is None or ratio > best_ratio + 1e-15:
                    best_fid, best_ratio = fid, ratio
            if best_fid is None:
                break
            assigned[best_fid] = v
            _consume(ctx, residual, best_fid, v, resources)
            remaining.remove(best_fid)
            for r in resources:
                c = norm.c_bar[(v, r)]
                prices[r] *= factor_base ** (norm.d[(best_fid, r)] / (c - 1.0))
    return IntegralAssignment(assigned, residual)


def processed_traffic(instance: Instance, assignment) -> float:
    """Total rate of fully processed flows (assigned traffic covers the whole
    rate, up to the feasibility tolerance)."""
    ctx = _ctx(instance)
    if isinstance(assignment, IntegralAssignment):
        return sum(ctx.rates[f] for f in assignment.assigned)
    totals = assignment.flow_totals()
    return sum(
        ctx.rates[f]
        for f, got in totals.items()
        if got >= ctx.rates[f] - lpmod.EPS_FEAS
    )


def allocation_lp_bound(instance: Instance, norm: NormalizedInstance, nodes: Sequence[str]) -> float:
    """Diagnostic: optimum of the normalized fractional-assignment LP
    (variables are flow fractions per node).  Upper-bounds what any integral
    allocator can collect on the same nodes."""
    u = sorted(set(nodes))
    if not u:
        return 0.0
    ctx = _ctx(instance)
    flows = [f.id for f in instance.flows if any(v in ctx.path_nodes[f.id] for v in u)]
    nf, ns = len(flows), len(u)
    if nf == 0:
        return 0.0
    nvars = nf * ns
    objective = [0.0] * nvars
    bounds = [(0.0, 0.0)] * nvars
    for fi, fid in enumerate(flows):
        for si, v in enumerate(u):
            if v in ctx.path_nodes[fid]:
                bounds[fi * ns + si] = (0.0, None)
                objective[fi * ns + si] = ctx.rates[fid]
    leq = []
    for si, v in enumerate(u):
        for r in instance.resources:
            row = [0.0] * nvars
            for fi, fid in enumerate(flows):
                if v in ctx.path_nodes[fid]:
                    row[fi * ns + si] = norm.d[(fid, r)]
            leq.append((row, norm.c_bar[(v, r)]))
    for fi in range(nf):
        row = [0.0] * nvars
        for si, v in enumerate(u):
            if v in ctx.path_nodes[flows[fi]]:
                row[fi * ns + si] = 1.0
        leq.append((row, 1.0))
    sol = lpmod.solve(
        lpmod.LinearProgram(num_vars=nvars, objective=objective, leq=leq, bounds=bounds)
    )
    if sol.status is not lpmod.LpStatus.OPTIMAL:
        raise NumericalFailure(f"diagnostic LP is {sol.status.value}")
    return float(sol.objective_value)

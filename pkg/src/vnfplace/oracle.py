"""Brute-force reference optima for small instances.

These are deliberately naive — exhaustive enumeration plus an LP feasibility
check — so the fast algorithms can be validated against ground truth.  Guard
rails raise :class:`TooLarge` instead of silently taking hours.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from math import perm

from . import lp as lpmod
from .errors import TooLarge
from .fractional import _allocation_lp, _ctx, iterative_allocation
from .model import Instance

__all__ = [
    "ExactResult",
    "optimal_exact",
    "optimal_allocation_exact",
    "optimal_sequence_r4",
]

MAX_NODES = 12
MAX_FLOWS = 14
MAX_SEQUENCES = 100_000


@dataclass(frozen=True)
class ExactResult:
    nodes: frozenset[str]
    flows: frozenset[str]
    value: float
    explored: int = 0


def _subset_feasible(instance: Instance, u: tuple[str, ...], flow_ids: tuple[str, ...]) -> bool:
    """Can every flow in ``flow_ids`` be fully processed on the nodes ``u``?

    Feasibility of the allocation LP with each selected flow's served traffic
    pinned to its full rate.
    """
    ctx = _ctx(instance)
    want = set(flow_ids)
    # Quick reject: a selected flow must touch at least one chosen node.
    for fid in want:
        if not any(v in ctx.path_nodes[fid] for v in u):
            return False
    base = _allocation_lp(instance, u, ctx.rate_vec, None, None)
    ns = len(u)
    eq = []
    for fi, fid in enumerate(ctx.flow_ids):
        if fid not in want:
            continue
        row = [0.0] * base.num_vars
        for si, v in enumerate(u):
            if v in ctx.path_nodes[fid]:
                row[fi * ns + si] = 1.0
        eq.append((row, ctx.rates[fid]))
    lp = lpmod.LinearProgram(
        num_vars=base.num_vars,
        objective=[0.0] * base.num_vars,
        leq=base.leq,
        eq=list(base.eq) + eq,
        bounds=base.bounds,
    )
    return lpmod.solve(lp).status is lpmod.LpStatus.OPTIMAL


def optimal_allocation_exact(instance: Instance, nodes) -> ExactResult:
    """Maximum fully-processed traffic on a fixed node set, by enumerating
    flow subsets in decreasing total-rate order (first feasible subset wins)."""
    u = tuple(sorted(set(nodes)))
    ctx = _ctx(instance)
    if len(instance.flows) > MAX_FLOWS:
        raise TooLarge(f"exact search supports at most {MAX_FLOWS} flows")
    candidates = [f.id for f in instance.flows if any(v in ctx.path_nodes[f.id] for v in u)]
    subsets: list[tuple[float, tuple[str, ...]]] = []
    for size in range(len(candidates), -1, -1):
        for combo in combinations(candidates, size):
            subsets.append((sum(ctx.rates[f] for f in combo), combo))
    subsets.sort(key=lambda t: (-t[0], t[1]))
    explored = 0
    for total, combo in subsets:
        explored += 1
        if _subset_feasible(instance, u, combo):
            return ExactResult(frozenset(u), frozenset(combo), total, explored)
    return ExactResult(frozenset(u), frozenset(), 0.0, explored)


def optimal_exact(instance: Instance, k: int) -> ExactResult:
    """Globally optimal fully-processed traffic over all node sets of size
    at most ``k`` (exhaustive in both nodes and flow subsets)."""
    if k < 0:
        raise ValueError("budget must be >= 0")
    if k == 0:
        return ExactResult(frozenset(), frozenset(), 0.0, 0)
    node_ids = sorted(n.id for n in instance.nodes)
    if len(node_ids) > MAX_NODES:
        raise TooLarge(f"exact search supports at most {MAX_NODES} nodes")
    if len(instance.flows) > MAX_FLOWS:
        raise TooLarge(f"exact search supports at most {MAX_FLOWS} flows")
    size = min(k, len(node_ids))
    best = ExactResult(frozenset(), frozenset(), 0.0, 0)
    explored = 0
    for u in combinations(node_ids, size):
        res = optimal_allocation_exact(instance, u)
        explored += res.explored
        if res.value > best.value + 1e-12:
            best = res
    return ExactResult(best.nodes, best.flows, best.value, explored)


def optimal_sequence_r4(instance: Instance, k: int) -> tuple[tuple[str, ...], float]:
    """Best sequence value over every ordered selection of at most ``k``
    distinct nodes (exhaustive)."""
    if k < 0:
        raise ValueError("budget must be >= 0")
    node_ids = sorted(n.id for n in instance.nodes)
    size = min(k, len(node_ids))
    total_seqs = sum(perm(len(node_ids), s) for s in range(1, size + 1))
    if total_seqs > MAX_SEQUENCES:
        raise TooLarge(f"{total_seqs} sequences exceeds limit {MAX_SEQUENCES}")
    best_seq: tuple[str, ...] = ()
    best_val = 0.0
    for s in range(1, size + 1):
        for seq in permutations(node_ids, s):
            val = iterative_allocation(instance, seq).total
            if val > best_val + 1e-12:
                best_seq, best_val = seq, val
    return best_seq, best_val

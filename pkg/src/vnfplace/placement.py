"""Greedy VNF-node placement.

``ssg`` maximizes the sequence allocation value (append the node with the
largest marginal, evaluated by the iterative allocator); because a shared
prefix always receives exactly the same totals, each candidate's marginal is
obtained from a single LP on top of the current prefix instead of re-running
the whole iteration.  ``sg`` is the set-function analogue (marginals of the
single-LP set value); it carries no guarantee and is reported as a heuristic.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import lp as lpmod
from .errors import NumericalFailure
from .fractional import (
    _allocation_lp,
    _ctx,
    _resolve_rates,
    full_fractional_allocation,
    iterative_allocation,
)
from .model import Instance

__all__ = ["PlacementResult", "ssg", "sg"]

TIE_EPS = 1e-9  # below this every marginal counts as zero


@dataclass(frozen=True)
class PlacementResult:
    sequence: tuple[str, ...]
    node_set: frozenset[str]
    value: float
    per_iteration_marginals: tuple[float, ...]


def ssg(instance: Instance, k: int) -> PlacementResult:
    """Sequence greedy: repeatedly append the node with the largest marginal
    allocation value; ties and the all-zero case fall back to the smallest
    unselected node id.  Stops after min(k, |V|) nodes."""
    if k < 1:
        raise ValueError("budget must be >= 1")
    ctx = _ctx(instance)
    rate_vec = _resolve_rates(instance, None)
    all_nodes = sorted(n.id for n in instance.nodes)
    seq: list[str] = []
    y: list[float] = []
    marginals: list[float] = []
    steps = min(k, len(all_nodes))
    for _ in range(steps):
        best_v = None
        best_gain = None
        best_col = 0.0
        for v in all_nodes:
            if v in seq:
                continue  # a repeated node has zero marginal
            cand = tuple(seq) + (v,)
            sol = lpmod.solve(
                _allocation_lp(instance, cand, rate_vec, len(cand), y + [0.0])
            )
            if sol.status is not lpmod.LpStatus.OPTIMAL:
                raise NumericalFailure(f"marginal LP for {v!r} is {sol.status.value}")
            gain = float(sol.objective_value)
            if best_gain is None or gain > best_gain + 1e-12:
                best_v, best_gain, best_col = v, gain, gain
        if best_gain is None:
            break
        if best_gain <= TIE_EPS:
            # All marginals are (numerically) zero: take the smallest
            # unselected node so the sequence still reaches min(k, |V|).
            best_v = next(v for v in all_nodes if v not in seq)
            best_col = 0.0
            best_gain = 0.0
        seq.append(best_v)
        y.append(best_col)
        marginals.append(best_gain)
    final = iterative_allocation(instance, seq)
    return PlacementResult(
        tuple(seq), frozenset(seq), final.total, tuple(marginals)
    )


def sg(instance: Instance, k: int) -> PlacementResult:
    """Set greedy over the single-LP fractional value (heuristic: no
    approximation guarantee is claimed for this objective)."""
    if k < 1:
        raise ValueError("budget must be >= 1")
    all_nodes = sorted(n.id for n in instance.nodes)
    selected: list[str] = []
    marginals: list[float] = []
    current = 0.0
    steps = min(k, len(all_nodes))
    for _ in range(steps):
        best_v = None
        best_val = None
        for v in all_nodes:
            if v in selected:
                continue
            val, _ = full_fractional_allocation(instance, selected + [v])
            if best_val is None or val > best_val + 1e-12:
                best_v, best_val = v, val
        if best_val is None:
            break
        gain = best_val - current
        if gain <= TIE_EPS:
            best_v = next(v for v in all_nodes if v not in selected)
            best_val, _ = current, None
            gain = 0.0
        selected.append(best_v)
        marginals.append(max(gain, 0.0))
        current = max(best_val, current) if best_val is not None else current
    value, _ = full_fractional_allocation(instance, selected)
    return PlacementResult(
        tuple(selected), frozenset(selected), value, tuple(marginals)
    )

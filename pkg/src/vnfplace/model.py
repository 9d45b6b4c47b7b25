"""Network instance model: nodes, flows, functions, paths, ingestion and
synthetic demand generation.

An :class:`Instance` is immutable after construction; every operation here
either is a pure function of its inputs or returns a fresh instance.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    InvalidRange,
    ParseError,
    UnknownId,
    UnreachablePair,
    ValidationError,
)

__all__ = [
    "NetworkFunction",
    "Node",
    "Flow",
    "Instance",
    "SplitMix64",
    "compute_paths",
    "flow_total_demand",
    "covered_flows",
    "load_instance",
    "loads_instance",
    "save_instance",
    "dumps_instance",
    "generate_demands",
    "line_topology",
    "ring_topology",
    "random_topology",
    "abilene_topology",
]


class SplitMix64:
    """Deterministic 64-bit generator (splitmix64) used for all synthetic
    draws so that instances are reproducible across runs and languages.

    State update: s += 0x9E3779B97F4A7C15 (mod 2^64); output mixes the new
    state with two xor-shift-multiply rounds (constants 0xBF58476D1CE4E5B9
    and 0x94D049BB133111EB, final shift 31).  ``uniform(lo, hi)`` maps the
    top 53 bits to a double in [0, 1).
    """

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * (2.0 ** -53)
        return lo + (hi - lo) * u

    def randrange(self, n: int) -> int:
        # Rejection-free modulo is fine here; bias is negligible for small n
        # and determinism is what matters.
        return self.next_u64() % n


@dataclass(frozen=True)
class NetworkFunction:
    """A network function and its per-resource unit demand (resource units
    consumed per unit of traffic processed)."""

    id: str
    unit_demand: Mapping[str, float]

    def __post_init__(self):
        if not self.unit_demand:
            raise ValidationError(f"function {self.id!r} has no resource demands")
        for r, b in self.unit_demand.items():
            if not (b >= 0.0) or not math.isfinite(b):
                raise ValidationError(
                    f"function {self.id!r}: demand on {r!r} must be finite and >= 0"
                )


@dataclass(frozen=True)
class Node:
    id: str
    capacity: Mapping[str, float]

    def __post_init__(self):
        for r, c in self.capacity.items():
            if not (c >= 0.0) or not math.isfinite(c):
                raise ValidationError(
                    f"node {self.id!r}: capacity on {r!r} must be finite and >= 0"
                )


@dataclass(frozen=True)
class Flow:
    id: str
    src: str
    dst: str
    rate: float
    required_functions: frozenset[str]
    path: tuple[str, ...] = ()

    def __post_init__(self):
        if not (self.rate > 0.0) or not math.isfinite(self.rate):
            raise ValidationError(f"flow {self.id!r}: rate must be finite and > 0")
        if not self.required_functions:
            raise ValidationError(f"flow {self.id!r}: needs at least one function")
        if self.path:
            if self.path[0] != self.src or self.path[-1] != self.dst:
                raise ValidationError(
                    f"flow {self.id!r}: path endpoints must be src/dst"
                )


@dataclass(frozen=True)
class Instance:
    """A full problem instance.

    ``resources`` fixes the global resource ordering; every node must define
    a capacity for each resource and every function demand must refer to a
    known resource.
    """

    resources: tuple[str, ...]
    nodes: tuple[Node, ...]
    edges: tuple[tuple[str, str, float], ...]
    functions: tuple[NetworkFunction, ...]
    flows: tuple[Flow, ...]

    def __post_init__(self):
        if len(set(self.resources)) != len(self.resources):
            raise ValidationError("duplicate resource ids")
        rset = set(self.resources)
        node_ids = [n.id for n in self.nodes]
        if len(set(node_ids)) != len(node_ids):
            raise ValidationError("duplicate node ids")
        nset = set(node_ids)
        for n in self.nodes:
            missing = rset - set(n.capacity)
            if missing:
                raise ValidationError(
                    f"node {n.id!r}: capacity missing for {sorted(missing)}"
                )
        fn_ids = [fn.id for fn in self.functions]
        if len(set(fn_ids)) != len(fn_ids):
            raise ValidationError("duplicate function ids")
        for fn in self.functions:
            bad = set(fn.unit_demand) - rset
            if bad:
                raise ValidationError(
                    f"function {fn.id!r}: unknown resources {sorted(bad)}"
                )
        fnset = set(fn_ids)
        flow_ids = [f.id for f in self.flows]
        if len(set(flow_ids)) != len(flow_ids):
            raise ValidationError("duplicate flow ids")
        adjacency: dict[str, set[str]] = {v: set() for v in nset}
        for (u, v, cost) in self.edges:
            if u not in nset or v not in nset:
                raise ValidationError(f"edge ({u!r}, {v!r}): unknown endpoint")
            if not (cost >= 0.0) or not math.isfinite(cost):
                raise ValidationError(f"edge ({u!r}, {v!r}): bad cost")
            adjacency[u].add(v)
            adjacency[v].add(u)
        for f in self.flows:
            if f.src not in nset or f.dst not in nset:
                raise ValidationError(f"flow {f.id!r}: unknown endpoint")
            if not f.required_functions <= fnset:
                raise ValidationError(f"flow {f.id!r}: unknown required function")
            if f.path:
                for v in f.path:
                    if v not in nset:
                        raise ValidationError(f"flow {f.id!r}: path node {v!r} unknown")
                for a, b in zip(f.path, f.path[1:]):
                    if b not in adjacency[a]:
                        raise ValidationError(
                            f"flow {f.id!r}: path hop ({a!r}, {b!r}) is not an edge"
                        )

    # --- lookups -------------------------------------------------------

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise UnknownId(f"node {node_id!r}")

    def flow(self, flow_id: str) -> Flow:
        for f in self.flows:
            if f.id == flow_id:
                return f
        raise UnknownId(f"flow {flow_id!r}")

    def function(self, fn_id: str) -> NetworkFunction:
        for fn in self.functions:
            if fn.id == fn_id:
                return fn
        raise UnknownId(f"function {fn_id!r}")

    def node_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    def total_traffic(self) -> float:
        return sum(f.rate for f in self.flows)

    def adjacency(self) -> dict[str, list[tuple[str, float]]]:
        """Undirected adjacency with edge costs (parallel edges keep the
        cheapest cost)."""
        best: dict[tuple[str, str], float] = {}
        for (u, v, cost) in self.edges:
            for a, b in ((u, v), (v, u)):
                key = (a, b)
                if key not in best or cost < best[key]:
                    best[key] = cost
        adj: dict[str, list[tuple[str, float]]] = {n.id: [] for n in self.nodes}
        for (a, b), cost in sorted(best.items()):
            adj[a].append((b, cost))
        return adj


# --- core operations ---------------------------------------------------


def flow_total_demand(instance: Instance, flow_id: str, resource_id: str) -> float:
    """Total units of ``resource_id`` needed to process one unit of the flow
    (sum of its required functions' unit demands)."""
    if resource_id not in instance.resources:
        raise UnknownId(f"resource {resource_id!r}")
    f = instance.flow(flow_id)
    total = 0.0
    for fn_id in sorted(f.required_functions):
        total += instance.function(fn_id).unit_demand.get(resource_id, 0.0)
    return total


def demand_table(instance: Instance) -> dict[tuple[str, str], float]:
    """(flow, resource) -> per-unit demand, for all pairs."""
    out = {}
    for f in instance.flows:
        for r in instance.resources:
            out[(f.id, r)] = flow_total_demand(instance, f.id, r)
    return out


def covered_flows(instance: Instance, nodes: Iterable[str]) -> set[str]:
    """Flows whose path intersects the given node set."""
    u = set(nodes)
    return {f.id for f in instance.flows if u.intersection(f.path)}


def _dijkstra(
    adj: dict[str, list[tuple[str, float]]], src: str, metric: str
) -> dict[str, float]:
    dist = {src: 0.0}
    heap: list[tuple[float, str]] = [(0.0, src)]
    done: set[str] = set()
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for (w, c) in adj[v]:
            step = 1.0 if metric == "hop_count" else c
            nd = d + step
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


def _shortest_path(
    adj: dict[str, list[tuple[str, float]]],
    src: str,
    dst: str,
    metric: str,
) -> Optional[tuple[str, ...]]:
    """Shortest path with a deterministic tie-break: among all minimum-cost
    paths, return the lexicographically smallest node-id sequence.

    Constructed greedily from distance labels computed in both directions;
    at every hop the smallest-id neighbour that stays on some shortest path
    is taken, which yields the lexicographic minimum.
    """
    if src == dst:
        return (src,)
    from_src = _dijkstra(adj, src, metric)
    to_dst = _dijkstra(adj, dst, metric)
    if dst not in from_src:
        return None
    total = from_src[dst]
    eps = 1e-9 * max(1.0, abs(total))
    path = [src]
    prefix = 0.0
    current = src
    while current != dst:
        chosen = None
        chosen_step = 0.0
        for (w, c) in sorted(adj[current]):
            step = 1.0 if metric == "hop_count" else c
            if w not in to_dst:
                continue
            if abs((prefix + step + to_dst[w]) - total) <= eps:
                chosen = w
                chosen_step = step
                break
        if chosen is None:  # pragma: no cover - labels guarantee progress
            return None
        prefix += chosen_step
        current = chosen
        path.append(current)
    return tuple(path)


def compute_paths(instance: Instance, metric: str = "routing_cost") -> Instance:
    """Fill every flow's path with the shortest path under ``metric``
    (``routing_cost`` or ``hop_count``); ties break to the lexicographically
    smallest node-id sequence."""
    if metric not in ("routing_cost", "hop_count"):
        raise ValueError(f"unknown metric {metric!r}")
    adj = instance.adjacency()
    flows = []
    for f in instance.flows:
        path = _shortest_path(adj, f.src, f.dst, metric)
        if path is None:
            raise UnreachablePair(f.id)
        flows.append(replace(f, path=path))
    return replace(instance, flows=tuple(flows))


# --- JSON serialization --------------------------------------------------


def _instance_from_dict(doc: dict) -> Instance:
    try:
        resources = tuple(doc["resources"])
        nodes = tuple(
            Node(id=n["id"], capacity={str(k): float(v) for k, v in n["capacity"].items()})
            for n in doc["nodes"]
        )
        edges = tuple(
            (e["u"], e["v"], float(e.get("cost", 1.0))) for e in doc.get("edges", [])
        )
        functions = tuple(
            NetworkFunction(
                id=fn["id"],
                unit_demand={str(k): float(v) for k, v in fn["beta"].items()},
            )
            for fn in doc["functions"]
        )
        flows = tuple(
            Flow(
                id=f["id"],
                src=f["src"],
                dst=f["dst"],
                rate=float(f["rate"]),
                required_functions=frozenset(f["functions"]),
                path=tuple(f.get("path", ())),
            )
            for f in doc["flows"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(0, f"bad instance document: {exc}") from exc
    return Instance(resources, nodes, edges, functions, flows)


def dumps_instance(instance: Instance) -> str:
    doc = {
        "resources": list(instance.resources),
        "nodes": [{"id": n.id, "capacity": dict(n.capacity)} for n in instance.nodes],
        "edges": [{"u": u, "v": v, "cost": c} for (u, v, c) in instance.edges],
        "functions": [
            {"id": fn.id, "beta": dict(fn.unit_demand)} for fn in instance.functions
        ],
        "flows": [
            {
                "id": f.id,
                "src": f.src,
                "dst": f.dst,
                "rate": f.rate,
                "functions": sorted(f.required_functions),
                **({"path": list(f.path)} if f.path else {}),
            }
            for f in instance.flows
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def loads_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg) from exc
    return _instance_from_dict(doc)


def save_instance(instance: Instance, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_instance(instance))
        fh.write("\n")


# --- SNDlib native format -------------------------------------------------


def _parse_sndlib(text: str) -> tuple[list, list, list]:
    """Extract (nodes, links, demands) from the SNDlib native text format.

    Only the fields named in the schema are used:
      NODES:   id ( x y )
      LINKS:   id ( u v ) preCap preCost routingCost setupCost ( modules... )
      DEMANDS: id ( u v ) routingUnit value [maxPathLength]
    """
    nodes: list[str] = []
    links: list[tuple[str, str, float]] = []
    demands: list[tuple[str, str, str, float]] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        upper = line.split()[0].upper()
        if upper in ("NODES", "LINKS", "DEMANDS"):
            section = upper
            continue
        if upper in ("META", "NETWORK", "ADMISSIBLEPATHS"):
            section = None
            continue
        if line == ")":
            section = None
            continue
        if section is None:
            continue
        tokens = line.replace("(", " ( ").replace(")", " ) ").split()
        if section == "NODES":
            nodes.append(tokens[0])
        elif section == "LINKS":
            try:
                if tokens[1] != "(" or tokens[4] != ")":
                    raise ValueError("expected 'id ( u v ) ...'")
                u, v = tokens[2], tokens[3]
                rest = [t for t in tokens[5:] if t not in ("(", ")")]
                # preCapacity preCost routingCost ...
                cost = float(rest[2]) if len(rest) >= 3 else 1.0
            except (IndexError, ValueError) as exc:
                raise ParseError(lineno, f"malformed LINKS line: {exc}") from exc
            links.append((u, v, cost))
        elif section == "DEMANDS":
            try:
                if tokens[1] != "(" or tokens[4] != ")":
                    raise ValueError("expected 'id ( u v ) ...'")
                name, u, v = tokens[0], tokens[2], tokens[3]
                rest = [t for t in tokens[5:] if t not in ("(", ")")]
                value = float(rest[1])  # routingUnit value ...
            except (IndexError, ValueError) as exc:
                raise ParseError(lineno, f"malformed DEMANDS line: {exc}") from exc
            demands.append((name, u, v, value))
    return nodes, links, demands


def _merge_companion(
    node_ids: Sequence[str],
    links: Sequence[tuple[str, str, float]],
    demands: Sequence[tuple[str, str, str, float]],
    companion: Optional[dict],
) -> Instance:
    companion = companion or {}
    resources = tuple(companion.get("resources", ["r1"]))
    caps_cfg = companion.get("capacities", {})
    default_cap = caps_cfg.get("*", {r: 0.0 for r in resources})
    nodes = tuple(
        Node(
            id=v,
            capacity={
                r: float(caps_cfg.get(v, default_cap).get(r, default_cap.get(r, 0.0)))
                for r in resources
            },
        )
        for v in node_ids
    )
    fns_cfg = companion.get("functions")
    if fns_cfg:
        functions = tuple(
            NetworkFunction(fn["id"], {str(k): float(v) for k, v in fn["beta"].items()})
            for fn in fns_cfg
        )
    else:
        functions = (NetworkFunction("fn_default", {r: 1.0 for r in resources}),)
    flow_fns = companion.get("flow_functions", {})
    default_fns = flow_fns.get("*", [functions[0].id])
    flows = tuple(
        Flow(
            id=name,
            src=u,
            dst=v,
            rate=value,
            required_functions=frozenset(flow_fns.get(name, default_fns)),
        )
        for (name, u, v, value) in demands
        if value > 0.0
    )
    return Instance(resources, nodes, tuple(links), functions, flows)


def load_instance(path: str, format: str = "json", capacity_config: Optional[str] = None) -> Instance:
    """Load an instance from ``path``.

    ``format='json'`` reads the native JSON schema.  ``format='sndlib_native'``
    reads an SNDlib native text file; per-node capacities and the function
    catalog come from the companion JSON config at ``capacity_config``.
    """
    with open(path) as fh:
        text = fh.read()
    if format == "json":
        return loads_instance(text)
    if format == "sndlib_native":
        node_ids, links, demands = _parse_sndlib(text)
        companion = None
        if capacity_config:
            with open(capacity_config) as fh:
                companion = json.load(fh)
        return _merge_companion(node_ids, links, demands, companion)
    raise ValueError(f"unknown format {format!r}")


# --- synthetic demand generation ------------------------------------------


def generate_demands(
    instance: Instance,
    demand_range: tuple[float, float],
    num_resources: int,
    z_stretch: float,
    seed: int,
) -> Instance:
    """Replace functions/demands with one synthetic function per flow whose
    per-resource demand is uniform in ``demand_range``, and set every node
    capacity to ``z_stretch`` times the maximum per-flow total demand.

    Draw order is fixed (flows in instance order, resources in index order)
    and driven by :class:`SplitMix64`, so output is deterministic per seed.
    """
    lo, hi = demand_range
    if not (hi >= lo >= 0.0):
        raise InvalidRange(f"need hi >= lo >= 0, got [{lo}, {hi}]")
    if not (z_stretch > 1.0):
        raise InvalidRange(f"need z_stretch > 1, got {z_stretch}")
    if num_resources < 1:
        raise InvalidRange("need at least one resource")
    resources = tuple(f"r{i+1}" for i in range(num_resources))
    rng = SplitMix64(seed)
    functions = []
    flows = []
    d_max = 0.0
    for f in instance.flows:
        fn_id = f"fn_{f.id}"
        beta = {r: rng.uniform(lo, hi) for r in resources}
        functions.append(NetworkFunction(fn_id, beta))
        flows.append(replace(f, required_functions=frozenset({fn_id})))
        d_max = max(d_max, max(beta[r] for r in resources) * f.rate)
    cap = z_stretch * d_max
    nodes = tuple(Node(n.id, {r: cap for r in resources}) for n in instance.nodes)
    return Instance(resources, nodes, instance.edges, tuple(functions), tuple(flows))


# --- topology builders -----------------------------------------------------


def _skeleton(
    node_ids: Sequence[str],
    edges: Sequence[tuple[str, str, float]],
    num_flows: int,
    rate_seed: int,
    include_self_pairs: bool = False,
) -> Instance:
    """Instance skeleton with placeholder demands; pair it with
    :func:`generate_demands` before running any algorithm."""
    rng = SplitMix64(rate_seed ^ 0xA5A5A5A5)
    pairs = [
        (u, v)
        for u in node_ids
        for v in node_ids
        if include_self_pairs or u != v
    ]
    flows = []
    for i in range(num_flows):
        u, v = pairs[i % len(pairs)]
        flows.append(
            Flow(
                id=f"f{i+1}",
                src=u,
                dst=v,
                rate=rng.uniform(1.0, 10.0),
                required_functions=frozenset({"fn_seed"}),
            )
        )
    inst = Instance(
        resources=("r1",),
        nodes=tuple(Node(v, {"r1": 1.0}) for v in node_ids),
        edges=tuple(edges),
        functions=(NetworkFunction("fn_seed", {"r1": 1.0}),),
        flows=tuple(flows),
    )
    return compute_paths(inst, "routing_cost")


def line_topology(num_nodes: int, num_flows: int, rate_seed: int = 0) -> Instance:
    ids = [f"n{i+1}" for i in range(num_nodes)]
    edges = [(ids[i], ids[i + 1], 1.0) for i in range(num_nodes - 1)]
    return _skeleton(ids, edges, num_flows, rate_seed)


def ring_topology(num_nodes: int, num_flows: int, rate_seed: int = 0) -> Instance:
    ids = [f"n{i+1}" for i in range(num_nodes)]
    edges = [(ids[i], ids[(i + 1) % num_nodes], 1.0) for i in range(num_nodes)]
    return _skeleton(ids, edges, num_flows, rate_seed)


def random_topology(num_nodes: int, num_flows: int, rate_seed: int = 0) -> Instance:
    """Random connected topology: a spanning chain plus extra random edges."""
    ids = [f"n{i+1}" for i in range(num_nodes)]
    rng = SplitMix64(rate_seed ^ 0x5EED)
    edges = [(ids[i], ids[i + 1], 1.0 + rng.uniform(0.0, 4.0)) for i in range(num_nodes - 1)]
    extra = max(0, num_nodes)
    have = {(u, v) for (u, v, _) in edges}
    for _ in range(extra):
        i = rng.randrange(num_nodes)
        j = rng.randrange(num_nodes)
        u, v = ids[min(i, j)], ids[max(i, j)]
        if i == j or (u, v) in have:
            continue
        have.add((u, v))
        edges.append((u, v, 1.0 + rng.uniform(0.0, 4.0)))
    return _skeleton(ids, edges, num_flows, rate_seed)


# 12-node North-American research backbone layout (public topology), used as
# the desk-scale stand-in for trace-driven experiments.  Flow rates are drawn
# once per rate_seed; all 144 ordered node pairs (self pairs included) carry
# one flow.
_ABILENE_NODES = [
    "ATLA", "CHIN", "DNVR", "HSTN", "IPLS", "KSCY",
    "LOSA", "NYCM", "SNVA", "STTL", "SUNN", "WASH",
]
_ABILENE_EDGES = [
    ("ATLA", "HSTN"), ("ATLA", "IPLS"), ("ATLA", "WASH"),
    ("CHIN", "IPLS"), ("CHIN", "NYCM"),
    ("DNVR", "KSCY"), ("DNVR", "SNVA"), ("DNVR", "STTL"),
    ("HSTN", "KSCY"), ("HSTN", "LOSA"),
    ("IPLS", "KSCY"),
    ("LOSA", "SNVA"),
    ("NYCM", "WASH"),
    ("SNVA", "SUNN"), ("STTL", "SUNN"),
]


def abilene_topology(rate_seed: int = 0) -> Instance:
    edges = [(u, v, 1.0) for (u, v) in _ABILENE_EDGES]
    return _skeleton(
        _ABILENE_NODES, edges, num_flows=144, rate_seed=rate_seed,
        include_self_pairs=True,
    )

"""Shared fixtures: the hand-checkable reference instance and seeded
random instance generators small enough for the exhaustive solvers."""

import itertools
import os

import pytest

import vnfplace as vp
from vnfplace.model import Flow, Instance, NetworkFunction, Node, SplitMix64

DATA_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "data")
TIGHT3 = os.path.abspath(os.path.join(DATA_DIR, "tight3.json"))


@pytest.fixture(scope="session")
def tight3():
    return vp.load_instance(TIGHT3)


def make_random_instance(
    seed: int,
    num_nodes: int = 4,
    num_flows: int = 6,
    num_resources: int = 2,
    max_chain: int = 2,
    demand_hi: float = 4.0,
    capacity_hi: float = 30.0,
):
    """A connected random instance with explicit paths, suitable for the
    exhaustive reference solvers.  Deterministic in ``seed``."""
    rng = SplitMix64(seed)
    resources = [f"r{i}" for i in range(num_resources)]
    node_ids = [f"v{i}" for i in range(num_nodes)]
    nodes = [
        Node(nid, {r: 1.0 + rng.uniform(0.0, capacity_hi) for r in resources})
        for nid in node_ids
    ]
    # A line backbone keeps every pair connected; paths follow the line.
    edges = [(node_ids[i], node_ids[i + 1], 1.0) for i in range(num_nodes - 1)]
    nfs = []
    for i in range(num_flows):
        nfs.append(
            NetworkFunction(
                f"g{i}", {r: rng.uniform(0.0, demand_hi) for r in resources}
            )
        )
    flows = []
    for i in range(num_flows):
        a = int(rng.uniform(0, num_nodes)) % num_nodes
        b = int(rng.uniform(0, num_nodes)) % num_nodes
        lo_i, hi_i = min(a, b), max(a, b)
        path = tuple(node_ids[lo_i : hi_i + 1])
        chain = {f"g{(i + j) % num_flows}" for j in range(1 + int(rng.uniform(0, max_chain)))}
        flows.append(
            Flow(
                f"f{i}",
                node_ids[a],
                node_ids[b],
                rate=rng.uniform(0.1, 3.0),
                required_functions=frozenset(chain),
                path=path if a <= b else tuple(reversed(path)),
            )
        )
    return Instance(
        resources=tuple(resources), nodes=tuple(nodes), edges=tuple(edges),
        functions=tuple(nfs), flows=tuple(flows),
    )


def node_subsets(instance, max_size=None):
    ids = [n.id for n in instance.nodes]
    max_size = len(ids) if max_size is None else max_size
    for size in range(1, max_size + 1):
        yield from itertools.combinations(ids, size)

"""Joint placement of processing nodes and traffic allocation for service
chains: greedy placement with a submodular-style guarantee, fractional and
integral allocators, exhaustive reference solvers, and a sweep harness.
"""

from .errors import (
    DegenerateInstance,
    InvalidRange,
    InvalidRates,
    NumericalFailure,
    ParseError,
    TooLarge,
    UnknownId,
    UnreachablePair,
    ValidationError,
    VnfPlaceError,
    ZTooSmall,
)
from .experiment import ExperimentConfig, RunRecord, records_to_csv, run_sweep
from .fractional import (
    AllocationResult,
    AssignmentMatrix,
    build_node_lp,
    full_fractional_allocation,
    iterative_allocation,
    r4_with_rates,
)
from .integral import (
    IntegralAssignment,
    NormalizedInstance,
    allocation_lp_bound,
    normalize,
    nra,
    pra,
    processed_traffic,
)
from .lp import LinearProgram, LpSolution, LpStatus, solve
from .model import (
    Flow,
    Instance,
    NetworkFunction,
    Node,
    SplitMix64,
    abilene_topology,
    compute_paths,
    covered_flows,
    demand_table,
    dumps_instance,
    flow_total_demand,
    generate_demands,
    line_topology,
    load_instance,
    loads_instance,
    random_topology,
    ring_topology,
    save_instance,
)
from .oracle import (
    ExactResult,
    optimal_allocation_exact,
    optimal_exact,
    optimal_sequence_r4,
)
from .placement import PlacementResult, sg, ssg

__version__ = "0.1.0"

"""Conference key and GHZ distillation rates for small multipartite states."""

from .classical import classical_min_entropy, iid_power, smooth_min_entropy
from .errors import BudgetError, InputError, InvariantError, QconfError
from .families import (
    against_co_local_information,
    default_pbit,
    example_against_co,
    example_against_co_pure,
    example_ghz,
    example_pbit,
)
from .linalg import (
    DimProfile,
    coherent_information,
    conditional_entropy,
    fidelity,
    hermitian_eigen,
    kron,
    partial_trace,
    permute_subsystems,
    purified_distance,
    trace_distance,
    von_neumann_entropy,
)
from .lp import lexmin_optimal_vertex, solve_covering_lp
from .protocol import (
    FinalKeyState,
    ProtocolSpec,
    SimulationReport,
    build_iid_source,
    decode_omniscience,
    direct_against_co_protocol,
    privacy_amplify,
    random_binning,
    run_protocol,
    secrecy_distance,
)
from .rates import (
    RateConstraint,
    RateRegion,
    RateReport,
    co_constraints_c,
    co_constraints_cq,
    combing_ghz_rate,
    eoa_lower_bound,
    ghz_rate_c,
    ghz_rate_cq,
    ghz_rate_cq_single_copy,
    key_rate_c,
    key_rate_cq,
    min_cut_coherent_information,
    min_sum_rate,
)
from .states import (
    CqState,
    Instrument,
    MultipartiteState,
    apply_instruments,
    purify,
    random_instrument,
    random_state,
)
from .trees import EdgeWeightGraph, tree_ghz_rate, tree_ghz_rate_from_state

__version__ = "0.1.0"

"""Exact state-vector simulation of constrained adiabatic optimization.

The package simulates Q-CHOP (constrained-rotation adiabatic optimization)
and the penalty-based standard adiabatic algorithm on five problem families,
with slack-qudit handling of inequality constraints and the benchmark
metrics used to compare the two.
"""

from .hilbert import (
    CompositeSpace,
    StateVector,
    apply_diagonal,
    apply_global_spin,
    apply_rotated_zstring,
    apply_slack_mixer,
)
from .problems import (
    AffineForm,
    ConstrainedProblem,
    InstanceRejected,
    OracleResult,
    ParseError,
    PatternProjector,
    ZPolynomial,
    brute_force_solve,
    encode_auction,
    encode_dmds,
    encode_etf,
    encode_knapsack,
    encode_mis,
    gen_auction_instance,
    gen_dmds_instance,
    gen_erdos_renyi,
    gen_etf_instance,
    gen_knapsack_instance,
    gen_mis_instance,
    load_instance,
    save_instance,
    slack_value_set,
)
from .hamiltonians import (
    QCHOP,
    QCHOP_CD,
    SAA,
    HamiltonianProgram,
    NormalizationReport,
    RotationPolicy,
    build_qchop,
    build_relaxed,
    build_saa,
    choose_lambda,
    composite_space_for,
    constraint_diagonal,
    normalize_objective,
    normalize_problem,
    qchop_initial_state,
    saa_initial_state,
    yww_effective_hamiltonian,
)
from .evolve import (
    IntegrationError,
    Schedule,
    SweepResult,
    Trajectory,
    evolve,
    resolve_runtime,
    run_single,
    sweep,
)
from .metrics import (
    MetricsReport,
    StateMetrics,
    approx_ratio,
    eps_optimal_prob,
    feasible_prob,
    optimal_prob,
)

__version__ = "0.1.0"

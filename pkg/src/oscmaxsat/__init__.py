"""Oscillator-dynamics MaxSAT solver with exact scoring and a benchmark harness."""

from .cnf import (
    Assignment,
    Clause,
    CnfFormula,
    DimacsError,
    DimacsWarning,
    Literal,
    brute_force_maxsat,
    count_satisfied,
    generate_random_ksat,
    parse_dimacs,
    parse_dimacs_file,
    serialize_dimacs,
)
from .dynamics import (
    DynamicsParams,
    EntropyParams,
    PhaseState,
    clause_value,
    entropy_rate_proxy,
    feedback_signal,
    literal_value,
    or_transition_count,
    sde_step,
)
from .solver import (
    ReductionState,
    SolveResult,
    SolverConfig,
    default_config,
    default_dynamics,
    merge_assignment,
    post_process,
    readout,
    reduce_problem,
    run_trajectory,
    solve,
)

__version__ = "0.1.0"

"""Episodic strategies and finite-horizon approximation for two-agent
stochastic games: exact backward-induction solvers, approximation-error
bounds, reachability checks on the episodic state extension, and
decentralized Boltzmann Q-learning with a reproducible simulation harness.
"""

from .game_model import (
    ExtendedSpace,
    GameFormatError,
    GameValidationError,
    StageClassification,
    StochasticGame,
    classify,
    extend,
    game_to_document,
    load_game,
)
from .graphs import (
    DirectedGraph,
    build_graph,
    extend_graph,
    extended_strongly_connected,
    has_coprime_cycle,
    strongly_connected,
    strongly_connected_components,
)
from .stage_games import (
    LogitFixedPoint,
    LogitSolveError,
    MatrixGame,
    ZeroSumSolution,
    boltzmann_floor,
    entropy_gap,
    is_zero_sum,
    logit_fixed_point,
    recover_potential,
    smoothed_best_response,
    solve_zero_sum,
    strategic_equivalence_offset,
)
from .solvers import (
    BackwardInductionError,
    BestResponseResult,
    BoundReport,
    EpisodicStrategy,
    MultichainError,
    SolutionTables,
    backward_induction_logit,
    backward_induction_minimax,
    bound_report,
    consistency_residual,
    delta,
    epsilon_bound,
    epsilon_bound_learning,
    evaluate_finite,
    evaluate_finite_all,
    evaluate_infinite,
    evaluate_infinite_all,
    finite_best_response,
    geometric_sum,
    infinite_exploitability,
    uniform_strategy,
)
from .learning import (
    AgentTables,
    EpisodicLearner,
    IndividualQRun,
    LearningConfig,
    PayoffSequence,
    reference_step_size,
    run_individual_q_sequence,
    step_size,
)
from .simulation import (
    Environment,
    LearningRun,
    MetricRow,
    RunMetrics,
    UtilityEstimate,
    estimate_utility,
    induced_strategy,
    run_learning,
)

__version__ = "0.1.0"

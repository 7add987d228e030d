"""Strategy exploration toolkit for empirical game-theoretic analysis."""

from .evaluation import (
    MrcpSolver,
    RegretCurve,
    combined_game_eval,
    consistency_report,
    regret_against,
    regret_curve,
    select_eval_solver,
    solver_based_regret,
    warm_started_mrcp_curve,
)
from .game import (
    DimensionError,
    InfeasibleFloorError,
    NormalFormGame,
    best_response,
    deviation_payoffs,
    expected_payoff,
    load_game,
    player_regret,
    profile_regret_max,
    profile_regret_sum,
    project_to_simplex,
    save_game,
)
from .games import (
    GameSpec,
    example1_game,
    kuhn_normal_form,
    random_zero_sum,
    sample_subgame,
    unstable_ne_game,
)
from .mrcp import (
    AmoebaParams,
    MrcpResult,
    approx_mrcp,
    compute_mrcp,
    mrcp_amoeba_binary_search,
    mrcp_amoeba_projected,
    mrcp_brute_force,
    regret_upper_bound,
)
from .psro import Checkpoint, PsroTrace, run_psro
from .restriction import EmpiricalGame, add_strategy, combine, lift_profile, restrict
from .solvers import MetaSolver, make_solver, nash_lp, prd, replicator_dynamics

__all__ = [name for name in dir() if not name.startswith("_")]

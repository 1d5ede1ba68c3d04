"""Two-player stochastic LQ games with a costly, jointly controlled observation switch.

Solver pipeline: validate a game description, run the coupled Riccati
backward pass for the feedback gains, run backward induction over the
reachable covariance tree for the joint switching policy and the welfare
benchmark, then check everything against seeded closed-loop Monte Carlo
roll-outs.
"""

from .estimator import (
    ERASURE,
    Erasure,
    EstimatorState,
    covariance_path,
    filter_stage,
    predict_cov,
    predict_stage,
    predict_state,
    update_cov,
    update_state,
)
from .model import (
    GameSpec,
    SpecFormatError,
    SpecValidationError,
    dump_spec,
    load_spec,
    validate_spec,
)
from .riccati import (
    RiccatiSolution,
    SingularSystemError,
    riccati_step,
    solve_gains_at,
    solve_riccati,
)
from .simulate import (
    ComparisonTable,
    SimSummary,
    TrajectoryRecord,
    batch_rollout,
    compare_baselines,
    draw_noise_batch,
    monte_carlo,
    noise_for_run,
    psd_factor,
    rollout,
)
from .switching import (
    INIT,
    CovNode,
    ObsAge,
    SwitchPolicy,
    ValueTables,
    backward_induction,
    centralized_induction,
    expected_total_cost,
    never_close_policy,
    price_of_anarchy,
    reachable_nodes,
    schedule_cost,
    since,
    stage_cost,
    switch_decision,
    switching_ratio,
    switching_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "ERASURE",
    "Erasure",
    "EstimatorState",
    "GameSpec",
    "SpecFormatError",
    "SpecValidationError",
    "RiccatiSolution",
    "SingularSystemError",
    "ComparisonTable",
    "SimSummary",
    "TrajectoryRecord",
    "INIT",
    "CovNode",
    "ObsAge",
    "SwitchPolicy",
    "ValueTables",
    "backward_induction",
    "batch_rollout",
    "centralized_induction",
    "compare_baselines",
    "covariance_path",
    "draw_noise_batch",
    "dump_spec",
    "expected_total_cost",
    "filter_stage",
    "load_spec",
    "monte_carlo",
    "never_close_policy",
    "noise_for_run",
    "predict_cov",
    "predict_stage",
    "predict_state",
    "price_of_anarchy",
    "psd_factor",
    "reachable_nodes",
    "riccati_step",
    "rollout",
    "schedule_cost",
    "since",
    "solve_gains_at",
    "solve_riccati",
    "stage_cost",
    "switch_decision",
    "switching_ratio",
    "switching_threshold",
    "update_cov",
    "update_state",
    "validate_spec",
]

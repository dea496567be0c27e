"""Feedback-dyad toolkit.

Classical integrated information and Q-shapes for two-unit feedback
circuits, distance-constrained collapse-operator optimization, deterministic
and stochastic simulation of the resulting collapse dynamics, and the
density-operator version of the integrated-information calculus.
"""

from .errors import (
    DependencyMismatch,
    DyadError,
    GridMismatch,
    InfeasibleTable,
    InfiniteDivergence,
    KLUndefined,
    NotCrossCoupled,
    NotUnitary,
    StepTooLarge,
    UnsupportedState,
    ZeroMarginal,
)
from .model import ALL_STATES, DyadState, Tpm2, identity_tpm, not_swap, swap
from .optimizer import (
    SWAP_TABLE,
    EigenAssignment,
    OptimizationResult,
    feasible,
    grid_oracle,
    pairwise_rate_sum,
    solve,
)
from .phi import PhiReport, big_phi, noised_effect_prob, phi_cause, phi_effect, phi_unit
from .qdyn import (
    TrajectoryRecord,
    build_collapse_operator,
    coherence_decay_rate,
    derive_trajectory_seed,
    ensemble_average,
    lindblad_evolve,
    lindblad_path,
    prepare_dyad_superposition,
    sde_trajectory,
    simulate_ensemble,
    trace_distance,
)
from .qiit import (
    QuantumPhiReport,
    qid,
    quantum_big_phi,
    quantum_phi_unit,
    quantum_relative_entropy,
    spectral_ensemble,
    swap_unitary,
    unitary_step,
)
from .qshape import (
    QShape,
    QShape4Style,
    build_qshape,
    build_qshape_iit4,
    distance_table,
    qshape_distance,
    row_distance,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_STATES",
    "DependencyMismatch",
    "DyadError",
    "DyadState",
    "EigenAssignment",
    "GridMismatch",
    "InfeasibleTable",
    "InfiniteDivergence",
    "KLUndefined",
    "NotCrossCoupled",
    "NotUnitary",
    "OptimizationResult",
    "PhiReport",
    "QShape",
    "QShape4Style",
    "QuantumPhiReport",
    "StepTooLarge",
    "SWAP_TABLE",
    "Tpm2",
    "TrajectoryRecord",
    "UnsupportedState",
    "ZeroMarginal",
    "big_phi",
    "build_collapse_operator",
    "build_qshape",
    "build_qshape_iit4",
    "coherence_decay_rate",
    "derive_trajectory_seed",
    "distance_table",
    "ensemble_average",
    "feasible",
    "grid_oracle",
    "identity_tpm",
    "lindblad_evolve",
    "lindblad_path",
    "noised_effect_prob",
    "not_swap",
    "pairwise_rate_sum",
    "phi_cause",
    "phi_effect",
    "phi_unit",
    "prepare_dyad_superposition",
    "qid",
    "qshape_distance",
    "quantum_big_phi",
    "quantum_phi_unit",
    "quantum_relative_entropy",
    "row_distance",
    "sde_trajectory",
    "simulate_ensemble",
    "solve",
    "spectral_ensemble",
    "swap",
    "swap_unitary",
    "trace_distance",
    "unitary_step",
]

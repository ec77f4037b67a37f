# Inference engine: classical enumeration, interference inference and phase search
from app.engine.classical import Distribution, infer_classical, joint_probability, joint_table
from app.engine.phase_search import (
    SearchResult,
    SweepTrace,
    fit_theta_to_target,
    grid_search,
    match_theta_permutation,
    sweep_pair,
    sweep_shared_phase,
)
from app.engine.quantum import (
    PathAmplitude,
    QuantumInferenceResult,
    ThetaVector,
    enumerate_paths,
    infer_quantum,
    marginal_partial_trace,
)

__all__ = [
    "Distribution", "PathAmplitude", "QuantumInferenceResult", "SearchResult", "SweepTrace",
    "ThetaVector", "enumerate_paths", "fit_theta_to_target", "grid_search", "infer_classical",
    "infer_quantum", "joint_probability", "joint_table", "marginal_partial_trace",
    "match_theta_permutation", "sweep_pair", "sweep_shared_phase",
]

"""
Quantum-like inference
----------------------
Every configuration of the unobserved variables is a path whose amplitude
magnitude is the square root of its classical joint probability. Paths of the
same query state interfere through one phase per configuration; the phase
vector is shared by all query states because the unobserved set is the same
for each of them.

The per-state unnormalised value is

    sum_i p_i + 2 sum_{i<j} sqrt(p_i p_j) cos(theta_i - theta_j)

which equals |sum_i sqrt(p_i) exp(i theta_i)|^2 and is therefore never
negative. Normalising over the query states gives the distribution.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.engine.classical import (
    Distribution,
    check_query,
    evidence_slice,
    joint_array,
    product_array,
)
from app.exceptions import QBNError, ThetaLengthError, ZeroEvidenceError
from app.network.models import Assignment, Evidence, Network

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi

# Rounding slack below zero tolerated for |.|^2 quantities
NEGATIVE_SLACK = 1e-12


def amplitude_from_probability(p: float) -> float:
    """Born rule: the magnitude of an amplitude is the square root of its probability"""
    if not 0.0 <= p <= 1.0:
        raise QBNError(f"probability {p} outside [0, 1]")
    return math.sqrt(p)


@dataclass(frozen=True)
class PathAmplitude:
    config: Assignment
    probability: float
    magnitude: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "magnitude", amplitude_from_probability(self.probability))


@dataclass(frozen=True)
class ThetaVector:
    """One phase per unobserved configuration, wrapped into [0, 2pi)"""
    phases: Tuple[float, ...]

    def __post_init__(self):
        raw = np.asarray(self.phases, dtype=float)
        if not np.isfinite(raw).all():
            raise QBNError(f"phases must be finite, got {self.phases}")
        wrapped = np.mod(raw, TWO_PI)
        wrapped[wrapped >= TWO_PI] = 0.0
        object.__setattr__(self, "phases", tuple(float(x) for x in wrapped))

    @classmethod
    def zeros(cls, k: int) -> "ThetaVector":
        return cls((0.0,) * k)

    def shifted(self, c: float) -> "ThetaVector":
        return ThetaVector(tuple(x + c for x in self.phases))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.phases, dtype=float)

    def __len__(self) -> int:
        return len(self.phases)


@dataclass(frozen=True)
class QuantumInferenceResult:
    query: str
    states: Tuple[str, ...]
    classical_mass: Tuple[float, ...]
    interference: Tuple[float, ...]
    unnormalized: Tuple[float, ...]
    alpha: float
    distribution: Tuple[float, ...]
    thetas: ThetaVector

    def as_distribution(self) -> Distribution:
        return Distribution(self.query, self.states, self.distribution)

    def __getitem__(self, label: str) -> float:
        return self.distribution[self.states.index(label)]


# Single-path and observed multi-path rules
def path_probability_single(chain: Iterable[float]) -> float:
    """Probability of one path through a chain: the product of its transitions"""
    return math.prod(chain)


def multipath_probability_observed(paths: Sequence[PathAmplitude]) -> float:
    """Observed paths add probabilities, not amplitudes: no cross terms"""
    return float(sum(path.probability for path in paths))


# Interference kernel
def interference_terms(magnitudes: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """2 sum_{i<j} m_i m_j cos(theta_i - theta_j) over the last axis, broadcasting the rest"""
    magnitudes = np.asarray(magnitudes, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    k = magnitudes.shape[-1]
    upper_i, upper_j = np.triu_indices(k, 1)
    weights = magnitudes[..., upper_i] * magnitudes[..., upper_j]
    cosines = np.cos(thetas[..., upper_i] - thetas[..., upper_j])
    return 2.0 * (weights * cosines).sum(axis=-1)


def interference_term(paths: Sequence[PathAmplitude], thetas: ThetaVector) -> float:
    if len(paths) != len(thetas):
        raise ThetaLengthError(f"{len(paths)} paths but {len(thetas)} phases")
    magnitudes = np.array([path.magnitude for path in paths])
    return float(interference_terms(magnitudes, thetas.as_array()))


def modulus_form(paths: Sequence[PathAmplitude], thetas: ThetaVector) -> float:
    """|sum_i sqrt(p_i) exp(i theta_i)|^2"""
    if len(paths) != len(thetas):
        raise ThetaLengthError(f"{len(paths)} paths but {len(thetas)} phases")
    magnitudes = np.array([path.magnitude for path in paths])
    return float(np.abs(np.sum(magnitudes * np.exp(1j * thetas.as_array()))) ** 2)


# Paths of a query
def unobserved_variables(net: Network, query: str, evidence: Evidence) -> List[str]:
    return [name for name in net.order if name != query and name not in evidence]


def path_count(net: Network, query: str, evidence: Optional[Evidence] = None) -> int:
    """K: number of unobserved configurations, 1 when nothing is summed out"""
    evidence = evidence or {}
    return math.prod(net.variable(n).cardinality for n in unobserved_variables(net, query, evidence))


@dataclass(frozen=True)
class PathSet:
    """Path probabilities of every query state, rows aligned by configuration index"""
    query: str
    states: Tuple[str, ...]
    unobserved: Tuple[str, ...]
    probabilities: np.ndarray  # (S, K)

    @property
    def k(self) -> int:
        return self.probabilities.shape[1]

    @property
    def magnitudes(self) -> np.ndarray:
        return np.sqrt(self.probabilities)

    @property
    def classical_mass(self) -> np.ndarray:
        return self.probabilities.sum(axis=1)

    def unnormalized(self, thetas: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(interference, unnormalised) for a batch of phase vectors, each (N, S)"""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        if thetas.shape[-1] != self.k:
            raise ThetaLengthError(f"{self.k} paths per state but {thetas.shape[-1]} phases")
        if not np.isfinite(thetas).all():
            raise QBNError("phases must be finite")
        interference = interference_terms(self.magnitudes[None, :, :], thetas[:, None, :])
        raw = self.classical_mass[None, :] + interference
        if (raw < -NEGATIVE_SLACK).any():
            raise QBNError(f"negative unnormalised probability {raw.min():.3e}")
        return interference, np.maximum(raw, 0.0)

    def evaluate(self, thetas: np.ndarray) -> np.ndarray:
        """Normalised distributions (N, S); rows with no mass at all are NaN"""
        _, unnormalized = self.unnormalized(thetas)
        totals = unnormalized.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(totals > 0.0, unnormalized / totals, np.nan)


def path_set(net: Network, query: str, evidence: Optional[Evidence] = None) -> PathSet:
    evidence = dict(evidence or {})
    check_query(net, query, evidence)
    selected = joint_array(net)[evidence_slice(net, evidence)]
    remaining = [name for name in net.order if name not in evidence]
    states = net.variable(query).states
    probabilities = np.moveaxis(selected, remaining.index(query), 0).reshape(len(states), -1)
    unobserved = tuple(unobserved_variables(net, query, evidence))
    logger.debug("Query %s has %d path(s) per state", query, probabilities.shape[1])
    return PathSet(query, states, unobserved, probabilities)


def enumerate_paths(
    net: Network, query: str, query_state: int, evidence: Optional[Evidence] = None
) -> List[PathAmplitude]:
    """One path per unobserved configuration, canonical index order"""
    paths = path_set(net, query, evidence)
    if not 0 <= query_state < len(paths.states):
        raise QBNError(f"state index {query_state} out of range for '{query}'")
    ranges = [range(net.variable(n).cardinality) for n in paths.unobserved]
    configs = (dict(zip(paths.unobserved, states)) for states in itertools.product(*ranges))
    return [
        PathAmplitude(config, float(p))
        for config, p in zip(configs, paths.probabilities[query_state])
    ]


# Density diagonal and partial trace
def density_diagonal(net: Network, max_configurations: Optional[int] = None) -> np.ndarray:
    """Squared magnitudes of the joint-state amplitudes (products of sqrt CPT entries)"""
    amplitudes = product_array(net, np.sqrt, max_configurations)
    return (amplitudes ** 2).ravel()


def marginal_partial_trace(net: Network, query: str, evidence: Optional[Evidence] = None) -> Distribution:
    """Sum the diagonal entries consistent with each query state and the evidence"""
    evidence = dict(evidence or {})
    check_query(net, query, evidence)
    diagonal = density_diagonal(net)
    states = np.unravel_index(np.arange(diagonal.size), net.shape)

    keep = np.ones(diagonal.size, dtype=bool)
    for name, value in evidence.items():
        keep &= states[net.axis[name]] == value
    query_states = states[net.axis[query]]
    mass = np.array([diagonal[keep & (query_states == s)].sum() for s in range(net.variable(query).cardinality)])

    total = float(mass.sum())
    if total <= 0.0:
        raise ZeroEvidenceError(f"evidence {evidence} has probability zero; alpha is undefined")
    return Distribution(query, net.variable(query).states, tuple(float(m) / total for m in mass))


# Interference-augmented marginalisation
def infer_quantum(
    net: Network, query: str, evidence: Optional[Evidence], thetas: ThetaVector
) -> QuantumInferenceResult:
    paths = path_set(net, query, evidence)
    if len(thetas) != paths.k:
        raise ThetaLengthError(
            f"query '{query}' has {paths.k} unobserved configuration(s) but {len(thetas)} phases were given"
        )
    interference, unnormalized = paths.unnormalized(thetas.as_array())
    total = float(unnormalized[0].sum())
    if total <= 0.0:
        raise ZeroEvidenceError(f"total unnormalised mass is {total}; alpha is undefined")
    distribution = paths.evaluate(thetas.as_array())[0]
    return QuantumInferenceResult(
        query=query,
        states=paths.states,
        classical_mass=tuple(float(x) for x in paths.classical_mass),
        interference=tuple(float(x) for x in interference[0]),
        unnormalized=tuple(float(x) for x in unnormalized[0]),
        alpha=1.0 / total,
        distribution=tuple(float(x) for x in distribution),
        thetas=thetas,
    )

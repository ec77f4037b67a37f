"""
Phase search
------------
Sweeps and searches over phase vectors for one query. Every procedure works on
a PathSet and evaluates whole batches of phase vectors through the same kernel
that infer_quantum uses, so a reported optimum re-evaluates to the same value.

theta_1 (index 0) is pinned to 0 by the searches: only phase differences
change the result.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import optimize

from app.config import get_settings
from app.engine.quantum import TWO_PI, PathSet, ThetaVector, path_set
from app.exceptions import SearchError, ThetaLengthError, ZeroEvidenceError
from app.network.models import Evidence, Network

logger = logging.getLogger(__name__)

STRATEGIES = ("exhaustive", "fix-and-vary-2", "coordinate-ascent")
EXHAUSTIVE_MAX_FREE = 3
PERMUTATION_MAX_K = 8
_CHUNK = 1 << 16


def phase_grid(step: float, closed: bool = False) -> np.ndarray:
    """k * step for every k with k * step < 2pi; closed=True appends 2pi itself"""
    if not (math.isfinite(step) and step > 0):
        raise SearchError(f"step must be positive, got {step}")
    count = math.ceil(TWO_PI / step - 1e-9)
    grid = np.arange(count) * step
    if closed and grid[-1] < TWO_PI:
        grid = np.append(grid, TWO_PI)
    return grid


def resolve_state(paths: PathSet, state: Union[int, str]) -> int:
    if isinstance(state, str):
        if state not in paths.states:
            raise SearchError(f"'{paths.query}' has no state '{state}'")
        return paths.states.index(state)
    if not 0 <= state < len(paths.states):
        raise SearchError(f"state index {state} out of range for '{paths.query}'")
    return int(state)


# Sweeps
@dataclass(frozen=True)
class SweepAxis:
    indices: Tuple[int, ...]  # phases that move together along this axis
    step: float
    start: float
    count: int


@dataclass(frozen=True)
class SweepTrace:
    query: str
    states: Tuple[str, ...]
    axes: Tuple[SweepAxis, ...]
    thetas: np.ndarray  # (N, K)
    probabilities: np.ndarray  # (N, S)

    @property
    def samples(self) -> List[Tuple[Tuple[float, ...], Tuple[float, ...]]]:
        return [(tuple(t), tuple(p)) for t, p in zip(self.thetas.tolist(), self.probabilities.tolist())]

    def to_frame(self) -> pd.DataFrame:
        """Columns theta_1..theta_k then p_<state>, one row per sample"""
        frame = pd.DataFrame(self.thetas, columns=[f"theta_{i + 1}" for i in range(self.thetas.shape[1])])
        for s, label in enumerate(self.states):
            frame[f"p_{label}"] = self.probabilities[:, s]
        return frame


def _evidence_paths(net: Network, query: str, evidence: Optional[Evidence]) -> PathSet:
    paths = path_set(net, query, evidence)
    if paths.classical_mass.sum() <= 0.0:
        raise ZeroEvidenceError(f"evidence {evidence} has probability zero; alpha is undefined")
    return paths


def _checked(paths: PathSet, thetas: np.ndarray) -> np.ndarray:
    probabilities = paths.evaluate(thetas)
    if np.isnan(probabilities).any():
        raise ZeroEvidenceError("some phase vectors leave no probability mass; alpha is undefined")
    return probabilities


def sweep_shared_phase(
    net: Network, query: str, evidence: Optional[Evidence] = None, step: Optional[float] = None
) -> SweepTrace:
    """theta = (0, d, d, ..., d) for d over [0, 2pi]"""
    step = get_settings().sweep_step if step is None else step
    grid = phase_grid(step, closed=True)
    paths = _evidence_paths(net, query, evidence)

    thetas = np.zeros((grid.size, paths.k))
    thetas[:, 1:] = grid[:, None]
    axis = SweepAxis(tuple(range(1, paths.k)), step, 0.0, grid.size)
    logger.info("Shared-phase sweep of %s: %d samples", query, grid.size)
    return SweepTrace(query, paths.states, (axis,), thetas, _checked(paths, thetas))


def sweep_pair(
    net: Network,
    query: str,
    evidence: Optional[Evidence],
    fixed: ThetaVector,
    i: int,
    j: int,
    step: Optional[float] = None,
    start: float = 0.0,
) -> SweepTrace:
    """Vary theta_i (outer) and theta_j (inner) over the grid; the rest come from fixed"""
    step = get_settings().search_step if step is None else step
    paths = _evidence_paths(net, query, evidence)
    if len(fixed) != paths.k:
        raise ThetaLengthError(f"fixed vector has {len(fixed)} phases; the query has {paths.k} paths")
    for index in (i, j):
        if not 0 <= index < paths.k:
            raise SearchError(f"phase index {index} out of range 0..{paths.k - 1}")
    if i == j:
        raise SearchError("the two varied phases must differ")

    grid = start + phase_grid(step)
    n = grid.size
    thetas = np.tile(fixed.as_array(), (n * n, 1))
    thetas[:, i] = np.repeat(grid, n)
    thetas[:, j] = np.tile(grid, n)
    axes = (SweepAxis((i,), step, start, n), SweepAxis((j,), step, start, n))
    logger.info("Pair sweep of %s over phases %d and %d: %d samples", query, i, j, n * n)
    return SweepTrace(query, paths.states, axes, thetas, _checked(paths, thetas))


# Searches
@dataclass(frozen=True)
class SearchResult:
    best_probability: float
    best_thetas: ThetaVector
    evaluations: int
    strategy: str
    query: str = ""
    state: str = ""
    sense: str = "max"
    step: float = 0.0
    restarts: int = 0
    seed: Optional[int] = None


@dataclass
class AscentRun:
    thetas: np.ndarray
    score: float
    history: List[float] = field(default_factory=list)
    evaluations: int = 0


def _scorer(paths: PathSet, state: int, sense: str):
    sign = 1.0 if sense == "max" else -1.0

    def score(thetas: np.ndarray) -> np.ndarray:
        values = sign * paths.evaluate(thetas)[:, state]
        return np.where(np.isnan(values), -np.inf, values)

    return score


def coordinate_ascent(
    paths: PathSet,
    state: int,
    grid: np.ndarray,
    start: np.ndarray,
    sense: str = "max",
    max_sweeps: int = 100,
) -> AscentRun:
    """Line-search each free phase over the grid in turn; accept strict improvements only"""
    score = _scorer(paths, state, sense)
    thetas = np.array(start, dtype=float)
    run = AscentRun(thetas, float(score(thetas[None, :])[0]), evaluations=1)
    run.history.append(run.score)

    for _ in range(max_sweeps):
        improved = False
        for i in range(1, paths.k):
            candidates = np.tile(run.thetas, (grid.size, 1))
            candidates[:, i] = grid
            scores = score(candidates)
            run.evaluations += grid.size
            best = int(np.argmax(scores))
            if scores[best] > run.score:
                run.thetas = candidates[best]
                run.score = float(scores[best])
                run.history.append(run.score)
                improved = True
        if not improved:
            break
    return run


def _exhaustive(paths: PathSet, state: int, grid: np.ndarray, sense: str) -> Tuple[np.ndarray, int]:
    free = paths.k - 1
    if free > EXHAUSTIVE_MAX_FREE:
        raise SearchError(
            f"exhaustive search supports at most {EXHAUSTIVE_MAX_FREE} free phases "
            f"(theta_1 is pinned to 0); this query has {free}"
        )
    score = _scorer(paths, state, sense)
    total = grid.size ** free
    best_thetas, best_score = None, -np.inf
    for first in range(0, total, _CHUNK):
        flat = np.arange(first, min(first + _CHUNK, total))
        digits = np.stack(np.unravel_index(flat, (grid.size,) * free), axis=1)
        thetas = np.zeros((flat.size, paths.k))
        thetas[:, 1:] = grid[digits]
        scores = score(thetas)
        local = int(np.argmax(scores))
        # chunks arrive in lexicographic order, so keeping the first maximum breaks ties
        if best_thetas is None or scores[local] > best_score:
            best_thetas, best_score = thetas[local], scores[local]
    return best_thetas, total


def _fix_and_vary(
    paths: PathSet, state: int, grid: np.ndarray, sense: str, fixed: ThetaVector, pair: Tuple[int, int]
) -> Tuple[np.ndarray, int]:
    i, j = pair
    if len(fixed) != paths.k:
        raise ThetaLengthError(f"fixed vector has {len(fixed)} phases; the query has {paths.k} paths")
    if i == j or not (0 <= i < paths.k and 0 <= j < paths.k):
        raise SearchError(f"invalid phase pair ({i}, {j}) for {paths.k} paths")
    n = grid.size
    thetas = np.tile(fixed.as_array(), (n * n, 1))
    thetas[:, i] = np.repeat(grid, n)
    thetas[:, j] = np.tile(grid, n)
    scores = _scorer(paths, state, sense)(thetas)
    return thetas[int(np.argmax(scores))], n * n


def grid_search(
    net: Network,
    query: str,
    state: Union[int, str],
    evidence: Optional[Evidence] = None,
    step: Optional[float] = None,
    strategy: str = "coordinate-ascent",
    restarts: Optional[int] = None,
    seed: Optional[int] = None,
    sense: str = "max",
    fixed: Optional[ThetaVector] = None,
    pair: Optional[Tuple[int, int]] = None,
) -> SearchResult:
    """Optimise the normalised probability of one query state over the phase grid"""
    settings = get_settings()
    step = settings.search_step if step is None else step
    restarts = settings.restarts if restarts is None else restarts
    seed = settings.seed if seed is None else seed
    if strategy not in STRATEGIES:
        raise SearchError(f"unknown strategy '{strategy}' (choose from {', '.join(STRATEGIES)})")
    if sense not in ("max", "min"):
        raise SearchError(f"sense must be 'max' or 'min', got '{sense}'")

    grid = phase_grid(step)
    paths = _evidence_paths(net, query, evidence)
    s = resolve_state(paths, state)

    if paths.k == 1:
        best, evaluations = np.zeros(1), 1
    elif strategy == "exhaustive":
        best, evaluations = _exhaustive(paths, s, grid, sense)
    elif strategy == "fix-and-vary-2":
        if fixed is None or pair is None:
            raise SearchError("fix-and-vary-2 needs a fixed vector and a phase pair")
        best, evaluations = _fix_and_vary(paths, s, grid, sense, fixed, pair)
    else:
        if restarts < 1:
            raise SearchError(f"restarts must be at least 1, got {restarts}")
        rng = np.random.default_rng(seed)
        best, best_score, evaluations = None, -np.inf, 0
        for restart in range(restarts):
            start = np.zeros(paths.k)
            start[1:] = grid[rng.integers(0, grid.size, size=paths.k - 1)]
            run = coordinate_ascent(paths, s, grid, start, sense)
            evaluations += run.evaluations
            better = run.score > best_score
            tie = best is not None and run.score == best_score and tuple(run.thetas) < tuple(best)
            if best is None or better or tie:
                best, best_score = run.thetas, run.score
            logger.debug("Restart %d: %.6f (best %.6f)", restart, run.score, best_score)

    thetas = ThetaVector(tuple(best))
    probability = float(paths.evaluate(thetas.as_array())[0, s])
    if math.isnan(probability):
        raise ZeroEvidenceError(f"every phase vector on the grid cancels the mass of {query}")
    logger.info("%s search of %s=%s: %.6f after %d evaluations",
                strategy, query, paths.states[s], probability, evaluations)
    return SearchResult(
        best_probability=probability,
        best_thetas=thetas,
        evaluations=evaluations,
        strategy=strategy,
        query=query,
        state=paths.states[s],
        sense=sense,
        step=step,
        restarts=restarts if strategy == "coordinate-ascent" else 0,
        seed=seed if strategy == "coordinate-ascent" else None,
    )


# Fitting and matching
def _difference_curve(net: Network, query: str, evidence: Optional[Evidence], state: Union[int, str]):
    """Probability of the query state as a function of the phase difference of two paths"""
    paths = _evidence_paths(net, query, evidence)
    if paths.k != 2:
        raise SearchError(f"phase fitting needs exactly 2 paths; the query has {paths.k}")
    s = resolve_state(paths, state)

    def probability(delta: float) -> float:
        return float(paths.evaluate(np.array([[0.0, delta]]))[0, s])

    return probability


def attainable_range(
    net: Network, query: str, evidence: Optional[Evidence] = None, state: Union[int, str] = 0
) -> Tuple[float, float]:
    """(min, max) of the query-state probability over the two-path phase difference"""
    probability = _difference_curve(net, query, evidence, state)
    ends = sorted((probability(0.0), probability(np.pi)))
    return ends[0], ends[1]


def fit_theta_to_target(
    net: Network,
    query: str,
    evidence: Optional[Evidence],
    target: float,
    state: Union[int, str] = 0,
) -> float:
    """Phase difference in [0, pi] at which the query state reaches the target probability"""
    probability = _difference_curve(net, query, evidence, state)
    at_zero, at_pi = probability(0.0), probability(np.pi)
    low, high = min(at_zero, at_pi), max(at_zero, at_pi)
    if not low <= target <= high:
        raise SearchError(f"target {target} outside the attainable range [{low:.6f}, {high:.6f}]")

    # the probability is monotone in cos(delta), hence on [0, pi]
    if at_zero == target:
        return 0.0
    if at_pi == target:
        return float(np.pi)
    delta = optimize.bisect(lambda d: probability(d) - target, 0.0, np.pi, xtol=1e-12, maxiter=200)
    logger.info("Fitted phase difference %.6f for %s target %.6f", delta, query, target)
    return float(delta)


@dataclass(frozen=True)
class PermutationMatch:
    permutation: Tuple[int, ...]  # configuration i receives values[permutation[i]]
    thetas: ThetaVector
    probability: float
    residual: float
    evaluated: int


def match_theta_permutation(
    net: Network,
    query: str,
    state: Union[int, str],
    evidence: Optional[Evidence],
    values: Sequence[float],
    target: float,
) -> PermutationMatch:
    """Try every assignment of the given phases to configurations; keep the closest to target"""
    paths = _evidence_paths(net, query, evidence)
    s = resolve_state(paths, state)
    values = np.asarray(values, dtype=float)
    if values.size != paths.k:
        raise ThetaLengthError(f"{values.size} phases for {paths.k} paths")
    if paths.k > PERMUTATION_MAX_K:
        raise SearchError(f"permutation matching supports at most {PERMUTATION_MAX_K} paths")

    permutations = np.array(list(itertools.permutations(range(paths.k))), dtype=int)
    best_index, best_residual = 0, np.inf
    for first in range(0, len(permutations), _CHUNK):
        block = permutations[first:first + _CHUNK]
        residuals = np.abs(paths.evaluate(values[block])[:, s] - target)
        residuals = np.where(np.isnan(residuals), np.inf, residuals)
        local = int(np.argmin(residuals))
        if residuals[local] < best_residual:
            best_index, best_residual = first + local, float(residuals[local])
    if math.isinf(best_residual):
        raise ZeroEvidenceError(f"every assignment of the phases cancels the mass of {query}")

    permutation = tuple(int(x) for x in permutations[best_index])
    thetas = ThetaVector(tuple(values[list(permutation)]))
    probability = float(paths.evaluate(thetas.as_array())[0, s])
    return PermutationMatch(permutation, thetas, probability, abs(probability - target), len(permutations))

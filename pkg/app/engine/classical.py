"""
Exact classical inference
-------------------------
Full-joint enumeration over the canonical configuration order, followed by
marginalisation and normalisation. The joint is built as one numpy array so
that every other module (including the quantum engine) indexes the same
numbers in the same order.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd

from app.config import get_settings
from app.exceptions import ConfigurationCapError, EvidenceError, ZeroEvidenceError
from app.network.models import Assignment, Evidence, Network

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Distribution:
    variable: str
    states: Tuple[str, ...]
    probabilities: Tuple[float, ...]

    def __getitem__(self, label: str) -> float:
        return self.probabilities[self.states.index(label)]

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(self.states, self.probabilities))


def joint_probability(net: Network, a: Assignment) -> float:
    """Product of one CPT entry per variable"""
    net.check_assignment(a, total=True)
    probability = 1.0
    for name in net.order:
        key = tuple(a[p] for p in net.parents(name)) + (a[name],)
        probability *= float(net.cpt_array(name)[key])
    return probability


def product_array(
    net: Network,
    factor: Callable[[np.ndarray], np.ndarray] = np.asarray,
    max_configurations: Optional[int] = None,
) -> np.ndarray:
    """Product over variables of factor(CPT entry), one axis per variable"""
    cap = get_settings().max_configurations if max_configurations is None else max_configurations
    count = net.configuration_count
    if count > cap:
        raise ConfigurationCapError(
            f"network '{net.name}' has {count} configurations; the enumeration cap is {cap}"
        )
    logger.debug("Enumerating %d configurations of '%s'", count, net.name)

    grid = np.indices(net.shape, sparse=True)
    product = np.ones(net.shape, dtype=float)
    for name in net.order:
        index = tuple(grid[net.axis[p]] for p in net.parents(name)) + (grid[net.axis[name]],)
        product = product * factor(net.cpt_array(name))[index]
    return product


def joint_array(net: Network, max_configurations: Optional[int] = None) -> np.ndarray:
    """The full joint with one axis per variable, in canonical order"""
    return product_array(net, max_configurations=max_configurations)


def joint_table(net: Network, max_configurations: Optional[int] = None) -> List[Tuple[Assignment, float]]:
    """One (assignment, probability) entry per configuration, canonical index order"""
    values = joint_array(net, max_configurations).ravel()
    return [(net.assignment_at(i), float(p)) for i, p in enumerate(values)]


def joint_frame(net: Network, max_configurations: Optional[int] = None) -> pd.DataFrame:
    """Joint table with state labels, one column per variable plus 'probability'"""
    values = joint_array(net, max_configurations).ravel()
    index = pd.MultiIndex.from_product(
        [net.variable(n).states for n in net.order], names=list(net.order)
    )
    return pd.Series(values, index=index, name="probability").reset_index()


def check_query(net: Network, query: str, evidence: Mapping[str, int]) -> None:
    net.variable(query)
    net.check_assignment(evidence)
    if query in evidence:
        raise EvidenceError(f"query variable '{query}' is also observed")


def evidence_slice(net: Network, evidence: Mapping[str, int]) -> Tuple:
    return tuple(evidence.get(name, slice(None)) for name in net.order)


def infer_classical(net: Network, query: str, evidence: Optional[Evidence] = None) -> Distribution:
    """Exact Pr(query | evidence) by summing the joint over the unobserved variables"""
    evidence = dict(evidence or {})
    check_query(net, query, evidence)

    selected = joint_array(net)[evidence_slice(net, evidence)]
    remaining = [name for name in net.order if name not in evidence]
    axis = remaining.index(query)
    mass = np.moveaxis(selected, axis, 0).reshape(net.variable(query).cardinality, -1).sum(axis=1)

    total = float(mass.sum())
    if total <= 0.0:
        raise ZeroEvidenceError(f"evidence {evidence} has probability zero; alpha is undefined")
    alpha = 1.0 / total
    return Distribution(query, net.variable(query).states, tuple(float(m) * alpha for m in mass))

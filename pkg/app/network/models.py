"""
Network data model
------------------
Variables, conditional probability tables and the network DAG. Networks are
immutable once built; derived structures (graph, canonical order, dense CPT
arrays) are computed lazily and cached on the instance.
"""

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Iterator, List, Mapping, Tuple

import networkx as nx
import numpy as np

from app.exceptions import EvidenceError, NetworkValidationError

# variable name -> state index
Assignment = Dict[str, int]
Evidence = Dict[str, int]


@dataclass(frozen=True)
class Violation:
    """One broken invariant, with a machine-readable code and a key path"""
    code: str
    message: str
    path: str = ""

    def __str__(self) -> str:
        where = f" [{self.path}]" if self.path else ""
        return f"{self.code}{where}: {self.message}"


@dataclass(frozen=True)
class Variable:
    name: str
    states: Tuple[str, ...]

    @property
    def cardinality(self) -> int:
        return len(self.states)

    def index_of(self, label: str) -> int:
        """Resolve a state label to its index"""
        try:
            return self.states.index(label)
        except ValueError:
            raise EvidenceError(
                f"variable '{self.name}' has no state '{label}' (states: {', '.join(self.states)})"
            ) from None


@dataclass(frozen=True)
class Cpt:
    """Pr(owner | parents); rows keyed by parent state-index tuples, () for roots"""
    owner: str
    parents: Tuple[str, ...]
    rows: Mapping[Tuple[int, ...], Tuple[float, ...]]


@dataclass(frozen=True)
class Network:
    name: str
    variables: Tuple[Variable, ...]
    cpts: Mapping[str, Cpt]
    metadata: Mapping[str, Any] = field(default_factory=dict)

    # Lookup helpers
    @cached_property
    def _by_name(self) -> Dict[str, Variable]:
        lookup: Dict[str, Variable] = {}
        for variable in self.variables:
            lookup.setdefault(variable.name, variable)
        return lookup

    def variable(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise EvidenceError(f"network '{self.name}' has no variable '{name}'") from None

    def parents(self, name: str) -> Tuple[str, ...]:
        cpt = self.cpts.get(name)
        return cpt.parents if cpt else ()

    @cached_property
    def graph(self) -> nx.DiGraph:
        """Edges parent -> child for every known parent"""
        graph = nx.DiGraph()
        graph.add_nodes_from(v.name for v in self.variables)
        for owner, cpt in self.cpts.items():
            for parent in cpt.parents:
                if parent in self._by_name and owner in self._by_name:
                    graph.add_edge(parent, owner)
        return graph

    # Canonical configuration indexing
    @cached_property
    def order(self) -> Tuple[str, ...]:
        """Topological order, ties broken by declaration order"""
        declared = {v.name: i for i, v in enumerate(self.variables)}
        try:
            return tuple(nx.lexicographical_topological_sort(self.graph, key=declared.get))
        except nx.NetworkXUnfeasible:
            cycle = " -> ".join(u for u, _ in nx.find_cycle(self.graph))
            raise NetworkValidationError(
                [Violation("CycleDetected", f"cycle through {cycle}", "parents")]
            ) from None

    @cached_property
    def axis(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.order)}

    @property
    def ordered_variables(self) -> List[Variable]:
        return [self.variable(name) for name in self.order]

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(v.cardinality for v in self.ordered_variables)

    @property
    def configuration_count(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))

    def configuration_index(self, assignment: Assignment) -> int:
        """Mixed-radix index: sum of s_i times the product of later cardinalities"""
        self.check_assignment(assignment, total=True)
        return int(np.ravel_multi_index(tuple(assignment[n] for n in self.order), self.shape))

    def assignment_at(self, index: int) -> Assignment:
        states = np.unravel_index(index, self.shape)
        return {name: int(s) for name, s in zip(self.order, states)}

    def iter_assignments(self) -> Iterator[Assignment]:
        """All total assignments in canonical index order"""
        ranges = [range(c) for c in self.shape]
        for states in itertools.product(*ranges):
            yield dict(zip(self.order, states))

    def check_assignment(self, assignment: Mapping[str, int], total: bool = False) -> None:
        for name, index in assignment.items():
            variable = self.variable(name)
            if not 0 <= index < variable.cardinality:
                raise EvidenceError(
                    f"state index {index} out of range for '{name}' ({variable.cardinality} states)"
                )
        if total:
            missing = [n for n in self.order if n not in assignment]
            if missing:
                raise EvidenceError(f"assignment is partial; missing {', '.join(missing)}")

    def resolve_labels(self, labels: Mapping[str, str]) -> Evidence:
        """Turn {'U': 'Play'} into {'U': 0}"""
        return {name: self.variable(name).index_of(label) for name, label in labels.items()}

    # Dense CPT arrays, axes (parents..., owner)
    def cpt_array(self, name: str) -> np.ndarray:
        return self._cpt_arrays[name]

    @cached_property
    def _cpt_arrays(self) -> Dict[str, np.ndarray]:
        arrays = {}
        for owner, cpt in self.cpts.items():
            shape = tuple(self.variable(p).cardinality for p in cpt.parents)
            shape += (self.variable(owner).cardinality,)
            table = np.zeros(shape, dtype=float)
            for key, row in cpt.rows.items():
                fits = len(key) == len(shape) - 1 and len(row) == shape[-1]
                if fits and all(0 <= k < n for k, n in zip(key, shape[:-1])):
                    table[key] = row
            arrays[owner] = table
        return arrays

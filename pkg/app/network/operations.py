"""
Network operations
------------------
Parsing, serialisation and validation of network documents, plus loading
networks by builtin name or file path.
"""

import hashlib
import itertools
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import networkx as nx
from pydantic import ValidationError

from app.config import get_settings
from app.exceptions import NetworkFormatError, NetworkValidationError
from app.network.models import Cpt, Network, Variable, Violation
from app.network.schemas import ROW_KEY_SEPARATOR, NetworkDocument

logger = logging.getLogger(__name__)


# Parsing
def parse_network(text: Union[str, bytes]) -> Network:
    """Parse and validate a JSON network document"""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise NetworkFormatError(f"document is not UTF-8: {e}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise NetworkFormatError(f"syntax error at line {e.lineno} column {e.colno}: {e.msg}") from None
    return network_from_document(raw)


def network_from_document(raw: Any) -> Network:
    """Build a validated Network from an already-decoded document"""
    try:
        document = NetworkDocument.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        path = ".".join(str(part) for part in first["loc"])
        raise NetworkFormatError(first["msg"], path) from None

    network, violations = _build(document)
    violations += validate(network)
    if violations:
        logger.info("Network '%s' rejected with %d violation(s)", document.name, len(violations))
        raise NetworkValidationError(violations)
    # canonical order is computed once here and cached on the instance
    logger.debug("Parsed network '%s' with order %s", network.name, network.order)
    return network


def _build(document: NetworkDocument) -> Tuple[Network, List[Violation]]:
    """Resolve names and labels into indices, collecting what cannot be resolved"""
    violations: List[Violation] = []
    variables = tuple(Variable(spec.name, tuple(spec.states)) for spec in document.variables)
    by_name: Dict[str, Variable] = {}
    for variable in variables:
        by_name.setdefault(variable.name, variable)

    for name in document.parents:
        if name not in by_name:
            violations.append(Violation("UnknownVariable", f"parents given for unknown variable '{name}'",
                                        f"parents.{name}"))
    for name in document.cpt:
        if name not in by_name:
            violations.append(Violation("UnknownVariable", f"CPT given for unknown variable '{name}'",
                                        f"cpt.{name}"))

    cpts: Dict[str, Cpt] = {}
    for name, variable in by_name.items():
        parents = tuple(document.parents.get(name, []))
        unknown = [p for p in parents if p not in by_name]
        for parent in unknown:
            violations.append(Violation("UnknownVariable", f"unknown parent '{parent}'",
                                        f"parents.{name}"))
        if name not in document.cpt:
            continue
        if unknown:
            cpts[name] = Cpt(name, parents, {})
            continue

        rows: Dict[Tuple[int, ...], Tuple[float, ...]] = {}
        for key, row in document.cpt[name].items():
            labels = key.split(ROW_KEY_SEPARATOR) if parents else ([] if key == "" else [key])
            if len(labels) != len(parents):
                violations.append(Violation(
                    "UnexpectedRow",
                    f"row key has {len(labels)} label(s) but '{name}' has {len(parents)} parent(s)",
                    f"cpt.{name}.{key}"))
                continue
            index = []
            for parent, label in zip(parents, labels):
                if label not in by_name[parent].states:
                    violations.append(Violation("UnknownState", f"'{parent}' has no state '{label}'",
                                                f"cpt.{name}.{key}"))
                    break
                index.append(by_name[parent].states.index(label))
            else:
                rows[tuple(index)] = tuple(float(p) for p in row)
        cpts[name] = Cpt(name, parents, rows)

    network = Network(document.name, variables, cpts, dict(document.metadata))
    return network, violations


# Serialisation
def network_to_document(net: Network) -> Dict[str, Any]:
    """Plain-dict form of the network, in declaration order"""
    document: Dict[str, Any] = {
        "name": net.name,
        "variables": [{"name": v.name, "states": list(v.states)} for v in net.variables],
        "parents": {v.name: list(net.parents(v.name)) for v in net.variables},
        "cpt": {},
    }
    for variable in net.variables:
        cpt = net.cpts.get(variable.name)
        if cpt is None:
            continue
        rows = {}
        for key in sorted(cpt.rows):
            labels = [net.variable(p).states[i] for p, i in zip(cpt.parents, key)]
            rows[ROW_KEY_SEPARATOR.join(labels)] = list(cpt.rows[key])
        document["cpt"][variable.name] = rows
    if net.metadata:
        document["metadata"] = dict(net.metadata)
    return document


def serialize_network(net: Network) -> str:
    return json.dumps(network_to_document(net), indent=2, ensure_ascii=False) + "\n"


def network_digest(net: Network) -> str:
    """SHA-256 of the serialised document"""
    return hashlib.sha256(serialize_network(net).encode("utf-8")).hexdigest()


# Validation
def validate(net: Network, tolerance: Optional[float] = None) -> List[Violation]:
    """Return every invariant violation; an empty list means the network is valid"""
    tolerance = get_settings().row_tolerance if tolerance is None else tolerance
    violations: List[Violation] = []

    seen = set()
    for variable in net.variables:
        if variable.name in seen:
            violations.append(Violation("DuplicateVariable", f"variable '{variable.name}' declared twice",
                                        f"variables.{variable.name}"))
        seen.add(variable.name)
        if not variable.states:
            violations.append(Violation("EmptyStates", f"'{variable.name}' has no states",
                                        f"variables.{variable.name}.states"))
        if len(set(variable.states)) != len(variable.states):
            violations.append(Violation("DuplicateState", f"'{variable.name}' repeats a state label",
                                        f"variables.{variable.name}.states"))

    for variable in net.variables:
        cpt = net.cpts.get(variable.name)
        if cpt is None:
            violations.append(Violation("MissingCpt", f"no CPT for '{variable.name}'",
                                        f"cpt.{variable.name}"))
            continue
        if any(p not in seen for p in cpt.parents):
            continue  # reported while resolving the document
        violations += _validate_rows(net, variable, cpt, tolerance)

    if not nx.is_directed_acyclic_graph(net.graph):
        cycle = " -> ".join(u for u, _ in nx.find_cycle(net.graph))
        violations.append(Violation("CycleDetected", f"cycle through {cycle}", "parents"))
    return violations


def _validate_rows(net: Network, variable: Variable, cpt: Cpt, tolerance: float) -> List[Violation]:
    violations = []
    parent_vars = [net.variable(p) for p in cpt.parents]

    def row_path(key):
        labels = [v.states[i] if 0 <= i < v.cardinality else str(i) for v, i in zip(parent_vars, key)]
        return f"cpt.{variable.name}.{ROW_KEY_SEPARATOR.join(labels)}"

    expected = set(itertools.product(*(range(v.cardinality) for v in parent_vars)))
    for key in sorted(expected - set(cpt.rows)):
        violations.append(Violation("MissingRow", "no row for this parent configuration", row_path(key)))
    for key in sorted(set(cpt.rows) - expected):
        violations.append(Violation("UnexpectedRow", "row key outside the parent states", row_path(key)))

    for key in sorted(set(cpt.rows) & expected):
        row = cpt.rows[key]
        if len(row) != variable.cardinality:
            violations.append(Violation(
                "RowLength", f"{len(row)} entries for {variable.cardinality} states", row_path(key)))
            continue
        if any(not 0.0 <= p <= 1.0 for p in row):
            violations.append(Violation("ProbabilityOutOfRange", f"entries {list(row)} not in [0, 1]",
                                        row_path(key)))
            continue
        total = sum(row)
        if abs(total - 1.0) > tolerance:
            violations.append(Violation("RowNotNormalized", f"row sums to {total:.12g}", row_path(key)))
    return violations


# Loading
def load_network(path: Union[str, Path]) -> Network:
    """Read a network file; OSError propagates to the caller"""
    return parse_network(Path(path).read_bytes())


def resolve_network(spec: Union[str, Path]) -> Network:
    """A builtin name, or otherwise a path to a network document"""
    from app.network.builtin import BUILTIN_NETWORKS, builtin

    if str(spec) in BUILTIN_NETWORKS:
        return builtin(str(spec))
    return load_network(spec)

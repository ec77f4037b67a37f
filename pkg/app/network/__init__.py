from app.network.builtin import BUILTIN_NETWORKS, builtin
from app.network.models import Assignment, Cpt, Evidence, Network, Variable, Violation
from app.network.operations import (
    load_network,
    network_digest,
    parse_network,
    resolve_network,
    serialize_network,
    validate,
)

__all__ = [
    "Assignment", "BUILTIN_NETWORKS", "Cpt", "Evidence", "Network", "Variable", "Violation",
    "builtin", "load_network", "network_digest", "parse_network", "resolve_network",
    "serialize_network", "validate",
]

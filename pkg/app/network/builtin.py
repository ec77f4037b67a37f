"""
Builtin networks
----------------
The two-stage gamble, the four-node Burglar/Alarm network and the structure
of the Lung-Cancer network. Each is defined as a network document and goes
through the same parser as files under networks/.
"""

from typing import Any, Callable, Dict

import pandas as pd

from app.exceptions import UnknownNetworkError
from app.network.models import Network
from app.network.operations import network_from_document

# Play-again rates (%) reported for the two-stage gambling game
GAMBLE_OBSERVATIONS = pd.DataFrame(
    [
        {"study": "Tversky & Shafir (1992)", "won": 69, "lost": 58, "unknown": 37},
        {"study": "Kuhberger et al. (2001)", "won": 72, "lost": 47, "unknown": 48},
        {"study": "Lambdin & Burdsal (2007)", "won": 63, "lost": 45, "unknown": 41},
    ]
).set_index("study")


def observed_averages() -> Dict[str, float]:
    """Average play-again probability per first-gamble condition"""
    return {column: round(value / 100, 4) for column, value in GAMBLE_OBSERVATIONS.mean().items()}


def _complement(p: float) -> float:
    return round(1.0 - p, 10)


def gamble_document(won: float, lost: float) -> Dict[str, Any]:
    """U -> G1 -> G2 with Pr(G2=Play | G1) taken from the observed rates"""
    return {
        "name": "gamble",
        "variables": [
            {"name": "U", "states": ["Play", "Not_Play"]},
            {"name": "G1", "states": ["Win", "Lose"]},
            {"name": "G2", "states": ["Play", "Not_Play"]},
        ],
        "parents": {"U": [], "G1": ["U"], "G2": ["G1"]},
        "cpt": {
            "U": {"": [0.5, 0.5]},
            "G1": {"Play": [0.5, 0.5], "Not_Play": [0.5, 0.5]},
            "G2": {"Win": [won, _complement(won)], "Lose": [lost, _complement(lost)]},
        },
    }


def gamble() -> Network:
    averages = observed_averages()
    return network_from_document(gamble_document(averages["won"], averages["lost"]))


def burglar() -> Network:
    # CPTs reconstructed from the classical query table (see reproduce.reconstruct_burglar_cpts)
    return network_from_document({
        "name": "burglar",
        "variables": [
            {"name": "Burglar", "states": ["t", "f"]},
            {"name": "Alarm", "states": ["t", "f"]},
            {"name": "JohnCalls", "states": ["t", "f"]},
            {"name": "MaryCalls", "states": ["t", "f"]},
        ],
        "parents": {"Burglar": [], "Alarm": ["Burglar"], "JohnCalls": ["Alarm"], "MaryCalls": ["Alarm"]},
        "cpt": {
            "Burglar": {"": [0.02, 0.98]},
            "Alarm": {"t": [0.95, 0.05], "f": [0.016, 0.984]},
            "JohnCalls": {"t": [0.9, 0.1], "f": [0.05, 0.95]},
            "MaryCalls": {"t": [0.7, 0.3], "f": [0.01, 0.99]},
        },
    })


def lung_cancer() -> Network:
    """Structure only: the CPT values are placeholders"""
    return network_from_document({
        "name": "lung_cancer",
        "variables": [
            {"name": "Smoke", "states": ["true", "false"]},
            {"name": "Lung_Cancer", "states": ["positive", "negative"]},
            {"name": "Cough", "states": ["high", "low"]},
            {"name": "Dyspnea", "states": ["true", "false"]},
        ],
        "parents": {"Smoke": [], "Lung_Cancer": ["Smoke"], "Cough": ["Lung_Cancer"],
                    "Dyspnea": ["Lung_Cancer"]},
        "cpt": {
            "Smoke": {"": [0.5, 0.5]},
            "Lung_Cancer": {"true": [0.6, 0.4], "false": [0.4, 0.6]},
            "Cough": {"positive": [0.6, 0.4], "negative": [0.4, 0.6]},
            "Dyspnea": {"positive": [0.6, 0.4], "negative": [0.4, 0.6]},
        },
        "metadata": {
            "unverified": True,
            "note": "placeholder CPTs; usable for structure and search demos only",
        },
    })


BUILTIN_NETWORKS: Dict[str, Callable[[], Network]] = {
    "gamble": gamble,
    "burglar": burglar,
    "lung_cancer": lung_cancer,
}


def builtin(name: str) -> Network:
    try:
        factory = BUILTIN_NETWORKS[name]
    except KeyError:
        raise UnknownNetworkError(
            f"unknown builtin network '{name}' (available: {', '.join(BUILTIN_NETWORKS)})"
        ) from None
    return factory()

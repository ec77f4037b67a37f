import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

# Add the project root to the path so 'app' imports without installation
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from app.network.builtin import burglar, gamble, lung_cancer  # noqa: E402
from app.network.operations import network_from_document  # noqa: E402

settings.register_profile(
    "qbn",
    max_examples=1000,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("quick", max_examples=50, deadline=None, derandomize=True)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "qbn"))

NAMES = ("A", "B", "C", "D")
# Three-decimal CPT entries keep exact zeros and ones in play without subnormal products
probabilities = st.integers(min_value=0, max_value=1000).map(lambda k: k / 1000)


@st.composite
def network_documents(draw, max_variables=4):
    """Up to four binary variables; edges only go forward in a random topological order"""
    n = draw(st.integers(min_value=1, max_value=max_variables))
    names = list(NAMES[:n])
    ranking = draw(st.permutations(names))
    parents = {name: [] for name in names}
    for later in range(n):
        for earlier in range(later):
            if draw(st.booleans()):
                parents[ranking[later]].append(ranking[earlier])

    cpt = {}
    for name in names:
        rows = {}
        for index in range(2 ** len(parents[name])):
            labels = [("s0", "s1")[(index >> bit) & 1] for bit in range(len(parents[name]))]
            p = draw(probabilities)
            rows["|".join(labels)] = [p, 1.0 - p]
        cpt[name] = rows
    return {
        "name": "random",
        "variables": [{"name": name, "states": ["s0", "s1"]} for name in names],
        "parents": parents,
        "cpt": cpt,
    }


@st.composite
def networks(draw, max_variables=4):
    return network_from_document(draw(network_documents(max_variables)))


@st.composite
def queries(draw, max_variables=4):
    """(network, query, evidence) with the query left unobserved"""
    net = draw(networks(max_variables))
    query = draw(st.sampled_from(net.order))
    evidence = {}
    for name in net.order:
        if name != query and draw(st.booleans()):
            evidence[name] = draw(st.integers(min_value=0, max_value=1))
    return net, query, evidence


@pytest.fixture
def gamble_net():
    return gamble()


@pytest.fixture
def burglar_net():
    return burglar()


@pytest.fixture
def lung_net():
    return lung_cancer()

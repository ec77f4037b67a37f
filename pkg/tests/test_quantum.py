import math

import numpy as np
import pytest

from app.engine.classical import infer_classical, joint_array
from app.engine.quantum import (
    TWO_PI,
    PathAmplitude,
    ThetaVector,
    amplitude_from_probability,
    density_diagonal,
    enumerate_paths,
    infer_quantum,
    interference_term,
    marginal_partial_trace,
    modulus_form,
    multipath_probability_observed,
    path_count,
    path_probability_single,
    path_set,
)
from app.exceptions import EvidenceError, QBNError, ThetaLengthError, ZeroEvidenceError
from app.network.operations import network_from_document

PUBLISHED_COS = -0.998853


def gamble_thetas(delta):
    return ThetaVector((0.0, delta))


class TestPathRules:
    def test_born_rule(self):
        assert amplitude_from_probability(0.25) == 0.5
        assert amplitude_from_probability(0.0) == 0.0
        with pytest.raises(QBNError):
            amplitude_from_probability(1.2)

    def test_single_path_is_a_product(self):
        assert path_probability_single([0.5, 0.5, 0.68]) == pytest.approx(0.17, abs=1e-12)

    def test_observed_paths_add(self):
        paths = [PathAmplitude({"G1": 0}, 0.17), PathAmplitude({"G1": 1}, 0.125)]
        assert multipath_probability_observed(paths) == pytest.approx(0.295, abs=1e-12)

    def test_magnitude_is_square_root(self):
        assert PathAmplitude({}, 0.09).magnitude == pytest.approx(0.3)

    def test_interference_of_two_paths(self):
        paths = [PathAmplitude({"G1": 0}, 0.17), PathAmplitude({"G1": 1}, 0.125)]
        assert interference_term(paths, ThetaVector((0.0, 0.0))) == pytest.approx(2 * math.sqrt(0.17 * 0.125))
        assert interference_term(paths, ThetaVector((0.0, math.pi / 2))) == pytest.approx(0.0, abs=1e-15)
        assert interference_term(paths, ThetaVector((0.0, math.pi))) == pytest.approx(-2 * math.sqrt(0.17 * 0.125))

    def test_single_path_has_no_interference(self):
        assert interference_term([PathAmplitude({}, 0.4)], ThetaVector((1.0,))) == 0.0

    def test_modulus_form_matches(self):
        paths = [PathAmplitude({}, p) for p in (0.1, 0.2, 0.3)]
        thetas = ThetaVector((0.0, 1.0, 2.5))
        expected = sum(p.probability for p in paths) + interference_term(paths, thetas)
        assert modulus_form(paths, thetas) == pytest.approx(expected, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ThetaLengthError):
            interference_term([PathAmplitude({}, 0.5)], ThetaVector((0.0, 1.0)))


class TestThetaVector:
    def test_wraps_into_one_turn(self):
        assert ThetaVector((TWO_PI + 1.0,)).phases[0] == pytest.approx(1.0)
        assert ThetaVector((-1.0,)).phases[0] == pytest.approx(TWO_PI - 1.0)
        assert ThetaVector((TWO_PI,)).phases == (0.0,)

    @pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
    def test_rejects_non_finite_phases(self, bad):
        with pytest.raises(QBNError, match="finite"):
            ThetaVector((0.0, bad))

    def test_batch_rejects_non_finite_phases(self, gamble_net):
        with pytest.raises(QBNError, match="finite"):
            path_set(gamble_net, "G2", {"U": 0}).evaluate(np.array([[0.0, np.nan]]))

    def test_shift_and_zeros(self):
        assert ThetaVector.zeros(3).phases == (0.0, 0.0, 0.0)
        assert ThetaVector((0.0, 1.0)).shifted(0.5).phases == pytest.approx((0.5, 1.5))
        assert len(ThetaVector.zeros(8)) == 8


class TestPaths:
    def test_gamble_paths(self, gamble_net):
        paths = enumerate_paths(gamble_net, "G2", 0, {"U": 0})
        assert [p.config for p in paths] == [{"G1": 0}, {"G1": 1}]
        assert [p.probability for p in paths] == pytest.approx([0.17, 0.125], abs=1e-12)

    def test_path_counts(self, burglar_net, lung_net):
        assert path_count(burglar_net, "Burglar") == 8
        assert path_count(burglar_net, "Burglar", {"Alarm": 0}) == 4
        assert path_count(burglar_net, "Burglar", {"Alarm": 0, "JohnCalls": 0, "MaryCalls": 0}) == 1
        assert path_count(lung_net, "Lung_Cancer") == 8

    def test_path_set_rows_follow_canonical_order(self, burglar_net):
        paths = path_set(burglar_net, "JohnCalls")
        assert paths.unobserved == ("Burglar", "Alarm", "MaryCalls")
        joint = joint_array(burglar_net)
        expected = np.moveaxis(joint, 2, 0).reshape(2, -1)
        np.testing.assert_array_equal(paths.probabilities, expected)

    def test_query_state_out_of_range(self, gamble_net):
        with pytest.raises(QBNError):
            enumerate_paths(gamble_net, "G2", 2, {"U": 0})


class TestInferQuantum:
    def test_published_cosine_gives_observed_rate(self, gamble_net):
        result = infer_quantum(gamble_net, "G2", {"U": 0}, gamble_thetas(math.acos(PUBLISHED_COS)))
        assert result["Play"] == pytest.approx(0.42, abs=5e-3)
        assert result["Not_Play"] == pytest.approx(0.58, abs=5e-3)

    def test_quarter_turn_is_classical(self, gamble_net):
        result = infer_quantum(gamble_net, "G2", {"U": 0}, gamble_thetas(math.pi / 2))
        assert result.distribution == pytest.approx((0.59, 0.41), abs=1e-12)

    def test_terms_and_alpha(self, gamble_net):
        result = infer_quantum(gamble_net, "G2", {"U": 0}, gamble_thetas(0.0))
        assert result.classical_mass == pytest.approx((0.295, 0.205), abs=1e-12)
        s_win, s_lose = math.sqrt(0.17 * 0.125), math.sqrt(0.08 * 0.125)
        assert result.interference == pytest.approx((2 * s_win, 2 * s_lose), abs=1e-12)
        assert result.alpha == pytest.approx(1 / (0.5 + 2 * s_win + 2 * s_lose), abs=1e-12)
        assert result["Play"] == pytest.approx(0.5915, abs=5e-4)
        assert sum(result.distribution) == pytest.approx(1.0, abs=1e-12)

    def test_as_distribution(self, gamble_net):
        result = infer_quantum(gamble_net, "G2", {"U": 0}, gamble_thetas(1.0))
        assert result.as_distribution().as_dict() == dict(zip(result.states, result.distribution))

    def test_single_path_collapses(self, burglar_net):
        evidence = {"Alarm": 0, "JohnCalls": 0, "MaryCalls": 1}
        result = infer_quantum(burglar_net, "Burglar", evidence, ThetaVector((0.0,)))
        classical = infer_classical(burglar_net, "Burglar", evidence)
        assert result.distribution == pytest.approx(classical.probabilities, abs=1e-12)

    @pytest.mark.parametrize("query", ["Burglar", "JohnCalls", "MaryCalls"])
    def test_observed_alarm_collapses(self, burglar_net, query):
        rng = np.random.default_rng(7)
        k = path_count(burglar_net, query, {"Alarm": 0})
        classical = infer_classical(burglar_net, query, {"Alarm": 0})
        for _ in range(5):
            thetas = ThetaVector(tuple(rng.uniform(0, TWO_PI, k)))
            result = infer_quantum(burglar_net, query, {"Alarm": 0}, thetas)
            assert result.distribution == pytest.approx(classical.probabilities, abs=1e-9)

    def test_wrong_theta_length(self, gamble_net):
        with pytest.raises(ThetaLengthError, match="2 unobserved configuration"):
            infer_quantum(gamble_net, "G2", {"U": 0}, ThetaVector((0.0, 1.0, 2.0)))

    def test_query_observed(self, gamble_net):
        with pytest.raises(EvidenceError):
            infer_quantum(gamble_net, "G2", {"G2": 0}, ThetaVector((0.0,)))

    def test_total_cancellation(self):
        net = network_from_document({
            "name": "flat",
            "variables": [{"name": "A", "states": ["a0", "a1"]}, {"name": "B", "states": ["b0", "b1"]}],
            "cpt": {"A": {"": [0.5, 0.5]}, "B": {"": [0.5, 0.5]}},
        })
        # opposite phases on equal paths cancel both query states
        with pytest.raises(ZeroEvidenceError):
            infer_quantum(net, "B", {}, ThetaVector((0.0, np.pi)))

    def test_batch_agrees_with_single(self, burglar_net):
        rng = np.random.default_rng(3)
        batch = rng.uniform(0, TWO_PI, (16, 8))
        paths = path_set(burglar_net, "Alarm")
        evaluated = paths.evaluate(batch)
        for row, thetas in zip(evaluated, batch):
            single = infer_quantum(burglar_net, "Alarm", {}, ThetaVector(tuple(thetas)))
            assert single.distribution == pytest.approx(tuple(row), abs=1e-12)


class TestDensityDiagonal:
    def test_diagonal_is_the_joint(self, burglar_net):
        np.testing.assert_allclose(density_diagonal(burglar_net), joint_array(burglar_net).ravel(), atol=1e-15)

    def test_partial_trace_matches_classical(self, burglar_net):
        traced = marginal_partial_trace(burglar_net, "Burglar", {"JohnCalls": 0})
        classical = infer_classical(burglar_net, "Burglar", {"JohnCalls": 0})
        assert traced.probabilities == pytest.approx(classical.probabilities, abs=1e-12)

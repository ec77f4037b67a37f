import json

import pandas as pd
import pytest

from app.engine.classical import infer_classical
from app.engine.phase_search import sweep_shared_phase
from app.network.builtin import burglar
from app.network.operations import network_from_document
from app.reports.generator import (
    CheckResult,
    RunReport,
    checks_frame,
    distribution_frame,
    network_ref,
    render_csv,
    render_table,
    summarize_checks,
    sweep_csv,
)
from app.reports.reproduce import (
    BURGLAR_QUERIES,
    CLASSICAL_TABLE,
    EVIDENCE_ROWS,
    TRANSPOSED_CELLS,
    average_uplift,
    query_cell,
    reconstruct_burglar_cpts,
    run_suites,
    table1,
    table2,
    table3,
    table4_collapse,
    table4_search,
    table5_permute,
    uplift,
)


def all_pass(checks):
    failures = [c for c in checks if not c.passed]
    assert not failures, failures


class TestRendering:
    def test_table_uses_precision(self, gamble_net):
        text = render_table(distribution_frame(infer_classical(gamble_net, "G2", {"U": 0})), precision=2)
        assert "0.59" in text and "0.41" in text

    def test_csv_is_plain(self, gamble_net):
        text = render_csv(pd.DataFrame({"state": ["Play"], "probability": [0.5915123]}), precision=4)
        assert text == "state,probability\nPlay,0.5915\n"

    def test_sweep_csv(self, gamble_net):
        trace = sweep_shared_phase(gamble_net, "G2", {"U": 0}, step=1.0)
        lines = sweep_csv(trace).splitlines()
        assert lines[0] == "theta_1,theta_2,p_Play,p_Not_Play"
        assert len(lines) == 1 + len(trace.thetas)
        assert "\r" not in sweep_csv(trace)

    def test_run_report_keys(self, gamble_net):
        report = RunReport(command="infer", network=network_ref(gamble_net, "gamble"),
                           parameters={"query": "G2"}, results={"distribution": {"Play": 0.59}}, wall_ms=1.5)
        payload = json.loads(report.to_json())
        assert list(payload) == ["command", "network", "parameters", "results", "seed", "wall_ms"]
        assert payload["network"]["source"] == "gamble"
        assert len(payload["network"]["sha256"]) == 64

    def test_checks_frame_and_summary(self):
        checks = [
            CheckResult(suite="s", cell="a", expected=1.0, got=1.0, tolerance=0.0, passed=True),
            CheckResult(suite="s", cell="b", expected=1.0, got=2.0, tolerance=0.5, passed=False, note="off"),
        ]
        frame = checks_frame(checks)
        assert frame["status"].tolist() == ["PASS", "FAIL"]
        assert summarize_checks(checks) == "1/2 PASS"


class TestBurglarReconstruction:
    def test_reconstructed_cpts_match_builtin(self, burglar_net):
        for name, rows in reconstruct_burglar_cpts().items():
            owner = burglar_net.variable(name)
            for key, row in rows.items():
                parents = burglar_net.parents(name)
                labels = [key] if key else []
                index = tuple(burglar_net.variable(p).index_of(label) for p, label in zip(parents, labels))
                assert list(burglar_net.cpt_array(name)[index]) == pytest.approx(row, abs=1e-3), (name, key)
                assert len(row) == owner.cardinality

    def test_reconstruction_builds_a_valid_network(self, burglar_net):
        from app.network.operations import network_to_document

        document = network_to_document(burglar_net)
        document["cpt"] = reconstruct_burglar_cpts()
        rebuilt = network_from_document(document)
        assert infer_classical(rebuilt, "Alarm")["t"] == pytest.approx(0.0347, abs=5e-4)

    def test_observed_query_is_indicator(self, burglar_net):
        assert query_cell(burglar_net, "Alarm", ("Alarm", "JohnCalls")) == 1.0

    def test_transposed_cells_are_the_john_mary_pairs(self):
        assert {cell[1] for cell in TRANSPOSED_CELLS} == {"JohnCalls", "MaryCalls"}
        assert {cell[0] for cell in TRANSPOSED_CELLS} == {("Burglar",), ("Alarm", "Burglar")}
        assert CLASSICAL_TABLE.shape == (len(EVIDENCE_ROWS), 4)


class TestSuites:
    def test_table1(self):
        all_pass(table1())

    def test_table2(self):
        checks = table2()
        assert len(checks) == 8
        all_pass(checks)

    def test_table3(self):
        checks = table3()
        assert len(checks) == 44
        assert sum(1 for c in checks if c.note) == 4
        all_pass(checks)

    def test_table4_collapse(self):
        checks = table4_collapse()
        assert checks
        all_pass(checks)

    def test_gamble(self):
        all_pass(run_suites("gamble"))

    def test_uplift(self):
        assert average_uplift(()) == pytest.approx(277.0, abs=0.5)
        assert average_uplift(("Burglar",)) == pytest.approx(22.87, abs=0.05)
        all_pass(uplift())

    def test_table5_reports_a_permutation_per_variable(self):
        checks = table5_permute()
        assert [c.cell for c in checks] == [f"no evidence | {q}" for q in BURGLAR_QUERIES]
        assert all("of 40320" in c.note for c in checks)
        assert all(c.passed == (abs(c.got - c.expected) <= 0.02) for c in checks)

    def test_table4_search_is_one_sided(self):
        checks = table4_search(restarts=2, seed=1)
        assert len(checks) == 4
        assert all(c.passed == (c.got >= c.expected - 0.01) for c in checks)

    def test_run_all_names_every_suite(self, monkeypatch):
        import app.reports.reproduce as reproduce

        called = []
        fake = {name: (lambda name=name: called.append(name) or []) for name in reproduce.SUITES}
        monkeypatch.setattr(reproduce, "SUITES", fake)
        assert reproduce.run_suites("all") == []
        assert called == list(fake)

    def test_builtin_unchanged_by_suites(self, burglar_net):
        table3()
        assert burglar() == burglar_net

# Report rendering: human tables, CSV and JSON run reports
import time
from typing import Any, Dict, Iterable, List, Optional

import pandas as pd
from pydantic import BaseModel, Field

from app.config import get_settings
from app.engine.classical import Distribution
from app.engine.phase_search import SearchResult, SweepTrace
from app.engine.quantum import QuantumInferenceResult
from app.network.models import Network
from app.network.operations import network_digest


# Report models
class NetworkRef(BaseModel):
    name: str
    source: str  # builtin name or file path as given
    sha256: str


class RunReport(BaseModel):
    command: str
    network: Optional[NetworkRef] = None
    parameters: Dict[str, Any] = Field(default_factory=dict)
    results: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    wall_ms: float = 0.0

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + "\n"


class CheckResult(BaseModel):
    suite: str
    cell: str
    expected: float
    got: float
    tolerance: float
    passed: bool
    note: Optional[str] = None


def network_ref(net: Network, source: str) -> NetworkRef:
    return NetworkRef(name=net.name, source=source, sha256=network_digest(net))


class Stopwatch:
    """Wall time in milliseconds since construction"""

    def __init__(self):
        self.started = time.perf_counter()

    @property
    def elapsed_ms(self) -> float:
        return round((time.perf_counter() - self.started) * 1000.0, 3)


# Frames
def distribution_frame(distribution: Distribution) -> pd.DataFrame:
    return pd.DataFrame({"state": distribution.states, "probability": distribution.probabilities})


def quantum_frame(result: QuantumInferenceResult) -> pd.DataFrame:
    return pd.DataFrame({
        "state": result.states,
        "classical_mass": result.classical_mass,
        "interference": result.interference,
        "unnormalized": result.unnormalized,
        "probability": result.distribution,
    })


def search_frame(result: SearchResult) -> pd.DataFrame:
    rows = [
        ("query", f"{result.query}={result.state}"),
        ("sense", result.sense),
        ("best_probability", result.best_probability),
        ("thetas", ", ".join(f"{x:g}" for x in result.best_thetas.phases)),
        ("evaluations", result.evaluations),
        ("strategy", result.strategy),
        ("step", result.step),
        ("restarts", result.restarts),
        ("seed", result.seed),
    ]
    return pd.DataFrame(rows, columns=["field", "value"])


def checks_frame(checks: Iterable[CheckResult]) -> pd.DataFrame:
    frame = pd.DataFrame([c.model_dump() for c in checks])
    if frame.empty:
        return frame
    frame["status"] = frame["passed"].map({True: "PASS", False: "FAIL"})
    frame["note"] = frame["note"].fillna("")
    return frame[["suite", "cell", "expected", "got", "tolerance", "status", "note"]]


# Rendering
def _float_format(precision: Optional[int]) -> str:
    precision = get_settings().precision if precision is None else precision
    return f"%.{precision}f"


def render_table(frame: pd.DataFrame, precision: Optional[int] = None) -> str:
    fmt = _float_format(precision)
    return frame.to_string(index=False, float_format=lambda x: fmt % x) + "\n"


def render_csv(frame: pd.DataFrame, precision: Optional[int] = None) -> str:
    """'.' decimals, '\\n' line endings, header always present"""
    return frame.to_csv(index=False, lineterminator="\n", float_format=_float_format(precision))


def sweep_csv(trace: SweepTrace, precision: Optional[int] = None) -> str:
    return render_csv(trace.to_frame(), precision)


def summarize_checks(checks: List[CheckResult]) -> str:
    passed = sum(c.passed for c in checks)
    return f"{passed}/{len(checks)} PASS"

"""
Network document schema
-----------------------
Shape of the JSON network file. Structural problems (missing keys, wrong
types) are caught here; semantic checks live in operations.validate.
"""

from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict, Field

# Separator between parent state labels in CPT row keys
ROW_KEY_SEPARATOR = "|"


class VariableSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    states: List[str]


class NetworkDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    variables: List[VariableSpec]
    parents: Dict[str, List[str]] = Field(default_factory=dict)
    cpt: Dict[str, Dict[str, List[float]]]
    metadata: Dict[str, Any] = Field(default_factory=dict)

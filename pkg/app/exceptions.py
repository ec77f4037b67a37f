"""
Exception hierarchy
-------------------
Every domain failure raised by the package derives from QBNError, which is a
ValueError so callers that only check preconditions can catch the builtin.
"""

from typing import List, Optional, Sequence


class QBNError(ValueError):
    """Base class for all engine errors"""


class NetworkFormatError(QBNError):
    """The network document is not valid JSON or has the wrong shape"""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class NetworkValidationError(QBNError):
    """The network document parsed but violates a semantic invariant"""

    def __init__(self, violations: Sequence):
        self.violations: List = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"network has {len(self.violations)} violation(s): {lines}")


class UnknownNetworkError(QBNError):
    pass


class ConfigurationCapError(QBNError):
    pass


class EvidenceError(QBNError):
    """Unknown variable or state, partial assignment, or query observed"""


class ZeroEvidenceError(QBNError):
    """The normalisation factor alpha is undefined"""


class ThetaLengthError(QBNError):
    pass


class SearchError(QBNError):
    pass

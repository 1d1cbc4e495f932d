"""Exception hierarchy.

Every error carries a ``details`` mapping so the CLI can serialize it
without parsing messages.
"""

from __future__ import annotations

from typing import Any


class LieFlowError(Exception):
    """Base class for all library errors."""

    kind = "LieFlowError"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        return {"type": self.kind, "message": self.message, "details": self.details}


class InputError(LieFlowError, ValueError):
    kind = "InputError"


class ParseError(InputError):
    kind = "ParseError"


class JacobiViolation(LieFlowError):
    kind = "JacobiViolation"


class LeibnizViolation(LieFlowError):
    kind = "LeibnizViolation"


class ClusterAmbiguity(LieFlowError):
    kind = "ClusterAmbiguity"


class InvariantSubspaceViolation(LieFlowError):
    kind = "InvariantSubspaceViolation"


class NotContracting(LieFlowError):
    kind = "NotContracting"


class FlowOverflow(LieFlowError, OverflowError):
    kind = "FlowOverflow"


class StepTooLarge(LieFlowError):
    kind = "StepTooLarge"


class NotNilpotent(LieFlowError):
    kind = "NotNilpotent"


class NotHyperbolic(LieFlowError):
    kind = "NotHyperbolic"


class NonConvergence(LieFlowError):
    kind = "NonConvergence"


class ZeroVector(InputError):
    kind = "ZeroVector"


class ParentMismatch(InputError):
    kind = "ParentMismatch"


class DimensionMismatch(LieFlowError):
    kind = "DimensionMismatch"

"""
Exception hierarchy for the contract-market engine.

The CLI maps these onto exit codes: input, precondition and size errors
exit with 2; contract and property violations exit with 1.
"""

from typing import Any, Dict, Optional


class MarketError(Exception):
    """Base class for every error raised by the engine"""

    exit_code = 2


class InputError(MarketError, ValueError):
    """Malformed input: unknown ids, bad files, illegal arguments"""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        self.detail = message
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class PreconditionError(MarketError, ValueError):
    """A hypothesis required by the called operation does not hold"""


class SizeLimitError(MarketError):
    """An exhaustive computation would exceed its configured cap"""


class ContractViolation(MarketError, RuntimeError):
    """An internal invariant broke; indicates an implementation bug"""

    exit_code = 1


class PropertyViolation(MarketError, AssertionError):
    """An always-on property assertion failed"""

    exit_code = 1

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        self.witness = dict(witness or {})
        super().__init__(message)

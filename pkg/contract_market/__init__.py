"""Matching markets with contracts: stability, Blair lattices, deferred acceptance and disruptions."""

from .errors import (
    ContractViolation,
    InputError,
    MarketError,
    PreconditionError,
    PropertyViolation,
    SizeLimitError,
)
from .model import EMPTY, Allocation, Contract, Market, SubmarketView, full_view, submarket

__version__ = "0.1.0"

__all__ = [
    "EMPTY",
    "Allocation",
    "Contract",
    "ContractViolation",
    "InputError",
    "Market",
    "MarketError",
    "PreconditionError",
    "PropertyViolation",
    "SizeLimitError",
    "SubmarketView",
    "full_view",
    "submarket",
]

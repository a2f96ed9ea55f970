"""Semantic/bit multi-user NOMA toolkit.

Rate models for semantic and bit streams, downlink OMA/NOMA/semi-NOMA rate
regions, and opportunistic semantic/bit mode switching for uplink NOMA.
"""

__version__ = "0.1.0"

from semnoma.errors import (  # noqa: E402
    AllocationError,
    ConfigError,
    InfeasibleError,
    SemnomaError,
)

__all__ = [
    "__version__",
    "AllocationError",
    "ConfigError",
    "InfeasibleError",
    "SemnomaError",
]

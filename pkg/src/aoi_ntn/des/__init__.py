"""Discrete-event simulation of the multi-stream and tandem systems."""
from .multistream import MultistreamResult, simulate_multistream
from .tandem import TandemResult, offered_load, simulate_tandem
from .trace import (
    AoIStats,
    DeliveryTrace,
    accumulate_aoi,
    aggregate,
    renewal_identity_residual,
    write_traces_csv,
)

__all__ = [
    "AoIStats",
    "DeliveryTrace",
    "MultistreamResult",
    "TandemResult",
    "accumulate_aoi",
    "aggregate",
    "offered_load",
    "renewal_identity_residual",
    "simulate_multistream",
    "simulate_tandem",
    "write_traces_csv",
]

"""Multi-stream M/G/1/1 blocking server with Bernoulli transmission success."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..analytic import FlowSet, ServiceSpec
from ..errors import HorizonTooShort, ValidationError
from ..rng import stream
from . import kernels
from .trace import AoIStats, DeliveryTrace, accumulate_aoi

MIN_DELIVERIES = 100


@dataclass(frozen=True)
class MultistreamResult:
    stats: list  # AoIStats per flow
    traces: list  # DeliveryTrace per flow
    arrivals: np.ndarray
    blocked: np.ndarray  # per-flow arrivals that found the server busy
    failed: np.ndarray  # per-flow served packets lost to channel errors


def sample_service(spec: ServiceSpec, rng, n):
    if spec.family == "exponential":
        return rng.exponential(1.0 / spec.rate, n)
    return rng.gamma(1.0 / spec.scv, spec.scv / spec.rate, n)


def simulate_multistream(flows: FlowSet, horizon: float, seed: int, min_deliveries=MIN_DELIVERIES):
    """Simulate M Poisson flows sharing a non-preemptive server with no buffer.

    An arrival that finds the server busy is dropped. A completed service
    is delivered with probability ``flows.p_success``; failures are not
    retransmitted. Per-flow AoI is measured from that flow's deliveries.
    Raises :class:`HorizonTooShort` (traces attached) if any flow has fewer
    than ``min_deliveries`` deliveries.
    """
    if not horizon > 0:
        raise ValidationError("horizon", "must be > 0")
    m = len(flows.rates)
    xi = flows.total()
    ra = stream(seed, "multistream", "arrivals")
    n = ra.poisson(xi * horizon)
    t = np.sort(ra.uniform(0.0, horizon, n))
    fid = ra.choice(m, size=n, p=np.asarray(flows.rates) / xi) if m > 1 else np.zeros(n, dtype=np.int64)
    service = sample_service(flows.service, stream(seed, "multistream", "service"), n)
    ok = stream(seed, "multistream", "channel").random(n) < flows.p_success

    accepted, completion = kernels.loss_server(t, service)
    delivered = accepted & ok

    traces, stats = [], []
    arrivals = np.bincount(fid, minlength=m)
    blocked = np.bincount(fid[~accepted], minlength=m)
    failed = np.bincount(fid[accepted & ~ok], minlength=m)
    short = []
    for i in range(m):
        sel = delivered & (fid == i)
        tr = DeliveryTrace(t[sel], completion[sel], horizon, i)
        traces.append(tr)
        if len(tr) < min_deliveries:
            short.append(i)
            continue
        stats.append(accumulate_aoi(tr, drops=int(blocked[i])))
    if short:
        raise HorizonTooShort(f"flows {short} have fewer than {min_deliveries} deliveries", traces)
    return MultistreamResult(stats, traces, arrivals, blocked, failed)

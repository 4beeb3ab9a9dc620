"""K single-server FCFS relays in series with cross traffic and link loss."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..analytic import SatelliteChain
from ..errors import HorizonTooShort, Unstable, ValidationError
from ..rng import stream
from . import kernels
from .trace import AoIStats, DeliveryTrace, accumulate_aoi

MIN_DELIVERIES = 100


@dataclass(frozen=True)
class TandemResult:
    stats: AoIStats
    trace: DeliveryTrace
    generated: int
    link_losses: int
    invisible: int


def offered_load(chain: SatelliteChain, xi: float):
    """Per-node arrival rate seen by the simulator (visibility not applied)."""
    loads, src, cross = [], xi, 0.0
    for nd in chain.nodes:
        cross += nd.theta
        loads.append(src + cross)
        src *= 1 - nd.eps
        cross *= (1 - nd.psi) * (1 - nd.eps)
    return loads


def simulate_tandem(chain: SatelliteChain, xi: float, horizon: float, seed: int, min_deliveries=MIN_DELIVERIES):
    """Simulate source packets crossing ``chain`` and measure their AoI at the end.

    Source packets enter node 1 at rate ``xi``; node k adds its own Poisson
    cross traffic at ``theta_k``. After service at node k every packet
    survives link k with probability ``1 - eps_k``; cross packets also
    leave the chain with probability ``psi_k``. A source packet that
    survives the last link is then visible with probability ``p_a``
    (one draw per packet). Buffers are unbounded.
    """
    if not horizon > 0:
        raise ValidationError("horizon", "must be > 0")
    if not xi > 0:
        raise ValidationError("xi", "source rate must be > 0")
    for j, (nd, load) in enumerate(zip(chain.nodes, offered_load(chain, xi)), start=1):
        if load >= nd.mu:
            raise Unstable(j, nd.mu - load)

    rs = stream(seed, "tandem", "source")
    n_src = rs.poisson(xi * horizon)
    t = np.sort(rs.uniform(0.0, horizon, n_src))
    generated_at = t.copy()
    visible_u = stream(seed, "tandem", "visibility").random(n_src)
    src_id = np.arange(n_src, dtype=np.int64)  # -1 marks cross traffic

    losses = 0
    for k, nd in enumerate(chain.nodes, start=1):
        rc = stream(seed, "tandem", "cross", k)
        n_cross = rc.poisson(nd.theta * horizon) if nd.theta > 0 else 0
        if n_cross:
            t = np.concatenate([t, np.sort(rc.uniform(0.0, horizon, n_cross))])
            src_id = np.concatenate([src_id, np.full(n_cross, -1, dtype=np.int64)])
            order = np.argsort(t, kind="stable")
            t, src_id = t[order], src_id[order]
        service = stream(seed, "tandem", "service", k).exponential(1.0 / nd.mu, len(t))
        t = kernels.lindley(t, service)

        rr = stream(seed, "tandem", "route", k)
        survive = rr.random(len(t)) >= nd.eps
        stay = rr.random(len(t)) >= nd.psi
        is_src = src_id >= 0
        losses += int(np.count_nonzero(is_src & ~survive))
        keep = survive & (is_src | stay)
        t, src_id = t[keep], src_id[keep]

    is_src = src_id >= 0
    t, src_id = t[is_src], src_id[is_src]
    seen = visible_u[src_id] < chain.p_a
    trace = DeliveryTrace(generated_at[src_id[seen]], t[seen], horizon)
    invisible = int(np.count_nonzero(~seen))
    if len(trace) < min_deliveries:
        raise HorizonTooShort(f"only {len(trace)} deliveries (< {min_deliveries})", [trace])
    stats = accumulate_aoi(trace, drops=n_src - len(trace))
    return TandemResult(stats, trace, int(n_src), losses, invisible)

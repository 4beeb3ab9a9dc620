"""Delivery traces and exact sawtooth AoI accounting."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientDeliveries


@dataclass(frozen=True)
class DeliveryTrace:
    """Generation and delivery instants of successfully delivered packets."""

    generation: np.ndarray
    delivery: np.ndarray
    horizon: float
    flow_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "generation", np.asarray(self.generation, dtype=float))
        object.__setattr__(self, "delivery", np.asarray(self.delivery, dtype=float))
        if self.generation.shape != self.delivery.shape:
            raise ValueError("generation and delivery must have equal length")
        # equality is allowed: a tiny gamma service time can vanish in t + s
        if np.any(self.delivery < self.generation):
            raise ValueError("no delivery may precede its generation")
        if np.any(np.diff(self.delivery) <= 0):
            raise ValueError("deliveries must be strictly increasing")

    def __len__(self):
        return len(self.delivery)

    def fresh(self):
        """Sub-trace of age-reducing deliveries (stale ones dropped)."""
        g = self.generation
        if len(g) == 0:
            return self
        prev_max = np.maximum.accumulate(np.concatenate([[-np.inf], g[:-1]]))
        keep = g > prev_max
        return DeliveryTrace(g[keep], self.delivery[keep], self.horizon, self.flow_id)


@dataclass(frozen=True)
class AoIStats:
    time_avg_aoi: float
    mean_peak_aoi: float
    deliveries: int
    drops: int = 0
    ci_halfwidth: float = math.nan
    peak_ci_halfwidth: float = math.nan
    replications: int = 1


def accumulate_aoi(trace: DeliveryTrace, drops: int = 0) -> AoIStats:
    """Integrate the age sawtooth between the first and last delivery.

    Age grows at unit slope and drops to ``delivery - generation`` only at
    deliveries carrying a newer generation time.
    """
    if len(trace) < 2:
        raise InsufficientDeliveries(f"need >= 2 deliveries, have {len(trace)}")
    d0 = trace.delivery[0]
    span = trace.delivery[-1] - d0
    f = trace.fresh()
    g = f.generation - d0
    # breakpoints of the piecewise-constant newest-generation curve g(t)
    edges = np.append(f.delivery - d0, span)
    # integral of (t - g(t)) over [0, span]
    area = 0.5 * span * span - float(np.dot(g, np.diff(edges)))
    peaks = (f.delivery - d0)[1:] - g[:-1]
    peak = float(peaks.mean()) if len(peaks) else math.nan
    return AoIStats(area / span, peak, len(trace), drops)


def renewal_identity_residual(trace: DeliveryTrace) -> float:
    """Relative gap between the moment form N/T (E[Y^2]/2 + E[Y T]) and the integral.

    Each cycle pairs the inter-delivery gap Y_k with the system time of the
    delivery that opened it.
    """
    if len(trace) < 1000:
        raise InsufficientDeliveries(f"need >= 1000 deliveries, have {len(trace)}")
    f = trace.fresh()
    integral = accumulate_aoi(f).time_avg_aoi
    y = np.diff(f.delivery)
    t = (f.delivery - f.generation)[:-1]
    rate = len(y) / (f.delivery[-1] - f.delivery[0])
    moment = rate * (np.mean(y * y) / 2 + np.mean(y * t))
    return abs(moment - integral) / integral


def aggregate(stats) -> AoIStats:
    """Pool replications: means plus 95% normal half-widths."""
    stats = list(stats)
    r = len(stats)
    avg = np.array([s.time_avg_aoi for s in stats])
    peak = np.array([s.mean_peak_aoi for s in stats])
    if r > 1:
        ci = 1.96 * avg.std(ddof=1) / math.sqrt(r)
        pci = 1.96 * peak.std(ddof=1) / math.sqrt(r)
    else:
        ci = pci = math.nan
    return AoIStats(
        float(avg.mean()),
        float(peak.mean()),
        sum(s.deliveries for s in stats),
        sum(s.drops for s in stats),
        float(ci),
        float(pci),
        r,
    )


def write_traces_csv(traces, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["generation_time", "delivery_time", "flow_id"])
        for tr in traces:
            for g, d in zip(tr.generation, tr.delivery):
                w.writerow([repr(float(g)), repr(float(d)), tr.flow_id])

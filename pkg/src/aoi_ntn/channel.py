"""SINR under Rayleigh fading and Monte Carlo success probability."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannel, UnassociatedSource, ValidationError
from .rng import stream
from .spatial import AssociationMap, PointPattern

# samples x interferers per Monte Carlo block; fixed so results do not depend on chunking
_BLOCK = 1024


@dataclass(frozen=True)
class ChannelConfig:
    """Path-loss exponent, normalised noise power and linear SINR threshold."""

    alpha: float = 4.0
    noise: float = 1e-8
    theta: float = 1.0

    def __post_init__(self):
        if not self.alpha > 2:
            raise ValidationError("channel.alpha", "path-loss exponent must exceed 2")
        if self.noise < 0:
            raise ValidationError("channel.noise", "noise power must be >= 0")
        if not self.theta > 0:
            raise ValidationError("channel.theta", "SINR threshold must be > 0")

    @classmethod
    def from_db(cls, alpha, noise, theta_db):
        return cls(alpha=alpha, noise=noise, theta=db_to_linear(theta_db))


@dataclass(frozen=True)
class LinkSample:
    serving_distance: float
    interferer_distances: tuple = ()
    fading: tuple = (1.0,)  # serving link first, then one per interferer

    def __post_init__(self):
        if self.serving_distance <= 0 or any(r <= 0 for r in self.interferer_distances):
            raise ValidationError("link", "distances must be > 0")
        if len(self.fading) != 1 + len(self.interferer_distances):
            raise ValidationError("link.fading", "need one draw per link")
        if any(h < 0 for h in self.fading):
            raise ValidationError("link.fading", "fading draws must be >= 0")


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def sinr(link: LinkSample, cfg: ChannelConfig) -> float:
    if cfg.noise == 0 and not link.interferer_distances:
        raise DegenerateChannel("no noise and no interferers: SINR is unbounded")
    signal = link.fading[0] * link.serving_distance ** (-cfg.alpha)
    interference = sum(h * r ** (-cfg.alpha) for h, r in zip(link.fading[1:], link.interferer_distances))
    return signal / (interference + cfg.noise)


def noise_only_success_probability(r0: float, cfg: ChannelConfig) -> float:
    """P{h r0^-alpha / W > theta} with unit-mean exponential fading."""
    return math.exp(-cfg.theta * cfg.noise * r0**cfg.alpha)


def estimate_success_probability(
    ground: PointPattern,
    assoc: AssociationMap,
    source: int,
    cfg: ChannelConfig,
    active_prob=None,
    n_samples: int = 2000,
    seed: int = 0,
):
    """Monte Carlo estimate of P{SINR > theta} for one source node.

    Interferers are the ground nodes outside the source's cell; nodes in
    the same cell are silent while the source is scheduled. Each interferer
    transmits independently with probability ``active_prob``, or with its
    own cell's scheduling probability ``1/N_j`` when ``active_prob`` is None.
    Fading is redrawn for every sample.

    Returns ``(p_hat, ci_halfwidth)`` with a 95% normal-approximation CI.
    """
    if n_samples < 1:
        raise ValidationError("n_samples", "must be >= 1")
    if not 0 <= source < len(assoc.assignment) or assoc.uav_points is None:
        raise UnassociatedSource(f"ground node {source} has no serving UAV")
    serving = assoc.assignment[source]
    uav = assoc.uav_points[serving]
    r0 = float(np.hypot(*(ground.points[source] - uav)))
    r0 = max(r0, 1e-9)

    others = np.flatnonzero(assoc.assignment != serving)
    r = np.hypot(*(ground.points[others] - uav).T)
    np.maximum(r, 1e-9, out=r)
    gain = r ** (-cfg.alpha)
    if active_prob is None:
        act = 1.0 / assoc.load[assoc.assignment[others]]
    else:
        act = np.full(len(others), float(active_prob))
    signal_gain = r0 ** (-cfg.alpha)

    hits = 0
    for b, start in enumerate(range(0, n_samples, _BLOCK)):
        n = min(_BLOCK, n_samples - start)
        rng = stream(seed, "psj", b)
        h0 = rng.standard_exponential(n)
        h = rng.standard_exponential((n, len(others)))
        on = rng.random((n, len(others))) < act
        interference = (h * on) @ gain
        with np.errstate(divide="ignore"):
            s = h0 * signal_gain / (interference + cfg.noise)
        hits += int(np.count_nonzero(s > cfg.theta))
    p = hits / n_samples
    return p, 1.96 * math.sqrt(p * (1.0 - p) / n_samples)


def typical_source(ground: PointPattern, window_center) -> int:
    """Index of the ground node closest to ``window_center``."""
    d = np.hypot(*(ground.points - np.asarray(window_center)).T)
    return int(np.argmin(d))

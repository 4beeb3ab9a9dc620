"""Closed-form AoI expressions for multi-stream and tandem service.

Every formula here is evaluated exactly as derived, including terms whose
algebra is suspect; the simulator in :mod:`aoi_ntn.des` is what measures
how far off they are.

Flow indices are 0-based. Chain node indices and hop counts are 1-based
(node 1 is the first relay), matching the usual K-hop notation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    IndexOutOfRange,
    NotExponential,
    PoleAt,
    Unstable,
    ValidationError,
    ZeroSuccessProbability,
)


@dataclass(frozen=True)
class ServiceSpec:
    """Service-time law with mean ``1/rate`` and squared CV ``scv``.

    ``family`` selects the sampler used by the simulator: ``"gamma"``
    (shape ``1/scv``, scale ``scv/rate``) or ``"exponential"`` (requires
    ``scv == 1``).
    """

    rate: float
    scv: float = 1.0
    family: str = "gamma"

    def __post_init__(self):
        if not self.rate > 0:
            raise ValidationError("service.rate", "must be > 0")
        if not self.scv > 0:
            raise ValidationError("service.scv", "must be > 0")
        if self.family not in ("gamma", "exponential"):
            raise ValidationError("service.family", "must be 'gamma' or 'exponential'")
        if self.family == "exponential" and self.scv != 1.0:
            raise ValidationError("service.scv", "exponential service has scv = 1")

    def first_moment(self):
        return 1.0 / self.rate

    def second_moment(self):
        return (1.0 + self.scv) / self.rate**2

    @property
    def is_exponential(self):
        return self.scv == 1.0


@dataclass(frozen=True)
class FlowSet:
    """M Poisson status flows sharing one server and one success probability."""

    rates: tuple
    p_success: float
    service: ServiceSpec

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if not self.rates or any(not r > 0 for r in self.rates):
            raise ValidationError("flows.rates", "need at least one flow, all rates > 0")
        if not 0.0 < self.p_success < 1.0:
            raise ValidationError("flows.p_success", "must lie strictly inside (0, 1)")

    def total(self):
        return math.fsum(self.rates)

    @property
    def utilization(self):
        return self.total() / self.service.rate

    def rate(self, i):
        if not 0 <= i < len(self.rates):
            raise IndexOutOfRange(f"flow index {i} outside 0..{len(self.rates) - 1}")
        return self.rates[i]


@dataclass(frozen=True)
class ChainNode:
    mu: float
    eps: float = 0.0
    theta: float = 0.0
    psi: float = 0.0
    n: int = 1

    def __post_init__(self):
        if not self.mu > 0:
            raise ValidationError("chain.node.mu", "must be > 0")
        # eps = 1 (dead link) is allowed; analytic forms then raise ZeroSuccessProbability
        if not 0.0 <= self.eps <= 1.0:
            raise ValidationError("chain.node.eps", "must lie in [0, 1]")
        if self.theta < 0:
            raise ValidationError("chain.node.theta", "must be >= 0")
        if not 0.0 <= self.psi <= 1.0:
            raise ValidationError("chain.node.psi", "must lie in [0, 1]")
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError("chain.node.n", "must be a positive integer")


@dataclass(frozen=True)
class SatelliteChain:
    nodes: tuple
    p_a: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if not self.nodes:
            raise ValidationError("chain.nodes", "need at least one node")
        if not 0.0 <= self.p_a <= 1.0:
            raise ValidationError("chain.p_a", "must lie in [0, 1]")

    @property
    def K(self):
        return len(self.nodes)

    def node(self, k):
        if not 1 <= k <= self.K:
            raise IndexOutOfRange(f"node {k} outside 1..{self.K}")
        return self.nodes[k - 1]


# --- multi-stream M/M/1/1 --------------------------------------------------


def _require_exponential(flows):
    if not flows.service.is_exponential:
        raise NotExponential(f"M/M/1/1 forms need scv = 1, got {flows.service.scv}")


def mm11_departure_moments(flows: FlowSet, i: int = 0):
    """First and second moments of flow ``i``'s inter-delivery time."""
    _require_exponential(flows)
    xi, xi_i, mu, p = flows.total(), flows.rate(i), flows.service.rate, flows.p_success
    ey = (xi * (1 - p) + mu) / (mu * xi_i * p)
    ey2 = (2 * (xi * p + mu) ** 2 - 2 * mu * xi_i * p**2) / ((1 - p) ** 2 * (mu * xi_i) ** 2)
    return ey, ey2


def mm11_average_aoi(flows: FlowSet, i: int = 0) -> float:
    ey, ey2 = mm11_departure_moments(flows, i)
    return 1.0 / flows.service.rate + ey2 / (2 * ey)


def mgf_departure_mm11(s: float, flows: FlowSet, i: int = 0) -> float:
    xi, xi_i, mu, p = flows.total(), flows.rate(i), flows.service.rate, flows.p_success
    a, b, c = s * s * p, (xi * p + mu) * s, mu * xi_i
    den = a - b + c
    if abs(den) <= 1e-12 * (abs(a) + abs(b) + abs(c)):
        raise PoleAt(s)
    return mu * xi_i * (1 - p) / den


def mgf_derivative_check(flows: FlowSet, i: int = 0, h1: float = 1e-6, h2: float = 1e-4) -> dict:
    """Differentiate the departure MGF at 0 and set it beside the closed-form moments.

    Nothing is asserted; the MGF expression is not normalised (its value at
    0 is ``1 - p``), so the two routes are not expected to agree.
    """
    f = lambda s: mgf_departure_mm11(s, flows, i)  # noqa: E731
    phi0 = f(0.0)
    d1 = (f(h1) - f(-h1)) / (2 * h1)
    d2 = (f(h2) - 2 * phi0 + f(-h2)) / (h2 * h2)
    ey, ey2 = mm11_departure_moments(flows, i)
    return {
        "xi": flows.total(),
        "xi_i": flows.rate(i),
        "mu": flows.service.rate,
        "p": flows.p_success,
        "phi_at_0": phi0,
        "phi_prime_at_0": d1,
        "phi_second_at_0": d2,
        "EY_closed_form": ey,
        "EY2_closed_form": ey2,
        "EY_rel_gap": (d1 - ey) / ey,
        "EY2_rel_gap": (d2 - ey2) / ey2,
    }


# --- multi-stream M/G/1/1 --------------------------------------------------


def mg11_average_aoi(flows: FlowSet, i: int = 0) -> float:
    xi, xi_i, p = flows.total(), flows.rate(i), flows.p_success
    et, et2 = flows.service.first_moment(), flows.service.second_moment()
    return (xi * et + 1) / (xi_i * (1 - p) * p) + xi * et2 * p**2 / (2 * (xi * p * et + 1))


def mg11_peak_aoi(flows: FlowSet, i: int = 0) -> float:
    xi, xi_i, p = flows.total(), flows.rate(i), flows.p_success
    et = flows.service.first_moment()
    return ((xi * p + xi_i) * et + 1) / (xi_i * p)


# --- satellite tandem --------------------------------------------------------


def cross_traffic_rate(chain: SatelliteChain, k: int) -> float:
    """Cross-traffic rate entering node ``k`` (own plus surviving upstream)."""
    chain.node(k)
    total = 0.0
    for j in range(1, k + 1):
        carried = chain.node(j).theta
        for m in range(j, k):
            nd = chain.node(m)
            carried *= (1 - nd.psi) * (1 - nd.eps)
        total += carried
    return total


def chain_success_probability(chain: SatelliteChain, j: int) -> float:
    """Probability a source packet survives the first ``j`` links and visibility."""
    chain.node(j)
    p = 1.0
    for m in range(1, j + 1):
        p *= 1 - chain.node(m).eps
    return p * chain.p_a


def node_arrival_rate(chain: SatelliteChain, j: int, xi: float) -> float:
    return chain_success_probability(chain, j) * xi + cross_traffic_rate(chain, j)


def node_response_rate(chain: SatelliteChain, j: int, xi: float, strict: bool = False) -> float:
    """``mu_j`` minus the node's total arrival rate; positive iff stable.

    With ``strict`` a non-positive value raises :class:`Unstable`.
    """
    alpha = chain.node(j).mu - node_arrival_rate(chain, j, xi)
    if strict and alpha <= 0:
        raise Unstable(j, alpha)
    return alpha


def _chain_terms(chain, xi):
    pk = chain_success_probability(chain, chain.K)
    if pk <= 0:
        raise ZeroSuccessProbability("end-to-end success probability is zero")
    if not xi > 0:
        raise ValidationError("xi", "source rate must be > 0")
    alphas = [node_response_rate(chain, j, xi, strict=True) for j in range(1, chain.K + 1)]
    return pk, alphas


def chain_aoi_approx(chain: SatelliteChain, xi: float) -> float:
    """Average AoI assuming inter-delivery time and sojourn are independent."""
    pk, alphas = _chain_terms(chain, xi)
    total = sum(1.0 / (pk * a**nd.n) for a, nd in zip(alphas, chain.nodes))
    return total + 1.0 / (xi * pk) + (1 - pk) ** 2 / (xi * pk**2)


def chain_aoi_upper(chain: SatelliteChain, xi: float) -> float:
    pk, alphas = _chain_terms(chain, xi)
    s1 = sum((nd.mu**nd.n + a**nd.n) / (xi * nd.mu**nd.n * a**nd.n) for a, nd in zip(alphas, chain.nodes))
    s2 = sum((1 - pk) / (pk * a**nd.n * xi) for a, nd in zip(alphas, chain.nodes))
    return xi * (s1 + s2 + 1.0 / (xi**2 * pk) + ((1 - pk) / (xi * pk)) ** 2)

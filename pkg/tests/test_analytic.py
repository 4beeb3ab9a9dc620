import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aoi_ntn import analytic as an
from aoi_ntn.analytic import ChainNode, FlowSet, SatelliteChain, ServiceSpec
from aoi_ntn.errors import IndexOutOfRange, NotExponential, PoleAt, Unstable, ValidationError, ZeroSuccessProbability

EXP2 = ServiceSpec(2.0, 1.0, "exponential")
MM = FlowSet((1.0, 2.0), 0.5, EXP2)  # xi = 3, xi_1 = 1, mu = 2, p = 0.5
MG = FlowSet((1.5, 1.5), 0.8, ServiceSpec(3.0, 1.0))  # xi = 3, xi_i = 1.5, mu = 3


def chain2(p_a=0.9, mu=5.0):
    return SatelliteChain([ChainNode(mu, 0.1, 1.0, 0.2), ChainNode(mu, 0.2, 0.5, 0.0)], p_a)


# --- types -------------------------------------------------------------------


def test_service_moments():
    s = ServiceSpec(4.0, 2.0)
    assert s.first_moment() == 0.25
    assert s.second_moment() == pytest.approx(3 / 16)
    with pytest.raises(ValidationError):
        ServiceSpec(1.0, 2.0, "exponential")
    with pytest.raises(ValidationError):
        ServiceSpec(0.0)


@pytest.mark.parametrize("p", [0.0, 1.0, 1.5])
def test_flowset_requires_open_interval(p):
    with pytest.raises(ValidationError):
        FlowSet((1.0,), p, EXP2)


def test_flowset_total_and_utilization():
    assert MM.total() == 3.0
    assert MM.utilization == 1.5
    with pytest.raises(IndexOutOfRange):
        MM.rate(5)


# --- M/M/1/1 -------------------------------------------------------------------


def test_mm11_moments_example():
    xi, x1, mu, p = F(3), F(1), F(2), F(1, 2)
    ey = (xi * (1 - p) + mu) / (mu * x1 * p)
    ey2 = (2 * (xi * p + mu) ** 2 - 2 * mu * x1 * p**2) / ((1 - p) ** 2 * (mu * x1) ** 2)
    assert ey == F(7, 2) and ey2 == F(47, 2)
    got = an.mm11_departure_moments(MM, 0)
    assert got[0] == pytest.approx(3.5, rel=1e-12)
    assert got[1] == pytest.approx(23.5, rel=1e-12)


def test_mm11_aoi_example():
    assert an.mm11_average_aoi(MM, 0) == pytest.approx(0.5 + 23.5 / 7, rel=1e-12)
    assert an.mm11_average_aoi(MM, 0) == pytest.approx(3.8571, abs=1e-4)


def test_mm11_needs_exponential():
    with pytest.raises(NotExponential):
        an.mm11_departure_moments(FlowSet((1.0,), 0.5, ServiceSpec(2.0, 2.0)))


def test_mm11_degenerates_near_p_one():
    vals = [an.mm11_departure_moments(FlowSet((1.0, 2.0), p, EXP2))[1] for p in (0.9, 0.99, 0.999, 0.9999)]
    assert np.all(np.diff(vals) > 0) and vals[-1] > 1e8


def test_mm11_symmetric_flows():
    f = FlowSet((0.75,) * 4, 0.7, ServiceSpec(5.0, 1.0, "exponential"))
    vals = {an.mm11_average_aoi(f, i) for i in range(4)}
    assert len(vals) == 1


def test_mm11_aoi_decreasing_in_flow_rate():
    grid = np.linspace(0.5, 2.5, 21)
    vals = [an.mm11_average_aoi(FlowSet((x, 3.0 - x), 0.8, ServiceSpec(4.0, 1.0, "exponential"))) for x in grid]
    assert np.all(np.diff(vals) < 0)


# --- departure MGF ---------------------------------------------------------------


def test_mgf_at_zero_is_one_minus_p():
    assert an.mgf_departure_mm11(0.0, MM) == pytest.approx(0.5)


def test_mgf_pole():
    # s^2 p - (xi p + mu) s + mu xi_1 = 0.5 s^2 - 3.5 s + 2
    root = (3.5 - math.sqrt(3.5**2 - 4 * 0.5 * 2)) / (2 * 0.5)
    with pytest.raises(PoleAt):
        an.mgf_departure_mm11(root, MM)


def test_mgf_derivative_check_fields():
    rep = an.mgf_derivative_check(MM)
    assert rep["phi_at_0"] == pytest.approx(0.5)
    # analytic derivative of the MGF expression at 0: mu xi1 (1-p)(xi p + mu) / (mu xi1)^2
    assert rep["phi_prime_at_0"] == pytest.approx(0.5 * 3.5 / 2, rel=1e-6)
    assert rep["EY_closed_form"] == pytest.approx(3.5)
    assert {"phi_second_at_0", "EY2_closed_form", "EY_rel_gap", "EY2_rel_gap"} <= set(rep)


# --- M/G/1/1 -------------------------------------------------------------------


def test_mg11_average_example():
    xi, xi_i, p, et, et2 = F(3), F(3, 2), F(4, 5), F(1, 3), F(2, 9)
    exact = (xi * et + 1) / (xi_i * (1 - p) * p) + xi * et2 * p**2 / (2 * (xi * p * et + 1))
    assert an.mg11_average_aoi(MG, 0) == pytest.approx(float(exact), rel=1e-12)
    assert an.mg11_average_aoi(MG, 0) == pytest.approx(8.4519, abs=1e-4)


def test_mg11_peak_example():
    exact = ((F(3) * F(4, 5) + F(3, 2)) * F(1, 3) + 1) / (F(3, 2) * F(4, 5))
    assert an.mg11_peak_aoi(MG, 0) == pytest.approx(float(exact), rel=1e-12)
    assert an.mg11_peak_aoi(MG, 0) == pytest.approx(1.9167, abs=1e-4)


def test_mg11_increasing_in_scv():
    vals = [an.mg11_average_aoi(FlowSet((1.5, 1.5), 0.8, ServiceSpec(3.0, c))) for c in np.linspace(0.1, 5, 25)]
    assert np.all(np.diff(vals) > 0)


def test_mg11_exponential_consistent():
    g = FlowSet((1.5, 1.5), 0.8, ServiceSpec(3.0, 1.0, "gamma"))
    e = FlowSet((1.5, 1.5), 0.8, ServiceSpec(3.0, 1.0, "exponential"))
    assert an.mg11_average_aoi(g) == an.mg11_average_aoi(e)


def test_mg11_peak_monotone():
    ps = np.linspace(0.05, 0.95, 25)
    vals = [an.mg11_peak_aoi(FlowSet((1.5, 1.5), p, ServiceSpec(3.0))) for p in ps]
    assert np.all(np.diff(vals) < 0)
    xs = np.linspace(0.2, 2.8, 25)
    vals = [an.mg11_peak_aoi(FlowSet((x, 3 - x), 0.8, ServiceSpec(3.0))) for x in xs]
    assert np.all(np.diff(vals) < 0)


@given(
    st.lists(st.floats(0.01, 10), min_size=1, max_size=6),
    st.floats(0.01, 0.99),
    st.floats(0.1, 20),
    st.floats(0.05, 8),
)
@settings(max_examples=200, deadline=None)
def test_mg11_finite_positive(rates, p, mu, scv):
    f = FlowSet(tuple(rates), p, ServiceSpec(mu, scv))
    for i in range(len(rates)):
        for v in (an.mg11_average_aoi(f, i), an.mg11_peak_aoi(f, i)):
            assert math.isfinite(v) and v > 0


@given(st.permutations([0.3, 0.7, 1.1, 1.9]))
@settings(max_examples=20, deadline=None)
def test_flow_permutation_symmetry(perm):
    base = (0.3, 0.7, 1.1, 1.9)
    f0 = FlowSet(base, 0.6, ServiceSpec(5.0))
    f1 = FlowSet(tuple(perm), 0.6, ServiceSpec(5.0))
    for j, r in enumerate(perm):
        i = base.index(r)
        assert an.mg11_average_aoi(f1, j) == pytest.approx(an.mg11_average_aoi(f0, i), rel=1e-12)


# --- chain -----------------------------------------------------------------------


def test_cross_traffic_examples():
    ch = chain2()
    assert an.cross_traffic_rate(ch, 1) == 1.0
    assert an.cross_traffic_rate(ch, 2) == pytest.approx(1 * 0.8 * 0.9 + 0.5, rel=1e-12)
    full = SatelliteChain([ChainNode(5, 0.1, t, 1.0) for t in (1.0, 0.4, 0.3)])
    assert [an.cross_traffic_rate(full, k) for k in (1, 2, 3)] == pytest.approx([1.0, 0.4, 0.3])
    with pytest.raises(IndexOutOfRange):
        an.cross_traffic_rate(ch, 3)


def test_success_chain_examples():
    assert an.chain_success_probability(SatelliteChain([ChainNode(1)] * 3, 1.0), 3) == 1.0
    assert an.chain_success_probability(chain2(), 2) == pytest.approx(0.648, rel=1e-12)
    with pytest.raises(IndexOutOfRange):
        an.chain_success_probability(chain2(), 0)


def test_node_rates_examples():
    ch = chain2()
    assert an.node_arrival_rate(ch, 2, 2.0) == pytest.approx(2.516, rel=1e-12)
    assert an.node_response_rate(ch, 2, 2.0) == pytest.approx(2.484, rel=1e-12)
    plain = SatelliteChain([ChainNode(5.0)] * 3, 1.0)
    assert [an.node_arrival_rate(plain, j, 2.0) for j in (1, 2, 3)] == [2.0] * 3
    assert an.node_response_rate(plain, 2, 0.0) == 5.0


def test_response_rate_flags_instability():
    ch = chain2(mu=2.0)
    assert an.node_response_rate(ch, 2, 2.0) < 0
    with pytest.raises(Unstable):
        an.node_response_rate(ch, 2, 2.0, strict=True)


def test_arrival_rate_linear_in_theta():
    a = an.node_arrival_rate(chain2(), 2, 1.0)
    bumped = SatelliteChain([ChainNode(5.0, 0.1, 1.0, 0.2), ChainNode(5.0, 0.2, 0.75, 0.0)], 0.9)
    assert an.node_arrival_rate(bumped, 2, 1.0) - a == pytest.approx(0.25)


def test_chain_single_node_examples():
    ch = SatelliteChain([ChainNode(5.0)], 1.0)
    assert an.chain_aoi_approx(ch, 2.0) == pytest.approx(1 / 3 + 1 / 2, rel=1e-12)
    assert an.chain_aoi_upper(ch, 2.0) == pytest.approx(2 * (0.5 * 8 / 15 + 0.25), rel=1e-12)
    assert an.chain_aoi_upper(ch, 2.0) == pytest.approx(1.0333, abs=1e-4)


def test_chain_u_shape():
    ch = SatelliteChain([ChainNode(2.0, 0.05, 0.1, 0.5)] * 3, 0.9)
    xs = np.linspace(0.05, 1.5, 30)
    vals = np.array([an.chain_aoi_approx(ch, x) for x in xs])
    k = int(np.argmin(vals))
    assert 0 < k < len(xs) - 1
    assert np.all(np.diff(vals[: k + 1]) < 0) and np.all(np.diff(vals[k:]) > 0)


def test_chain_diverges_near_capacity():
    ch = SatelliteChain([ChainNode(1.0)], 1.0)
    assert an.chain_aoi_approx(ch, 0.9999) > 1e3 and an.chain_aoi_upper(ch, 0.9999) > 1e3


def test_chain_errors():
    with pytest.raises(ZeroSuccessProbability):
        an.chain_aoi_approx(SatelliteChain([ChainNode(1.0)], 0.0), 0.5)
    with pytest.raises(Unstable):
        an.chain_aoi_upper(SatelliteChain([ChainNode(1.0)], 1.0), 1.5)


def test_recursions():
    rng = np.random.default_rng(0)
    for _ in range(50):
        k = int(rng.integers(2, 7))
        nodes = [ChainNode(10.0, rng.uniform(0, 0.5), rng.uniform(0, 1), rng.uniform(0, 1)) for _ in range(k)]
        ch = SatelliteChain(nodes, rng.uniform(0.1, 1))
        for j in range(2, k + 1):
            prev = nodes[j - 2]
            assert an.cross_traffic_rate(ch, j) == pytest.approx(
                an.cross_traffic_rate(ch, j - 1) * (1 - prev.psi) * (1 - prev.eps) + nodes[j - 1].theta)
            assert an.chain_success_probability(ch, j) == pytest.approx(
                an.chain_success_probability(ch, j - 1) * (1 - nodes[j - 1].eps))
        ps = [an.chain_success_probability(ch, j) for j in range(1, k + 1)]
        assert np.all(np.diff(ps) <= 0)


def test_server_multiplicity_exponent():
    one = SatelliteChain([ChainNode(5.0, n=1)], 1.0)
    two = SatelliteChain([ChainNode(5.0, n=2)], 1.0)
    assert an.chain_aoi_approx(two, 2.0) == pytest.approx(1 / 9 + 1 / 2)
    assert an.chain_aoi_approx(one, 2.0) != an.chain_aoi_approx(two, 2.0)


@pytest.mark.parametrize("k", [1, 2, 4])
def test_upper_dominates_approx_grid(k):
    rng = np.random.default_rng(k)
    for _ in range(100):
        nodes = [ChainNode(rng.uniform(0.5, 5), rng.uniform(0, 0.3), rng.uniform(0, 0.5), rng.uniform(0, 1),
                           int(rng.integers(1, 3))) for _ in range(k)]
        ch = SatelliteChain(nodes, rng.uniform(0.05, 1))
        cap = min(an.node_response_rate(ch, j, 0.0) / an.chain_success_probability(ch, j) for j in range(1, k + 1))
        if cap <= 0:
            continue
        xi = rng.uniform(0.01, 0.99) * cap
        assert an.chain_aoi_upper(ch, xi) >= an.chain_aoi_approx(ch, xi)

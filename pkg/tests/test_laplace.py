import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from noma_mmwave.errors import DomainError, ValidationError
from noma_mmwave.laplace import (
    MAX_ORDER, InterferenceSpec, closed_form_alpha2, complete_bell, exponent_g,
    exponent_g_derivative, integrate_real_line, kernel_integral, laplace_with_derivatives,
    paper_derivative_formula,
)
from noma_mmwave.scenario import LinkState, Placement, RoadAxis, placement_from_cartesian

from oracles import g_mp, richardson_derivative, sample_line_interference

D1 = placement_from_cartesian(100.0, 10.0)


def make_spec(c=10.0, lam=0.01, p=1.0, alpha=2.0, axis=RoadAxis.X, lanes=(0.0,), upsilon=1.0):
    """Receiver at perpendicular distance ``c`` from the chosen road."""
    rx = Placement(c, math.pi / 2) if axis is RoadAxis.X else Placement(c, 0.0)
    return InterferenceSpec(axis, LinkState.LOS, rx, lam, p, alpha, lanes, upsilon)


# Frozen from the mpmath oracle (40 digits, Richardson-extrapolated central
# differences of the high-precision integral); density 0.01.
FROZEN = {
    (4.0, 10.0, 250.0): {
        "g": [-0.0038668144455870109, -1.5231185314512814e-5, 1.8522859570556735e-9,
              -4.2648092777324965e-13, 1.4158627626609236e-16],
        "L": [0.99614065205443424, -1.5172402870760717e-5, 2.0762310208437131e-9,
              -5.1266570645963822e-13, 1.7979789399029805e-16],
    },
    (2.0, 10.0, 250.0): {
        "g": [-0.41981297709067849, -0.001079519083947459, 2.2275790621138043e-6,
              -1.2484234304154288e-8, 1.1015500856606724e-10],
        "L": [0.65716971411452554, -0.00070942724777892612, 2.229737748066505e-6,
              -1.3771915706326365e-8, 1.2872830062900407e-10],
    },
    (3.0, 5.0, 40.0): {
        "g": [-0.027149578943796064, -0.00058082671369637653, 3.9705740533045234e-6,
              -5.512276866341561e-8, 1.1203504454292614e-9],
        "L": [0.97321565806627894, -0.00056526965239249328, 4.1925485547390792e-6,
              -6.0570375808083076e-8, 1.2689416467110922e-9],
    },
}


def test_zero_intensity_is_identity():
    spec = make_spec(lam=0.0)
    for s in (1e-3, 1.0, 1e6):
        assert exponent_g(spec, s) == 0.0
        for j in range(1, 5):
            assert exponent_g_derivative(spec, s, j) == 0.0
        assert laplace_with_derivatives(spec, s, 4).values == (1.0, 0.0, 0.0, 0.0, 0.0)


def test_alpha2_closed_form_values():
    spec = make_spec(c=10.0, lam=0.01, p=0.5)
    s = 300.0
    assert exponent_g(spec, s) == pytest.approx(-0.5 * 0.01 * math.pi * s / math.sqrt(100 + s), rel=1e-15)
    on_road = make_spec(c=0.0, lam=0.01, p=0.5)
    assert exponent_g(on_road, s) == pytest.approx(-0.5 * 0.01 * math.pi * math.sqrt(s), rel=1e-15)


def test_first_derivative_closed_form_bracket():
    # the bracket printed for the first derivative: -K[(c^2+s)^-1/2 - (s/2)(c^2+s)^-3/2]
    c, s, lam = 10.0, 250.0, 0.01
    k = lam * math.pi
    bracket = -k * ((c * c + s) ** -0.5 - 0.5 * s * (c * c + s) ** -1.5)
    assert exponent_g_derivative(make_spec(c=c, lam=lam), s, 1) == pytest.approx(bracket, rel=1e-14)


@pytest.mark.parametrize("c", [0.0, 1.0, 10.0, 100.0])
@pytest.mark.parametrize("order", [0, 1, 2, 3, 4])
def test_quadrature_matches_closed_form(c, order):
    spec = make_spec(c=c, lam=0.02)
    for s in np.logspace(-3, 3, 25):
        closed = (exponent_g(spec, s, "closed") if order == 0
                  else exponent_g_derivative(spec, s, order, "closed"))
        quad = (exponent_g(spec, s, "quadrature") if order == 0
                else exponent_g_derivative(spec, s, order, "quadrature"))
        assert quad == pytest.approx(closed, rel=1e-10)


@pytest.mark.parametrize("key", sorted(FROZEN))
def test_exponent_derivatives_against_oracle(key):
    alpha, c, s = key
    spec = make_spec(c=c, lam=0.01, alpha=alpha)
    ref = FROZEN[key]["g"]
    assert exponent_g(spec, s) == pytest.approx(ref[0], rel=1e-10)
    for j in range(1, 5):
        assert exponent_g_derivative(spec, s, j) == pytest.approx(ref[j], rel=1e-7)


def test_alpha2_first_derivative_vs_live_finite_difference():
    spec = make_spec(c=10.0, lam=0.01)
    f = lambda x: g_mp(x, 10, 2, mp.mpf("0.01"))
    for s in (0.5, 20.0, 4000.0):
        fd = float(richardson_derivative(f, s, 1, s / 8))
        assert exponent_g_derivative(spec, s, 1) == pytest.approx(fd, rel=1e-7)


def test_alpha4_second_derivative_vs_live_finite_difference():
    spec = make_spec(c=3.0, lam=0.01, alpha=4.0)
    f = lambda x: g_mp(x, 3, 4, mp.mpf("0.01"))
    for s in (2.0, 150.0):
        fd = float(richardson_derivative(f, s, 2, s / 8))
        assert exponent_g_derivative(spec, s, 2) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("key", sorted(FROZEN))
def test_transform_derivatives_against_oracle(key):
    alpha, c, s = key
    ev = laplace_with_derivatives(make_spec(c=c, lam=0.01, alpha=alpha), s, 4)
    for n, ref in enumerate(FROZEN[key]["L"]):
        assert ev[n] == pytest.approx(ref, rel=1e-6)


def test_low_orders():
    spec = make_spec(c=10.0, lam=0.01)
    s = 250.0
    g0 = exponent_g(spec, s)
    g1 = exponent_g_derivative(spec, s, 1)
    g2 = exponent_g_derivative(spec, s, 2)
    assert laplace_with_derivatives(spec, s, 0).values == (math.exp(g0),)
    ev = laplace_with_derivatives(spec, s, 2)
    assert ev[1] == pytest.approx(g1 * math.exp(g0), rel=1e-15)
    assert ev[2] == pytest.approx((g2 + g1 * g1) * math.exp(g0), rel=1e-14)


def test_shortcut_formula_agrees_only_up_to_first_order():
    spec = make_spec(c=10.0, lam=0.01)
    s = 250.0
    exact = laplace_with_derivatives(spec, s, 2)
    assert paper_derivative_formula(spec, s, 0) == exact[0]
    assert paper_derivative_formula(spec, s, 1) == pytest.approx(exact[1], rel=1e-15)
    gap = exact[2] - paper_derivative_formula(spec, s, 2)
    expected_gap = math.exp(exponent_g(spec, s)) * exponent_g_derivative(spec, s, 2)
    assert gap == pytest.approx(expected_gap, rel=1e-12)
    assert abs(gap) > 1e-3 * abs(exact[2])

    empty = make_spec(lam=0.0)
    for n in range(4):
        assert paper_derivative_formula(empty, s, n) == laplace_with_derivatives(empty, s, 3)[n]


def test_complete_bell_polynomials():
    x1, x2, x3, x4 = 0.3, -1.7, 2.5, 0.9
    b = complete_bell([x1, x2, x3, x4])
    assert b[0] == 1.0
    assert b[1] == pytest.approx(x1)
    assert b[2] == pytest.approx(x1**2 + x2)
    assert b[3] == pytest.approx(x1**3 + 3 * x1 * x2 + x3)
    assert b[4] == pytest.approx(x1**4 + 6 * x1**2 * x2 + 4 * x1 * x3 + 3 * x2**2 + x4)
    # B_n(1, ..., 1) are the Bell numbers
    assert complete_bell([1.0] * 8) == [1, 1, 2, 5, 15, 52, 203, 877, 4140]


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 1e4), st.sampled_from([0.0, 1.0, 10.0, 100.0]),
       st.sampled_from([2.0, 3.0, 4.0]), st.floats(1e-4, 0.05), st.floats(0.05, 1.0))
def test_complete_monotonicity(s, c, alpha, lam, p):
    ev = laplace_with_derivatives(make_spec(c=c, lam=lam, p=p, alpha=alpha), s, 6)
    assert 0.0 < ev[0] <= 1.0
    for n, v in enumerate(ev.values):
        assert (-1) ** n * v >= 0.0


@pytest.mark.parametrize("alpha", [2.0, 4.0])
def test_transform_decreasing_and_tends_to_one(alpha):
    spec = make_spec(c=10.0, lam=0.01, alpha=alpha)
    grid = np.logspace(-8, 4, 40)
    vals = [math.exp(exponent_g(spec, s)) for s in grid]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[0] == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("alpha", [2.0, 3.0, 4.0])
def test_identical_lanes_add_intensity(alpha):
    s = 123.0
    stacked = make_spec(lam=0.01, alpha=alpha, lanes=(0.0, 0.0, 0.0))
    single = make_spec(lam=0.03, alpha=alpha)
    assert exponent_g(stacked, s) == pytest.approx(exponent_g(single, s), rel=1e-12)
    for j in range(1, 4):
        assert exponent_g_derivative(stacked, s, j) == pytest.approx(
            exponent_g_derivative(single, s, j), rel=1e-12)


def test_lane_offset_shifts_perpendicular_distance():
    rx = placement_from_cartesian(50.0, 10.0)
    shifted = InterferenceSpec(RoadAxis.X, LinkState.LOS, rx, 0.01, 1.0, 2.0, (3.5,))
    assert exponent_g(shifted, 77.0) == pytest.approx(-0.01 * math.pi * 77.0 / math.sqrt(6.5**2 + 77.0))


def test_multi_spec_sum():
    a, b = make_spec(c=10.0, lam=0.01), make_spec(c=10.0, lam=0.02, alpha=4.0)
    s = 40.0
    joint = laplace_with_derivatives([a, b], s, 3)
    la, lb = laplace_with_derivatives(a, s, 3), laplace_with_derivatives(b, s, 3)
    # Leibniz rule for the product of the two transforms
    for n in range(4):
        leib = sum(math.comb(n, k) * la[k] * lb[n - k] for k in range(n + 1))
        assert joint[n] == pytest.approx(leib, rel=1e-12)


def test_upsilon_scaling():
    base = make_spec(c=10.0, lam=0.01, alpha=4.0)
    scaled = make_spec(c=10.0, lam=0.01, alpha=4.0, upsilon=2.5e-3)
    s = 8e4
    assert exponent_g(scaled, s) == pytest.approx(exponent_g(base, 2.5e-3 * s), rel=1e-12)
    assert exponent_g_derivative(scaled, s, 2) == pytest.approx(
        2.5e-3**2 * exponent_g_derivative(base, 2.5e-3 * s, 2), rel=1e-12)


@pytest.mark.parametrize("a", [0.0, -37.0, 1e3])
@pytest.mark.parametrize("c", [0.0, 1.0, 10.0, 100.0])
def test_arctan_integral_identity(a, c):
    for s in (1e-3, 1.0, 1e3):
        val = integrate_real_line(lambda x: 1.0 / (s + c * c + (x - a) ** 2), center=a,
                                  scale=math.sqrt(s + c * c) * 3.0)
        assert val == pytest.approx(math.pi / math.sqrt(c * c + s), rel=1e-10)


def test_kernel_integral_alpha2_reference():
    assert kernel_integral(10.0, 300.0, 2.0) == pytest.approx(math.pi * closed_form_alpha2(10.0, 300.0), rel=1e-12)


def test_errors():
    spec = make_spec()
    with pytest.raises(ValidationError):
        exponent_g(spec, 0.0)
    with pytest.raises(ValidationError):
        exponent_g(spec, -1.0)
    with pytest.raises(ValidationError):
        laplace_with_derivatives(spec, 1.0, MAX_ORDER + 1)
    with pytest.raises(ValidationError):
        exponent_g_derivative(spec, 1.0, 0)
    with pytest.raises(DomainError):
        exponent_g(make_spec(alpha=1.5), 1.0)
    # an empty population converges for any exponent
    assert exponent_g(make_spec(alpha=1.5, lam=0.0), 1.0) == 0.0
    with pytest.raises(ValueError):
        exponent_g(make_spec(alpha=4.0), 1.0, "closed")


def test_laplace_matches_simulated_interference():
    rng = np.random.default_rng(20261017)
    c, lam, p, s = 10.0, 0.01, 0.6, 100.0
    draws = sample_line_interference(rng, 100_000, lam * p, c, 2.0, 1e4)
    samples = np.exp(-s * draws)
    mean, se = samples.mean(), samples.std(ddof=1) / math.sqrt(len(samples))
    analytic = laplace_with_derivatives(make_spec(c=c, lam=lam, p=p), s, 0)[0]
    assert abs(mean - analytic) <= 3 * se

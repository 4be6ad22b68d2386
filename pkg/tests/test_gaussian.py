"""Gaussian averaging engine and heat coefficients.

Oracles:
  * Bernoulli numbers and the log(sinh x / x) series are checked
    against hand-expanded rationals.
  * Wick moments are checked against direct Gauss-Hermite quadrature
    of the defining integral.
  * Sphere/hyperbolic scalar coefficients are checked against the
    short-time expansion of the spectral sum, worked out analytically
    through Hurwitz zeta values: on the unit 2-sphere (4 pi t) U(t) =
    1 + t/3 + t^2/15 + 4 t^3/315 + t^4/315 + 4 t^5/3465 + ..., and the
    hyperbolic plane flips the sign of every odd power.
  * The k = 2 coefficient on the unit 4-sphere follows from the
    standard curvature-invariant formula (|Riem|^2 - |Ric|^2)/180
    + R^2/72 = (24 - 36)/180 + 2 = 29/15.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from symkernel import (
    BadParams,
    MomentEngine,
    assemble,
    bernoulli_numbers,
    flat_riemann,
    heat_coefficients,
    hyperbolic_riemann,
    log_sinhc_coefficients,
    product_riemann,
    represent,
    sphere_riemann,
    sphere_weight_spectrum,
)
from symkernel.linalg import hermite_rule

S2_SERIES = [
    Fraction(1),
    Fraction(1, 3),
    Fraction(1, 15),
    Fraction(4, 315),
    Fraction(1, 315),
    Fraction(4, 3465),
]


# ---------------------------------------------------------------------------
# exact series data


def test_bernoulli_numbers():
    expected = [
        Fraction(1),
        Fraction(-1, 2),
        Fraction(1, 6),
        Fraction(0),
        Fraction(-1, 30),
        Fraction(0),
        Fraction(1, 42),
        Fraction(0),
        Fraction(-1, 30),
        Fraction(0),
        Fraction(5, 66),
        Fraction(0),
        Fraction(-691, 2730),
    ]
    assert bernoulli_numbers(13) == expected


def test_log_sinhc_series():
    # ln(sinh x / x) = x^2/6 - x^4/180 + x^6/2835 - x^8/37800 + ...
    assert log_sinhc_coefficients(4) == [
        Fraction(1, 6),
        Fraction(-1, 180),
        Fraction(1, 2835),
        Fraction(-1, 37800),
    ]


# ---------------------------------------------------------------------------
# Wick moments


def test_single_variable_moments():
    eng = MomentEngine([2.0])  # variance 2/lambda = 1
    assert eng.moment(()) == 1.0
    assert eng.moment((0,)) == 0.0
    assert eng.moment((0, 0)) == pytest.approx(1.0)
    assert eng.moment((0, 0, 0, 0)) == pytest.approx(3.0)
    assert eng.moment((0,) * 6) == pytest.approx(15.0)


def test_negative_eigenvalue_moments():
    # a hyperbolic direction has negative variance 2/lambda
    eng = MomentEngine([-1.0])
    assert eng.moment((0, 0)) == pytest.approx(-2.0)
    assert eng.moment((0, 0, 0, 0)) == pytest.approx(12.0)


def test_mixed_moments_factorize():
    eng = MomentEngine([1.0, 4.0])
    assert eng.moment((0, 1)) == 0.0
    assert eng.moment((0, 0, 1, 1)) == pytest.approx(2.0 * 0.5)
    assert eng.moment((0, 0, 0, 1)) == 0.0


@pytest.mark.parametrize("lams", [(1.0,), (0.7, 2.5)])
def test_moments_against_quadrature(lams):
    # direct Gauss-Hermite integration of the defining Gaussian; the
    # rule is exact for polynomials at this node count
    eng = MomentEngine(list(lams))
    nodes, weights = hermite_rule(32)
    p = len(lams)
    max_deg = 6
    for degs in np.ndindex(*((max_deg + 1,) * p)):
        if sum(degs) > max_deg:
            continue
        direct = 1.0
        for lam, d in zip(lams, degs):
            scale = math.sqrt(2.0 / lam)  # node variance is 2
            direct *= float(np.sum(weights * (nodes * scale / math.sqrt(2.0)) ** d))
        indices = tuple(
            i for i, d in enumerate(degs) for _ in range(d)
        )
        got = eng.moment(indices)
        if abs(direct) > 1e-12:
            assert got == pytest.approx(direct, rel=1e-8), degs
        else:
            assert abs(got) < 1e-12, degs


# ---------------------------------------------------------------------------
# heat coefficients: exact rank-one values


def test_sphere_scalar_series_exact():
    alg = assemble(sphere_riemann(2, 1.0))
    exp = heat_coefficients(alg, represent(alg, "scalar"), order=5)
    for k, target in enumerate(S2_SERIES):
        got = exp.coefficients[k][0, 0]
        assert got == pytest.approx(float(target), abs=1e-12), k


def test_hyperbolic_alternates_signs():
    hyp = assemble(hyperbolic_riemann(2, 1.0))
    exp = heat_coefficients(hyp, represent(hyp, "scalar"), order=5)
    for k, target in enumerate(S2_SERIES):
        got = exp.coefficients[k][0, 0]
        assert got == pytest.approx(float(target) * (-1) ** k, abs=1e-12), k


def test_radius_scaling():
    # a_k scales as r^(-2k)
    r = 2.0
    alg = assemble(sphere_riemann(2, r))
    exp = heat_coefficients(alg, represent(alg, "scalar"), order=3)
    for k, target in enumerate(S2_SERIES[:4]):
        got = exp.coefficients[k][0, 0]
        assert got == pytest.approx(float(target) / r ** (2 * k), abs=1e-13), k


def test_s4_scalar_second_coefficient(s4):
    exp = heat_coefficients(s4, represent(s4, "scalar"), order=2)
    assert exp.coefficients[2][0, 0] == pytest.approx(29.0 / 15.0, abs=1e-11)


def test_weight_series_from_exact_diagonal(s2):
    # the charge-1/2 coefficients have no tidy closed form to freeze, so
    # Richardson-extrapolate the exact mode sum for the linear and
    # quadratic terms of (4 pi t) U(t) and hold the engine to those
    rep = represent(s2, "weight(1/2)")
    exp = heat_coefficients(s2, rep, order=2)
    a1 = exp.coefficients[1][0, 0].real
    a2 = exp.coefficients[2][0, 0].real

    def f(t):
        return 4.0 * math.pi * t * sphere_weight_spectrum(1.0, 0.5, t, tol=1e-15)

    # two-point Richardson in t for the linear and quadratic terms
    t0 = 1e-3
    g = lambda t: (f(t) - 1.0) / t
    a1_est = 2.0 * g(t0 / 2) - g(t0)
    h = lambda t: (f(t) - 1.0 - a1 * t) / t**2
    a2_est = 2.0 * h(t0 / 2) - h(t0)
    assert a1 == pytest.approx(a1_est, abs=5e-6)
    assert a2 == pytest.approx(a2_est, abs=5e-3)


# ---------------------------------------------------------------------------
# a1 = R/6 across fibers


@pytest.mark.parametrize("fiber", ["scalar", "vector", "spinor"])
def test_first_coefficient_is_scalar_curvature_over_six(fiber, catalog):
    for name, alg in catalog.items():
        if fiber == "spinor" and alg.dim % 2:
            continue
        rep = represent(alg, fiber)
        exp = heat_coefficients(alg, rep, order=1)
        eye = np.eye(rep.dim)
        assert np.max(np.abs(exp.coefficients[0] - eye)) < 1e-12, (name, fiber)
        target = alg.scalar_curvature / 6.0 * eye
        assert np.max(np.abs(exp.coefficients[1] - target)) < 1e-10, (name, fiber)


# ---------------------------------------------------------------------------
# flat space and the abelian field


def test_flat_space_is_free():
    alg = assemble(flat_riemann(3))
    exp = heat_coefficients(alg, represent(alg, "scalar"), order=4)
    assert exp.coefficients[0][0, 0] == pytest.approx(1.0, abs=1e-15)
    for k in range(1, 5):
        assert abs(exp.coefficients[k][0, 0]) < 1e-15


def test_flat_field_series():
    # one magnetic block of strength b multiplies the kernel by
    # (tb)/sin(tb) = 1 + (tb)^2/6 + 7 (tb)^4/360 + ...
    alg = assemble(flat_riemann(2))
    b = 0.3
    field = np.array([[0.0, b], [-b, 0.0]])
    exp = heat_coefficients(alg, represent(alg, "scalar"), order=4, field=field)
    assert abs(exp.coefficients[1][0, 0]) < 1e-15
    assert exp.coefficients[2][0, 0] == pytest.approx(b**2 / 6.0, abs=1e-14)
    assert abs(exp.coefficients[3][0, 0]) < 1e-15
    assert exp.coefficients[4][0, 0] == pytest.approx(
        7.0 * b**4 / 360.0, abs=1e-14
    )


def test_product_coefficients_multiply():
    # U factorizes over product factors, so the t^2 slot is
    # a2 + a2' + a1 a1'
    prod = assemble(
        product_riemann([sphere_riemann(2, 1.0), hyperbolic_riemann(2, 1.0)])
    )
    exp = heat_coefficients(prod, represent(prod, "scalar"), order=2)
    a1 = float(S2_SERIES[1])
    a2 = float(S2_SERIES[2])
    assert exp.coefficients[1][0, 0] == pytest.approx(0.0, abs=1e-12)
    assert exp.coefficients[2][0, 0] == pytest.approx(
        a2 + a2 - a1 * a1, abs=1e-11
    )


# ---------------------------------------------------------------------------
# guard rails


def test_order_cap():
    alg = assemble(sphere_riemann(2, 1.0))
    with pytest.raises(BadParams):
        heat_coefficients(alg, represent(alg, "scalar"), order=7)
    with pytest.raises(BadParams):
        heat_coefficients(alg, represent(alg, "scalar"), order=-1)


def test_traces_scale_with_fiber_dimension(s4):
    rep = represent(s4, "vector")
    exp = heat_coefficients(s4, rep, order=1)
    tr = exp.traces()
    assert tr[0] == pytest.approx(4.0)
    assert tr[1].real == pytest.approx(4.0 * 12.0 / 6.0, rel=1e-12)


def test_coefficients_are_hermitian(s2):
    rep = represent(s2, "spinor*weight(1/2)")
    exp = heat_coefficients(s2, rep, order=3)
    for mat in exp.coefficients:
        assert np.max(np.abs(mat - mat.conj().T)) < 1e-12

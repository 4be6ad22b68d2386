"""Exact heat kernel diagonals and spectral cross-checks.

Every numerical route is held against an independent oracle:
  * the spherical-harmonic sum with multiplicities 2l + 1,
  * the hyperbolic Plancherel integral plus bound Landau levels,
  * closed forms where they exist (flat space, odd hyperbolic space,
    magnetic factors, product factorization).
"""

import math

import numpy as np
import pytest

from symkernel import (
    BadParams,
    MixedContourUnsupported,
    NotCompact,
    PoleHit,
    QuadratureNotConverged,
    TailTooLarge,
    Unsupported,
    assemble,
    diagonal,
    flat_riemann,
    heat_trace,
    hyperbolic_riemann,
    hyperbolic_weight_plancherel,
    product_riemann,
    represent,
    sphere_harmonic_oracle,
    sphere_riemann,
    sphere_weight_spectrum,
)

TS = (0.1, 0.25, 0.5, 1.0, 2.0)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


# ---------------------------------------------------------------------------
# the spectral oracles themselves


def test_harmonic_oracle_large_time_limit():
    # only l = 0 and l = 1 survive: U -> (1 + 3 e^{-2 tau}) / (4 pi r^2)
    for r in (1.0, 2.0):
        tau = 12.0
        got = sphere_harmonic_oracle(r, tau * r**2)
        want = (1.0 + 3.0 * math.exp(-2.0 * tau)) / (4.0 * math.pi * r**2)
        assert rel(got, want) < 1e-12


def test_weight_spectrum_matches_harmonics_at_zero_charge():
    # same series, independent stopping rules and summation order
    for t in TS:
        assert rel(
            sphere_weight_spectrum(1.0, 0, t), sphere_harmonic_oracle(1.0, t)
        ) < 1e-13


def test_weight_spectrum_lowest_level():
    # the bottom level l = |alpha| has eigenvalue alpha and multiplicity
    # 2 alpha + 1; at large t everything above it is dead
    t = 40.0
    for alpha in (0.5, 1.0, 1.5):
        got = sphere_weight_spectrum(1.0, alpha, t)
        want = (2.0 * alpha + 1.0) * math.exp(-alpha * t) / (4.0 * math.pi)
        assert rel(got, want) < 1e-12


def test_weight_spectrum_survives_large_charge_and_time():
    # exponent bookkeeping must not overflow even when alpha^2 t is huge
    val = sphere_weight_spectrum(1.0, 3.5, 60.0, tol=1e-12)
    want = 8.0 * math.exp(-3.5 * 60.0) / (4.0 * math.pi)
    assert val == pytest.approx(want, rel=1e-10)


def test_weight_spectrum_level_cap():
    with pytest.raises(TailTooLarge):
        sphere_weight_spectrum(1.0, 0, 1e-3, max_levels=10)


def test_plancherel_zero_charge_closed_form():
    # scalar hyperbolic plane: U = e^{-tau/4}/(4 pi a^2) *
    # integral of nu tanh(pi nu) e^{-nu^2 tau} d nu, checked against
    # brute-force quadrature on a fine grid
    a, t = 1.0, 0.7
    tau = t / a**2
    nu = np.linspace(0.0, 40.0, 400001)
    dens = nu * np.tanh(math.pi * nu)
    integral = np.trapezoid(dens * np.exp(-(nu**2) * tau), nu)
    want = math.exp(-0.25 * tau) / (4.0 * math.pi * a**2) * 2.0 * integral
    got = hyperbolic_weight_plancherel(a, 0, t)
    assert rel(got, want) < 1e-10


def test_plancherel_landau_levels_dominate():
    # charge 3/2 binds one discrete level at eigenvalue 3/2 with weight
    # 2(alpha - 1/2)/(4 pi a^2); the continuum edge sits at 1/4 + alpha^2
    # = 5/2, so by t = 20 the bound state is all that is left
    t = 20.0
    got = hyperbolic_weight_plancherel(1.0, 1.5, t)
    want = 2.0 * (1.5 - 0.5) / (4.0 * math.pi) * math.exp(-1.5 * t)
    assert rel(got, want) < 1e-9


# ---------------------------------------------------------------------------
# contour route against the oracles


@pytest.mark.parametrize("alpha", [0, 0.5, 1, 1.5])
def test_sphere_contour_matches_mode_sum(s2, alpha):
    rep = represent(s2, f"weight({alpha})" if alpha else "scalar")
    res = diagonal(s2, rep, list(TS))
    for t, v in zip(res.ts, res.values):
        assert rel(v, sphere_weight_spectrum(1.0, alpha, t)) < 1e-8, (alpha, t)


@pytest.mark.parametrize("alpha", [0, 0.5, 1, 2.5])
def test_hyperbolic_contour_matches_plancherel(h2, alpha):
    rep = represent(h2, f"weight({alpha})" if alpha else "scalar")
    res = diagonal(h2, rep, list(TS))
    for t, v in zip(res.ts, res.values):
        assert rel(v, hyperbolic_weight_plancherel(1.0, alpha, t)) < 1e-8


def test_radius_scaling(s2):
    # U_r(t) = U_1(t / r^2) / r^2
    r = 3.0
    big = assemble(sphere_riemann(2, r))
    res_big = diagonal(big, represent(big, "scalar"), [1.8])
    res_unit = diagonal(s2, represent(s2, "scalar"), [1.8 / r**2])
    assert rel(res_big.values[0], res_unit.values[0] / r**2) < 1e-13


def test_spectral_method_agrees_with_contour(s2, h2):
    for alg, rep_spec in [(s2, "spinor"), (s2, "vector"), (h2, "scalar")]:
        rep = represent(alg, rep_spec)
        a = diagonal(alg, rep, [0.3, 1.0], method="contour")
        b = diagonal(alg, rep, [0.3, 1.0], method="spectral")
        for x, y in zip(a.values, b.values):
            assert rel(x, y) < 1e-10


def test_spinor_diagonal_is_weight_half_pair(s2):
    # the half-spin bundle splits into charges +-1/2, so the fiber trace
    # is twice the charge-1/2 value
    res = diagonal(s2, represent(s2, "spinor"), [0.4])
    assert rel(res.values[0], 2.0 * sphere_weight_spectrum(1.0, 0.5, 0.4)) < 1e-9


# ---------------------------------------------------------------------------
# closed forms


def test_flat_space_exact():
    alg = assemble(flat_riemann(3))
    res = diagonal(alg, represent(alg, "scalar"), list(TS))
    for t, v in zip(res.ts, res.values):
        assert rel(v, (4.0 * math.pi * t) ** -1.5) < 1e-15


def test_odd_hyperbolic_closed_form(h3):
    # H^3 scalar: U = (4 pi t)^{-3/2} e^{-t/a^2} exactly
    res = diagonal(h3, represent(h3, "scalar"), list(TS))
    for t, v in zip(res.ts, res.values):
        want = (4.0 * math.pi * t) ** -1.5 * math.exp(-t)
        assert rel(v, want) < 1e-13


def test_product_factorizes(s2, h2, s2xh2):
    t = 0.8
    lhs = diagonal(s2xh2, represent(s2xh2, "scalar"), [t]).values[0]
    rhs = (
        diagonal(s2, represent(s2, "scalar"), [t]).values[0]
        * diagonal(h2, represent(h2, "scalar"), [t]).values[0]
    )
    assert rel(lhs, rhs) < 1e-12


def test_magnetic_factor():
    # S2 x R2 with field strength b on the flat block multiplies the
    # free kernel by (tb)/sin(tb)
    prod = assemble(product_riemann([sphere_riemann(2, 1.0), flat_riemann(2)]))
    b = 0.4
    field = np.zeros((4, 4))
    field[2, 3], field[3, 2] = b, -b
    rep = represent(prod, "scalar")
    t = 1.1
    got = diagonal(prod, rep, [t], field=field).values[0]
    sphere = sphere_harmonic_oracle(1.0, t)
    want = sphere / (4.0 * math.pi * t) * (t * b) / math.sin(t * b)
    assert rel(got, want) < 1e-10


def test_magnetic_resonance_raises():
    prod = assemble(product_riemann([sphere_riemann(2, 1.0), flat_riemann(2)]))
    field = np.zeros((4, 4))
    field[2, 3], field[3, 2] = 1.0, -1.0
    with pytest.raises(PoleHit):
        diagonal(prod, represent(prod, "scalar"), [math.pi], field=field)


# ---------------------------------------------------------------------------
# integrated trace


def test_heat_trace_counts_states(s2, sphere_area):
    # vol * U -> sum over multiplicities: 1 + 3 e^{-2t} + 5 e^{-6t} + ...
    res = heat_trace(s2, represent(s2, "scalar"), [4.0], volume=sphere_area)
    want = sum((2 * l + 1) * math.exp(-l * (l + 1) * 4.0) for l in range(8))
    assert rel(res.values[0], want) < 1e-11


def test_heat_trace_rejects_noncompact(h2, sphere_area):
    with pytest.raises(NotCompact):
        heat_trace(h2, represent(h2, "scalar"), [1.0], volume=sphere_area)


# ---------------------------------------------------------------------------
# guard rails


def test_rank_two_compact_unsupported(s3):
    with pytest.raises(MixedContourUnsupported):
        diagonal(s3, represent(s3, "scalar"), [1.0])


def test_spectral_method_needs_rank_one_factors(s4):
    with pytest.raises((Unsupported, MixedContourUnsupported)):
        diagonal(s4, represent(s4, "scalar"), [1.0], method="spectral")


def test_time_must_be_positive(s2):
    with pytest.raises(BadParams):
        diagonal(s2, represent(s2, "scalar"), [0.0])


def test_unreachable_tolerance_raises(s2):
    with pytest.raises(QuadratureNotConverged):
        diagonal(s2, represent(s2, "scalar"), [0.5], tol_quad=1e-30)


def test_bad_method_name(s2):
    with pytest.raises(BadParams):
        diagonal(s2, represent(s2, "scalar"), [0.5], method="magic")


def test_result_metadata(s2):
    res = diagonal(s2, represent(s2, "scalar"), [0.5, 1.0])
    assert res.method == "contour"
    assert len(res.values) == len(res.est_errors) == len(res.nodes) == 2
    assert all(e >= 0 for e in res.est_errors)
    assert all(n > 0 for n in res.nodes)

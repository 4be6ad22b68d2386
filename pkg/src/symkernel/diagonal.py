"""Exact heat kernel diagonals on rank-one and product symmetric spaces.

The diagonal at time t is a Gaussian average of trigonometric kernels
over the holonomy directions. Compact rank-one factors produce an
integrand with real poles which is handled by exact pole subtraction:
the subtracted principal-value pieces have a closed form in the Dawson
function, and what remains is analytic and converges spectrally under
Gauss-Hermite quadrature. Noncompact factors rotate onto the real sinh
form and need no subtraction. Spectral sums (sphere harmonics and the
hyperbolic Plancherel formula with its discrete levels) provide fully
independent cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import dawsn

from .errors import (
    BadParams,
    MixedContourUnsupported,
    NotCompact,
    PoleHit,
    QuadratureNotConverged,
    TailTooLarge,
    Unsupported,
)
from .linalg import hermite_rule, legendre_rule, ordered_map, pairwise_sum

DEFAULT_TOL_QUAD = 1e-12
_HERMITE_START = 64
_HERMITE_CAP = 2**14
_AXIS_SCHEDULE = (16, 24, 32, 48, 64, 96)
_POLE_MARGIN = 6.0
_WEIGHT_TOL = 1e-8


# ---------------------------------------------------------------------------
# raw integrands (shared by tests and the quadrature cores)


def compact_integrand(x, alpha):
    """x cos(2 alpha x) / sin x, the compact-direction kernel.

    Raises PoleHit when x sits on a nonzero multiple of pi, where the
    kernel has a simple pole.
    """
    x = np.asarray(x, dtype=float)
    near = np.round(x / math.pi)
    dist = np.abs(x - math.pi * near)
    if np.any((np.abs(near) > 0) & (dist < 1e-12 * np.maximum(1.0, np.abs(x)))):
        raise PoleHit("kernel pole at a multiple of pi")
    out = np.where(x == 0.0, 1.0, x * np.cos(2.0 * float(alpha) * x) / np.sin(x))
    return out if out.shape else float(out)


def noncompact_integrand(y, alpha):
    """y cosh(2 alpha y) / sinh y, the noncompact-direction kernel."""
    y = np.asarray(y, dtype=float)
    a2 = 2.0 * float(alpha)
    small = np.abs(y) < 1e-8
    ys = np.where(small, 1.0, y)
    out = np.where(small, np.cosh(a2 * y), ys * np.cosh(a2 * ys) / np.sinh(ys))
    return out if out.shape else float(out)


def _check_half_integer(alpha):
    two = 2.0 * float(alpha)
    if abs(two - round(two)) > _WEIGHT_TOL:
        raise BadParams(f"weight must be integer or half-integer, got {alpha}")
    return round(two) / 2.0


def _u_minus_sin(u):
    """u - sin u, stable for small arguments."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 0.1
    us = np.where(small, u, 0.0)
    u2 = us * us
    series = (
        us**3 / 6.0
        * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0 * (1.0 - u2 / 110.0))))
    )
    return np.where(small, series, u - np.sin(u))


def _subtracted_compact(x, alpha, n_poles):
    """compact_integrand minus its principal parts at x = pi k, |k| <= n_poles.

    The result is analytic on the whole sampled range. alpha must be a
    half-integer, which keeps every residue real: at x = pi k the
    residue is (-1)^k pi k cos(2 pi k alpha).
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    k_near = np.round(x / math.pi).astype(int)
    u = x - math.pi * k_near
    near = (np.abs(u) < 0.5) & (k_near != 0)
    # far points: direct kernel value
    far = ~near
    xf = x[far]
    with np.errstate(invalid="ignore", divide="ignore"):
        val = xf * np.cos(2.0 * alpha * xf) / np.sin(xf)
    val = np.where(xf == 0.0, 1.0, val)
    out[far] = val
    # near points: cancel the pole analytically
    if np.any(near):
        kn = k_near[near]
        un = u[near]
        pk = math.pi * kn
        rho = _residues(np.abs(kn), alpha) * np.sign(kn)  # residue at pi*kn
        # N(u) = u (1 + u/pk) cos(2 a u) - sin u, written without cancellation
        cos_part = un * (1.0 + un / pk) * (-2.0 * np.sin(alpha * un) ** 2)
        n_of_u = cos_part + _u_minus_sin(un) + un * un / pk
        denom = np.where(un == 0.0, 1.0, un * np.sin(un))
        core = np.where(
            un == 0.0,
            1.0 / pk,
            n_of_u / denom,
        )
        out[near] = rho * core
    # subtract the +-k pole pair tails
    ks = np.arange(1, n_poles + 1)
    rhos = _residues(ks, alpha)
    pk = math.pi * ks
    with np.errstate(divide="ignore", invalid="ignore"):
        pair = rhos * 2.0 * pk / (x[:, None] ** 2 - pk**2)
    # the pair containing the nearest pole was already handled for near points
    if np.any(near):
        idx = np.where(near)[0]
        cols = np.abs(k_near[near]) - 1
        xi = x[idx]
        kk = np.abs(k_near[near])
        rho_n = _residues(kk, alpha) * np.sign(k_near[near])
        pair[idx, cols] = 0.0
        # the mirror pole at -pi*kn carries residue -rho_n and stays regular
        out[idx] += rho_n / (xi + math.pi * k_near[near])
    out -= pairwise_sum([pair[:, j] for j in range(n_poles)]) if n_poles else 0.0
    return out


def _residues(k, alpha):
    """Residues of the compact kernel at x = pi k for half-integer alpha.

    With 2 alpha = m an integer, cos(2 pi k alpha) = (-1)^(k m) exactly,
    so the residue is (-1)^(k (m + 1)) pi k.
    """
    k = np.asarray(k)
    m = int(round(2.0 * float(alpha)))
    parity = (k.astype(int) * (m + 1)) % 2
    return np.where(parity == 0, 1.0, -1.0) * math.pi * k.astype(float)


def _pole_count(x_max):
    return max(1, int(math.ceil((x_max + _POLE_MARGIN) / math.pi)))


# ---------------------------------------------------------------------------
# rank-one cores: Gaussian averages of the kernels


def _refine_hermite(evaluate, tol_quad):
    """Node-doubling driver; evaluate(nodes, weights) -> float."""
    prev = None
    n = _HERMITE_START
    while n <= _HERMITE_CAP:
        nodes, weights = hermite_rule(n)
        value = evaluate(nodes, weights)
        if prev is not None:
            err = abs(value - prev) / max(1.0, abs(value))
            if err <= tol_quad:
                return value, err, n
        prev = value
        n *= 2
    raise QuadratureNotConverged(
        f"no convergence to {tol_quad:.1e} within {_HERMITE_CAP} nodes"
    )


def compact_core(tau, alpha, tol_quad=DEFAULT_TOL_QUAD):
    """Gaussian average of the compact kernel at scale tau.

    Computes < f(c w) > with c = sqrt(tau)/2 over the unit Gaussian
    weight, as the subtracted average plus the exact principal values
    of the pole terms (Dawson function closed form). The subtraction
    is exact for every pole count, so the truncation at K poles only
    affects smoothness, never the value.
    """
    if tau <= 0:
        raise BadParams("tau must be positive")
    alpha = _check_half_integer(alpha)
    c = math.sqrt(tau) / 2.0

    def evaluate(nodes, weights):
        x = c * nodes
        n_poles = _pole_count(float(np.max(np.abs(x))))
        smooth = _subtracted_compact(x, alpha, n_poles)
        quad = pairwise_sum(list(weights * smooth))
        ks = np.arange(1, n_poles + 1)
        rhos = _residues(ks, alpha)
        # PV of rho_k/(x - pi k) against the Gaussian: -(rho_k/c) F(pi k / 2c),
        # doubled for the mirror pole at -pi k
        dw = dawsn(math.pi * ks / (2.0 * c))
        tail = 2.0 * pairwise_sum(list(-(rhos / c) * dw))
        return quad + tail

    return _refine_hermite(evaluate, tol_quad)


def noncompact_core(tau, alpha, tol_quad=DEFAULT_TOL_QUAD):
    """Gaussian average of the noncompact kernel at scale tau."""
    if tau <= 0:
        raise BadParams("tau must be positive")
    alpha = _check_half_integer(alpha)
    c = math.sqrt(tau) / 2.0

    def evaluate(nodes, weights):
        vals = noncompact_integrand(c * nodes, alpha)
        return pairwise_sum(list(weights * vals))

    return _refine_hermite(evaluate, tol_quad)


# ---------------------------------------------------------------------------
# closed rank-one diagonals


@dataclass(frozen=True)
class DiagonalResult:
    """Diagonal values with quadrature diagnostics, one entry per time."""

    ts: tuple
    values: tuple
    est_errors: tuple
    nodes: tuple
    method: str
    matrices: tuple = ()


def sphere_weight_diagonal(radius, alpha, ts, tol_quad=DEFAULT_TOL_QUAD):
    """Exact diagonal on the 2-sphere for a charge-alpha fiber weight."""
    alpha = _check_half_integer(alpha)
    ts = _as_times(ts)

    def one(t):
        tau = t / radius**2
        core, err, n = compact_core(tau, alpha, tol_quad)
        val = math.exp((0.25 + alpha**2) * tau) / (4.0 * math.pi * t) * core
        return val, err, n

    rows = ordered_map(one, ts)
    return DiagonalResult(
        ts=tuple(ts),
        values=tuple(r[0] for r in rows),
        est_errors=tuple(r[1] for r in rows),
        nodes=tuple(r[2] for r in rows),
        method="contour",
    )


def hyperbolic_weight_diagonal(radius, alpha, ts, tol_quad=DEFAULT_TOL_QUAD):
    """Exact diagonal on the hyperbolic plane for a charge-alpha weight."""
    alpha = _check_half_integer(alpha)
    ts = _as_times(ts)

    def one(t):
        tau = t / radius**2
        core, err, n = noncompact_core(tau, alpha, tol_quad)
        val = math.exp(-(0.25 + alpha**2) * tau) / (4.0 * math.pi * t) * core
        return val, err, n

    rows = ordered_map(one, ts)
    return DiagonalResult(
        ts=tuple(ts),
        values=tuple(r[0] for r in rows),
        est_errors=tuple(r[1] for r in rows),
        nodes=tuple(r[2] for r in rows),
        method="contour",
    )


def _as_times(ts):
    if np.isscalar(ts):
        ts = [ts]
    ts = [float(t) for t in ts]
    if any(t <= 0 for t in ts):
        raise BadParams("times must be positive")
    return ts


# ---------------------------------------------------------------------------
# spectral oracles


def sphere_weight_spectrum(radius, alpha, t, tol=1e-14, max_levels=10**7):
    """Mode sum for the charge-alpha weight Laplacian on the 2-sphere.

    Levels l = |alpha|, |alpha|+1, ... carry eigenvalue
    (l(l+1) - alpha^2)/r^2 and multiplicity 2l + 1. The tail after the
    cutoff L is bounded by exp(alpha^2 tau) exp(-L(L+1) tau) / tau,
    which is driven below tol * total.
    """
    alpha = abs(_check_half_integer(alpha))
    tau = float(t) / radius**2
    if tau <= 0:
        raise BadParams("t must be positive")
    pref = 1.0 / (4.0 * math.pi * radius**2)
    total = 0.0
    level = alpha
    terms = []
    while True:
        lam = level * (level + 1.0) - alpha**2
        term = (2.0 * level + 1.0) * math.exp(-lam * tau)
        terms.append(term)
        total = total + term
        gap = (level + 1.0) * (level + 2.0) - alpha**2
        tail = math.exp(-gap * tau) / tau
        if tail <= tol * max(total, 1e-300):
            break
        level += 1.0
        if level - alpha > max_levels:
            raise TailTooLarge(
                f"mode sum needs more than {max_levels} levels at t={t}"
            )
    return pref * pairwise_sum(terms)


def sphere_harmonic_oracle(radius, t, tol=1e-14):
    """Plain spherical-harmonic mode sum for the scalar diagonal."""
    tau = float(t) / radius**2
    if tau <= 0:
        raise BadParams("t must be positive")
    total = 0.0
    terms = []
    level = 0
    while True:
        term = (2 * level + 1) * math.exp(-level * (level + 1) * tau)
        terms.append(term)
        total += term
        if level > 0 and term <= tol * total:
            break
        level += 1
        if level > 10**7:
            raise TailTooLarge(f"mode sum needs more than 1e7 levels at t={t}")
    return pairwise_sum(terms) / (4.0 * math.pi * radius**2)


def hyperbolic_weight_plancherel(radius, alpha, t, tol=1e-14):
    """Plancherel route for the hyperbolic plane: continuous plus levels.

    The continuous density at charge alpha splits as |nu| plus an
    exponentially localized remainder (Fermi-type for integer charge,
    Bose-type for half-integer); the |nu| part integrates in closed
    form. Charges above 1/2 additionally bind discrete levels
    lambda_j = ((2j+1)|alpha| - j(j+1))/r^2 with density
    2(|alpha| - 1/2 - j) / (4 pi r^2).
    """
    alpha = abs(_check_half_integer(alpha))
    tau = float(t) / radius**2
    if tau <= 0:
        raise BadParams("t must be positive")
    integer_charge = abs(alpha - round(alpha)) < 1e-12

    def remainder(nu):
        two_pi_nu = 2.0 * math.pi * nu
        if integer_charge:
            return -2.0 * nu / (np.exp(two_pi_nu) + 1.0)
        return 2.0 * nu / np.expm1(two_pi_nu)

    prev = None
    n = 64
    while n <= 4096:
        nodes, weights = legendre_rule(n, 0.0, 9.0)
        vals = remainder(nodes) * np.exp(-(nodes**2) * tau)
        integral = pairwise_sum(list(weights * vals))
        if prev is not None and abs(integral - prev) <= tol * max(1.0, abs(integral)):
            break
        prev = integral
        n *= 2
    else:
        raise QuadratureNotConverged("Plancherel remainder did not settle")
    cont = (
        math.exp(-(0.25 + alpha**2) * tau)
        / (4.0 * math.pi * radius**2)
        * (1.0 / tau + 2.0 * integral)
    )
    discrete = 0.0
    j = 0
    while j < alpha - 0.5:
        lam = ((2 * j + 1) * alpha - j * (j + 1)) / radius**2
        weight = 2.0 * (alpha - 0.5 - j) / (4.0 * math.pi * radius**2)
        discrete += weight * math.exp(-lam * float(t))
        j += 1
    return cont + discrete


# ---------------------------------------------------------------------------
# general product machinery


def _factor_groups(alg):
    """Partition holonomy indices into factors by tangent support overlap.

    Returns a list of (holonomy_indices, tangent_indices) plus the list
    of flat tangent indices belonging to no factor.
    """
    p, n = alg.rank, alg.dim
    supports = []
    for i in range(p):
        rows = np.where(np.any(np.abs(alg.two_forms[i]) > 1e-12, axis=1))[0]
        supports.append(set(rows.tolist()))
    parent = list(range(p))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(p):
        for k in range(i + 1, p):
            if supports[i] & supports[k]:
                ri, rk = find(i), find(k)
                if ri != rk:
                    parent[rk] = ri
    groups = {}
    for i in range(p):
        groups.setdefault(find(i), []).append(i)
    out = []
    covered = set()
    for root in sorted(groups):
        idx = sorted(groups[root])
        tangent = sorted(set().union(*(supports[i] for i in idx)))
        covered.update(tangent)
        out.append((idx, tangent))
    flat = sorted(set(range(n)) - covered)
    return out, flat


def _joint_weight_blocks(mats, dim):
    """Joint eigenspaces of a commuting family of Hermitian matrices.

    Returns a list of (projector, eigenvalue tuple); eigenvalues are
    rounded onto a 1e-8 grid for clustering only, reported unrounded.
    """
    blocks = [(np.eye(dim, dtype=complex), ())]
    for mat in mats:
        refined = []
        for proj, vals in blocks:
            evals, evecs = np.linalg.eigh(proj)
            basis = evecs[:, evals > 0.5]
            if basis.shape[1] == 0:
                continue
            sub = basis.conj().T @ mat @ basis
            sub = 0.5 * (sub + sub.conj().T)
            se, sv = np.linalg.eigh(sub)
            start = 0
            while start < se.size:
                stop = start + 1
                while stop < se.size and se[stop] - se[start] <= _WEIGHT_TOL:
                    stop += 1
                vecs = basis @ sv[:, start:stop]
                refined.append(
                    (vecs @ vecs.conj().T, vals + (float(np.mean(se[start:stop])),))
                )
                start = stop
        blocks = refined
    return blocks


def _flat_field_factor(field, flat_idx, t):
    """(tb/sin tb) product over the field's eigen-pairs on the flat block."""
    if field is None or not flat_idx:
        return 1.0
    sub = field[np.ix_(flat_idx, flat_idx)]
    if not np.any(sub):
        return 1.0
    evals = np.linalg.eigvals(sub)
    bs = np.sort(np.abs(evals.imag))[::-1]
    bs = bs[bs > 1e-14][::2]  # one magnitude per +-ib pair
    out = 1.0
    for b in bs:
        arg = float(t) * b
        s = math.sin(arg)
        if abs(s) < 1e-12 * max(1.0, arg):
            raise PoleHit(f"abelian field resonance at t*b = {arg:.6f}")
        out *= arg / s
    return out


def _multi_noncompact_average(alg, rep, group, tangent, t, tol_quad):
    """Tensor-product Hermite average for an all-noncompact factor.

    The holonomy variables rotate onto the imaginary axis, turning the
    formally negative covariance into a genuine Gaussian; the rotated
    tangent and holonomy matrices have real spectra and sinh-regular
    determinant factors. Returns a fiber matrix.
    """
    idx = list(group)
    pg = len(idx)
    if pg > 3:
        raise Unsupported(f"quadrature supports at most 3 holonomy variables, got {pg}")
    lam = alg.eigenvalues[idx]
    scale = np.sqrt(1.0 / np.abs(lam))
    gens = np.array([alg.generators[i][np.ix_(tangent, tangent)] for i in idx])
    adj = np.transpose(alg.structure, (1, 0, 2))[np.ix_(idx, idx, idx)]
    hol = rep.hol[idx]
    d = rep.dim
    sq = math.sqrt(float(t))

    def node_value(v):
        # v: standardized coordinates, one per holonomy direction
        w = scale * v
        tang = np.einsum("i,iab->ab", w, gens)
        ht = 1j * tang  # Hermitian
        mu = np.linalg.eigvalsh(ht)
        det_t = 1.0
        for m in mu:
            arg = sq * m / 2.0
            det_t *= _sinhc_scalar(arg)
        adjm = np.einsum("i,ijk->jk", w, adj)
        ha = 1j * adjm
        nu = np.linalg.eigvalsh(0.5 * (ha + ha.conj().T))
        det_h = 1.0
        for m in nu:
            det_h *= _sinhc_scalar(sq * m / 2.0)
        pref = det_h**0.5 * det_t**-0.5
        hr = np.einsum("i,ixy->xy", w, hol)
        hh = 1j * hr
        hh = 0.5 * (hh + hh.conj().T)
        he, hv = np.linalg.eigh(hh)
        cosh_mat = (hv * np.cosh(sq * he)) @ hv.conj().T
        return pref * cosh_mat

    prev = None
    for per_axis in _AXIS_SCHEDULE:
        nodes, weights = hermite_rule(per_axis)
        grids = np.meshgrid(*([nodes] * pg), indexing="ij")
        wgrids = np.meshgrid(*([weights] * pg), indexing="ij")
        pts = np.stack([g.reshape(-1) for g in grids], axis=1)
        wts = np.prod(np.stack([g.reshape(-1) for g in wgrids], axis=1), axis=1)
        pieces = [wts[j] * node_value(pts[j]) for j in range(pts.shape[0])]
        total = pairwise_sum(pieces)
        if prev is not None:
            err = float(np.max(np.abs(total - prev))) / max(
                1.0, float(np.max(np.abs(total)))
            )
            if err <= tol_quad:
                return total, err, per_axis
        prev = total
    raise QuadratureNotConverged(
        f"tensor quadrature did not reach {tol_quad:.1e} by {_AXIS_SCHEDULE[-1]} nodes per axis"
    )


def _sinhc_scalar(x):
    if abs(x) < 1e-6:
        return 1.0 + x * x / 6.0
    return math.sinh(x) / x


def diagonal(alg, rep, ts, field=None, tol_quad=DEFAULT_TOL_QUAD,
             method="contour"):
    """Fiber heat kernel diagonal for a curvature algebra and fiber rep.

    Factorizes the space by holonomy support. Rank-one factors must be
    two dimensional and are evaluated by the exact subtracted cores,
    with the fiber split into joint weight eigenspaces; all-noncompact
    higher-rank factors go through tensor-product quadrature. Compact
    higher-rank factors would need a mixed contour and are rejected.
    method "spectral" replaces the quadrature cores by the mode sum or
    Plancherel value per weight; it needs rank-one factors only but
    stays accurate at large times where the averages lose all relative
    precision to cancellation. Returns a DiagonalResult whose matrices
    entries are (d, d) fiber blocks and values their traces.
    """
    if method not in ("contour", "spectral"):
        raise BadParams(f"unknown method {method!r}")
    ts = _as_times(ts)
    groups, flat_idx = _factor_groups(alg)
    d = rep.dim
    rank_one = []
    multi = []
    for idx, tangent in groups:
        lam = alg.eigenvalues[idx]
        if np.any(lam > 0) and np.any(lam < 0):
            raise MixedContourUnsupported(
                "a single factor mixes compact and noncompact directions"
            )
        compact = bool(lam[0] > 0)
        if len(idx) == 1:
            if len(tangent) != 2:
                raise Unsupported(
                    "rank-one factors are only supported on two tangent directions"
                )
            rank_one.append((idx[0], compact))
        else:
            if compact:
                raise MixedContourUnsupported(
                    "compact factors of rank above one need a mixed contour"
                )
            multi.append((idx, tangent))

    # joint weight decomposition across the rank-one factors
    herm = [1j * rep.hol[i] for i, _ in rank_one]
    herm = [0.5 * (m + m.conj().T) for m in herm]
    blocks = _joint_weight_blocks(herm, d) if herm else [(np.eye(d, dtype=complex), ())]
    weights_per_block = []
    for proj, vals in blocks:
        alphas = []
        for (i, _), mu in zip(rank_one, vals):
            lam_i = alg.eigenvalues[i]
            alpha = -mu / lam_i
            alphas.append(_check_half_integer(alpha))
        weights_per_block.append((proj, tuple(alphas)))

    # per-factor scalar curvature pieces for the exponential prefactor
    def factor_scalars(idx, tangent):
        lam = alg.eigenvalues[idx]
        rho = alg.rho[np.ix_(idx, idx)]
        r_g = float(np.sum(np.diag(rho) / lam))
        adj = np.transpose(alg.structure, (1, 0, 2))[np.ix_(idx, idx, idx)]
        rh_g = -0.25 * float(
            np.einsum("i,ijl,ilj->", 1.0 / lam, adj, adj)
        )
        return r_g, rh_g

    if method == "spectral" and multi:
        raise Unsupported("the spectral route needs rank-one factors only")

    cache = {}

    def weight_value(i, compact, alpha, t):
        """One rank-one factor's full diagonal at charge alpha."""
        lam_i = alg.eigenvalues[i]
        key = (i, alpha, t)
        if key in cache:
            return cache[key]
        if method == "spectral":
            radius = 1.0 / math.sqrt(abs(lam_i))
            if compact:
                val = sphere_weight_spectrum(radius, alpha, t, tol=tol_quad)
            else:
                val = hyperbolic_weight_plancherel(radius, alpha, t, tol=tol_quad)
            out = (val, tol_quad, 0)
        else:
            tau = float(t) * abs(lam_i)
            r_g, _ = factor_scalars([i], None)
            if compact:
                core, err, nn = compact_core(tau, alpha, tol_quad)
            else:
                core, err, nn = noncompact_core(tau, alpha, tol_quad)
            pref = (
                math.exp(r_g / 8.0 * t)
                * math.exp(alpha**2 * lam_i * t)
                / (4.0 * math.pi * t)
            )
            out = (pref * core, err, nn)
        cache[key] = out
        return out

    def one_time(t):
        total_err = 0.0
        max_nodes = 0
        mat = np.zeros((d, d), dtype=complex)
        # rank-one part, weight block by weight block
        for proj, alphas in weights_per_block:
            block_val = 1.0
            for (i, compact), alpha in zip(rank_one, alphas):
                val, err, nn = weight_value(i, compact, alpha, t)
                total_err += err
                max_nodes = max(max_nodes, nn)
                block_val *= val
            mat = mat + block_val * proj
        if not rank_one:
            mat = np.eye(d, dtype=complex)
        # higher-rank noncompact factors multiply in as commuting matrices
        for idx, tangent in multi:
            avg, err, nn = _multi_noncompact_average(alg, rep, idx, tangent, t, tol_quad)
            total_err += err
            max_nodes = max(max_nodes, nn)
            r_g, rh_g = factor_scalars(idx, tangent)
            lam = alg.eigenvalues[idx]
            cas = np.zeros((d, d), dtype=complex)
            for pos, i in enumerate(idx):
                cas += rep.hol[i] @ rep.hol[i] / lam[pos]
            ce, cvv = np.linalg.eigh(0.5 * (cas + cas.conj().T))
            expcas = (cvv * np.exp(-ce * t)) @ cvv.conj().T
            mat = math.exp((r_g / 8.0 + rh_g / 6.0) * t) * (expcas @ avg @ mat)
        # flat block and the abelian field
        mat = mat * _flat_field_factor(field, flat_idx, t)
        rest = alg.dim - 2 * len(rank_one)
        mat = mat * (4.0 * math.pi * t) ** (-rest / 2.0)
        return mat, total_err, max_nodes

    rows = ordered_map(one_time, ts)
    return DiagonalResult(
        ts=tuple(ts),
        values=tuple(float(np.trace(r[0]).real) for r in rows),
        est_errors=tuple(r[1] for r in rows),
        nodes=tuple(r[2] for r in rows),
        method=method,
        matrices=tuple(r[0] for r in rows),
    )


def heat_trace(alg, rep, ts, volume, tol_quad=DEFAULT_TOL_QUAD):
    """Integrated heat trace volume * tr U(t) for a compact space."""
    if alg.flat_dim > 0 or np.any(alg.eigenvalues <= 0):
        raise NotCompact("heat trace needs a compact space with no flat directions")
    res = diagonal(alg, rep, ts, field=None, tol_quad=tol_quad)
    return DiagonalResult(
        ts=res.ts,
        values=tuple(volume * v for v in res.values),
        est_errors=res.est_errors,
        nodes=res.nodes,
        method=res.method,
        matrices=tuple(volume * m for m in res.matrices),
    )

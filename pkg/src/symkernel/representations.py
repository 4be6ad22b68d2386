"""Fiber representations of the holonomy algebra.

A fiber representation packages two families of matrices: rotation
generators gauge[a, b] for every tangent index pair, and the induced
holonomy generators hol[i] obtained by contracting with the tangent
action of the holonomy basis. Scalar, vector, spinor, abelian weight,
and tensor-product representations are provided, together with the
consistency checks the heat kernel construction relies on.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    BadAbelianField,
    BadParams,
    RepresentationBroken,
    Unsupported,
)

_PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


@dataclass(frozen=True)
class FiberRep:
    """Representation data attached to a curvature algebra.

    gauge has shape (n, n, d, d) with gauge[a, b] = -gauge[b, a]; hol
    has shape (p, d, d) and satisfies the same commutation relations as
    the tangent generators of the algebra. alpha is the abelian charge
    for weight representations, None otherwise. parts keeps the factors
    of a tensor product, gammas the Clifford matrices of a spinor.
    """

    name: str
    dim: int
    gauge: np.ndarray
    hol: np.ndarray
    alpha: Fraction | None = None
    parts: tuple = ()
    gammas: np.ndarray | None = None

    def __post_init__(self):
        for attr in ("gauge", "hol", "gammas"):
            arr = getattr(self, attr)
            if arr is None:
                continue
            arr = np.ascontiguousarray(np.asarray(arr, dtype=complex))
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)


def holonomy_from_gauge(alg, gauge):
    """Holonomy generators induced by rotation generators.

    hol[i] = (1/2) sum_ab (D_i)_ab gauge[a, b].
    """
    return 0.5 * np.einsum("iab,abxy->ixy", alg.generators.astype(complex), gauge)


def vector_so_generators(n):
    """Defining representation of so(n): (X_ab)^c_d = d_ca d_bd - d_cb d_ad."""
    eye = np.eye(n)
    return (
        np.einsum("ca,bd->abcd", eye, eye) - np.einsum("cb,ad->abcd", eye, eye)
    ).astype(complex)


def clifford_gammas(n):
    """Hermitian gamma matrices for even n, built two dimensions at a time.

    Start from the two Pauli matrices sigma_x, sigma_y; each step maps
    the existing set g -> g (x) sigma_z and appends I (x) sigma_x,
    I (x) sigma_y. Satisfies {g_a, g_b} = 2 delta_ab.
    """
    if n < 2 or n % 2:
        raise Unsupported(f"spinor fiber needs even dimension >= 2, got n={n}")
    gammas = [_PAULI["x"], _PAULI["y"]]
    while len(gammas) < n:
        d = gammas[0].shape[0]
        eye = np.eye(d, dtype=complex)
        gammas = [np.kron(g, _PAULI["z"]) for g in gammas]
        gammas.append(np.kron(eye, _PAULI["x"]))
        gammas.append(np.kron(eye, _PAULI["y"]))
    return np.array(gammas)


def spinor_so_generators(gammas):
    """Spin generators Sigma_ab = (1/4)[gamma_a, gamma_b]."""
    n, d = gammas.shape[0], gammas.shape[1]
    sigma = np.zeros((n, n, d, d), dtype=complex)
    for a in range(n):
        for b in range(n):
            sigma[a, b] = 0.25 * (gammas[a] @ gammas[b] - gammas[b] @ gammas[a])
    return sigma


def scalar_rep(alg):
    n, p = alg.dim, alg.rank
    gauge = np.zeros((n, n, 1, 1), dtype=complex)
    hol = np.zeros((p, 1, 1), dtype=complex)
    return FiberRep(name="scalar", dim=1, gauge=gauge, hol=hol)


def vector_rep(alg):
    gauge = vector_so_generators(alg.dim)
    return FiberRep(
        name="vector", dim=alg.dim, gauge=gauge, hol=holonomy_from_gauge(alg, gauge)
    )


def spinor_rep(alg):
    gammas = clifford_gammas(alg.dim)
    gauge = spinor_so_generators(gammas)
    return FiberRep(
        name="spinor",
        dim=gammas.shape[1],
        gauge=gauge,
        hol=holonomy_from_gauge(alg, gauge),
        gammas=gammas,
    )


def weight_rep(alg, alpha):
    """One-dimensional charge-alpha representation of a rank-one holonomy.

    gauge[a, b] = -i alpha E_ab for the single eigen-two-form E, so the
    induced holonomy generator is i alpha lambda. The charge must be an
    integer or half-integer.
    """
    alpha = Fraction(alpha)
    if alpha.denominator not in (1, 2):
        raise BadParams(f"weight charge must be integer or half-integer: {alpha}")
    if alg.rank != 1:
        raise Unsupported(
            f"weight fiber needs a rank-one holonomy, got p={alg.rank}"
        )
    e = alg.two_forms[0]
    gauge = (-1.0j * float(alpha)) * e[:, :, None, None].astype(complex)
    return FiberRep(
        name=f"weight({alpha})",
        dim=1,
        gauge=gauge,
        hol=holonomy_from_gauge(alg, gauge),
        alpha=alpha,
    )


def product_rep(first, second):
    """Tensor product: gauge acts as G1 (x) I + I (x) G2."""
    d1, d2 = first.dim, second.dim
    n = first.gauge.shape[0]
    if second.gauge.shape[0] != n:
        raise BadParams("tensor factors live over different tangent dimensions")
    eye1 = np.eye(d1, dtype=complex)
    eye2 = np.eye(d2, dtype=complex)
    gauge = np.einsum("abxy,uv->abxuyv", first.gauge, eye2).reshape(
        n, n, d1 * d2, d1 * d2
    ) + np.einsum("xy,abuv->abxuyv", eye1, second.gauge).reshape(
        n, n, d1 * d2, d1 * d2
    )
    p = first.hol.shape[0]
    hol = np.einsum("ixy,uv->ixuyv", first.hol, eye2).reshape(
        p, d1 * d2, d1 * d2
    ) + np.einsum("xy,iuv->ixuyv", eye1, second.hol).reshape(p, d1 * d2, d1 * d2)
    parts = (first.parts or (first,)) + (second.parts or (second,))
    return FiberRep(
        name=f"{first.name}*{second.name}",
        dim=d1 * d2,
        gauge=gauge,
        hol=hol,
        parts=parts,
    )


def represent(alg, spec):
    """Build a representation from a spec string.

    Grammar: factors joined by '*', each one of scalar, vector, spinor,
    or weight(q) with q an integer or half-integer (also written
    weight:q). Example: "spinor*weight(1/2)".
    """
    reps = []
    for token in str(spec).split("*"):
        token = token.strip()
        if token == "scalar":
            reps.append(scalar_rep(alg))
        elif token == "vector":
            reps.append(vector_rep(alg))
        elif token == "spinor":
            reps.append(spinor_rep(alg))
        elif token.startswith("weight"):
            arg = token[len("weight"):].strip()
            if arg.startswith("(") and arg.endswith(")"):
                arg = arg[1:-1]
            elif arg.startswith(":"):
                arg = arg[1:]
            else:
                raise BadParams(f"cannot parse weight charge in {token!r}")
            reps.append(weight_rep(alg, Fraction(arg)))
        else:
            raise BadParams(f"unknown fiber spec {token!r}")
    out = reps[0]
    for r in reps[1:]:
        out = product_rep(out, r)
    return out


# ---------------------------------------------------------------------------
# interchange


def _complex_pairs(arr):
    arr = np.asarray(arr, dtype=complex)
    out = np.empty(arr.shape + (2,), dtype=float)
    out[..., 0] = arr.real
    out[..., 1] = arr.imag
    return out.tolist()


def _from_pairs(data):
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def rep_to_dict(rep, field=None):
    """Serialize a representation (and optional abelian field) to plain data."""
    alpha = None
    if rep.alpha is not None:
        alpha = [int(rep.alpha.numerator), int(rep.alpha.denominator)]
    return {
        "dimV": int(rep.dim),
        "kind": rep.name,
        "G_ab": _complex_pairs(rep.gauge),
        "alpha": alpha,
        "B": None if field is None else [[float(x) for x in row] for row in field],
    }


def rep_from_dict(alg, d):
    """Rebuild a representation against alg; returns (rep, field or None)."""
    try:
        gauge = _from_pairs(d["G_ab"])
        dim = int(d["dimV"])
        alpha = d.get("alpha")
        if alpha is not None:
            alpha = Fraction(int(alpha[0]), int(alpha[1]))
        field = d.get("B")
    except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
        raise BadParams(f"not a representation document: {exc}") from exc
    if gauge.shape != (alg.dim, alg.dim, dim, dim):
        raise BadParams(
            f"gauge shape {gauge.shape} does not fit dimension {alg.dim}"
        )
    rep = FiberRep(
        name=str(d.get("kind", "custom")),
        dim=dim,
        gauge=gauge,
        hol=holonomy_from_gauge(alg, gauge),
        alpha=alpha,
    )
    return rep, (None if field is None else np.asarray(field, dtype=float))


# ---------------------------------------------------------------------------
# consistency checks


def _mx(x):
    return float(np.max(np.abs(x))) if np.size(x) else 0.0


def rotation_relation_residual(gauge):
    """so(n) commutators: [G_ab, G_cd] = d_bc G_ad - d_ac G_bd
    - d_bd G_ac + d_ad G_bc.
    """
    n = gauge.shape[0]
    eye = np.eye(n)
    comm = np.einsum("abxy,cdyz->abcdxz", gauge, gauge)
    comm = comm - np.einsum("cdxy,abyz->abcdxz", gauge, gauge)
    target = (
        np.einsum("bc,adxz->abcdxz", eye, gauge)
        - np.einsum("ac,bdxz->abcdxz", eye, gauge)
        - np.einsum("bd,acxz->abcdxz", eye, gauge)
        + np.einsum("ad,bcxz->abcdxz", eye, gauge)
    )
    return _mx(comm - target)


def holonomy_relation_residual(alg, rep):
    """Residual of [hol_i, hol_k] = F^j_ik hol_j."""
    hol = rep.hol
    if hol.shape[0] == 0:
        return 0.0
    comm = np.einsum("ixy,kyz->ikxz", hol, hol) - np.einsum(
        "kxy,iyz->ikxz", hol, hol
    )
    target = np.einsum("jik,jxz->ikxz", alg.structure.astype(complex), hol)
    return _mx(comm - target)


def equivariance_residual(alg, rep):
    """Residual of [hol_i, G_ab] = D^c_ia G_cb + D^c_ib G_ac."""
    d_c = alg.generators.astype(complex)
    comm = np.einsum("ixy,abyz->iabxz", rep.hol, rep.gauge) - np.einsum(
        "abxy,iyz->iabxz", rep.gauge, rep.hol
    )
    target = np.einsum("ica,cbxz->iabxz", d_c, rep.gauge) + np.einsum(
        "icb,acxz->iabxz", d_c, rep.gauge
    )
    return _mx(comm - target)


def check_representation(alg, rep, tol=None):
    """Raise RepresentationBroken unless all structural residuals pass."""
    tol = alg.tol_alg if tol is None else tol
    res = {
        "rotation_relations": rotation_relation_residual(rep.gauge),
        "holonomy_relations": holonomy_relation_residual(alg, rep),
        "equivariance": equivariance_residual(alg, rep),
        "gauge_antisymmetry": _mx(rep.gauge + np.transpose(rep.gauge, (1, 0, 2, 3))),
    }
    bad = {k: v for k, v in res.items() if v > tol}
    if bad:
        worst = max(bad, key=bad.get)
        raise RepresentationBroken(f"{worst} residual {bad[worst]:.3e} > {tol:.1e}")
    return res


def casimir(alg, rep):
    """Quadratic holonomy Casimir sum_i hol_i hol_i / lambda_i."""
    d = rep.dim
    out = np.zeros((d, d), dtype=complex)
    for i in range(alg.rank):
        out += rep.hol[i] @ rep.hol[i] / alg.eigenvalues[i]
    return out


def casimir_gauge_residual(alg, rep):
    """The Casimir equals (1/4) R_abcd gauge[a,b] gauge[c,d]."""
    riem = np.einsum("i,iab,icd->abcd", alg.eigenvalues, alg.two_forms, alg.two_forms)
    quad = 0.25 * np.einsum(
        "abcd,abxy,cdyz->xz", riem.astype(complex), rep.gauge, rep.gauge
    )
    return _mx(casimir(alg, rep) - quad)


def spinor_product_casimir_residual(alg, rep):
    """Closed form of the Casimir on a spinor twisted by another fiber.

    For rep = spinor (x) twist the Casimir must equal
    -(R/8) I + I (x) C_twist - (1/2) E^j_ab gamma_ab (x) T_j
    with C_twist the Casimir of the twist factor alone.
    """
    if not rep.parts or rep.parts[0].gammas is None:
        raise BadParams("needs a product whose first factor is a spinor")
    spin = rep.parts[0]
    twist = rep.parts[1]
    for extra in rep.parts[2:]:
        twist = product_rep(twist, extra)
    gam = spin.gammas
    d_s, d_t = spin.dim, twist.dim
    eye_s = np.eye(d_s, dtype=complex)
    eye_t = np.eye(d_t, dtype=complex)
    gam_ab = np.zeros((alg.dim, alg.dim, d_s, d_s), dtype=complex)
    for a in range(alg.dim):
        for b in range(alg.dim):
            gam_ab[a, b] = 0.5 * (gam[a] @ gam[b] - gam[b] @ gam[a])
    cross = np.einsum(
        "jab,abxy,juv->xuyv",
        alg.two_forms.astype(complex),
        gam_ab,
        twist.hol,
    ).reshape(d_s * d_t, d_s * d_t)
    closed = (
        -alg.scalar_curvature / 8.0 * np.kron(eye_s, eye_t)
        + np.kron(eye_s, casimir(alg, twist))
        - 0.5 * cross
    )
    return _mx(casimir(alg, rep) - closed)


# ---------------------------------------------------------------------------
# abelian gauge field on the flat directions


def abelian_field(alg, field):
    """Validate a constant abelian field strength on the flat directions.

    field is a real antisymmetric (n, n) matrix; it must vanish on the
    curved block (h field = field h = 0) or BadAbelianField is raised.
    """
    field = np.asarray(field, dtype=float)
    n = alg.dim
    if field.shape != (n, n):
        raise BadParams(f"field must be ({n}, {n}), got {field.shape}")
    if _mx(field + field.T) > alg.tol_alg:
        raise BadAbelianField("field strength must be antisymmetric")
    h = alg.proj_curved
    if _mx(h @ field) > alg.tol_alg or _mx(field @ h) > alg.tol_alg:
        raise BadAbelianField("field strength must live on the flat directions")
    return field


def gauge_curvature(alg, rep, field=None):
    """Curvature two-form of the fiber connection.

    F_ab = -E^i_ab hol_i + field_ab I, shape (n, n, d, d).
    """
    n, d = alg.dim, rep.dim
    curv = -np.einsum("iab,ixy->abxy", alg.two_forms.astype(complex), rep.hol)
    if field is not None:
        field = abelian_field(alg, field)
        curv = curv + field[:, :, None, None] * np.eye(d, dtype=complex)
    return curv


def gauge_curvature_residual(alg, rep, field=None):
    """Integrability of the fiber curvature against the Riemann tensor.

    [F_cd, F_ab] = R^f_acd F_fb + R^f_bcd F_af must hold pointwise.
    """
    curv = gauge_curvature(alg, rep, field)
    riem = np.einsum(
        "i,iab,icd->abcd", alg.eigenvalues, alg.two_forms, alg.two_forms
    ).astype(complex)
    comm = np.einsum("cdxy,abyz->cdabxz", curv, curv) - np.einsum(
        "abxy,cdyz->cdabxz", curv, curv
    )
    target = np.einsum("facd,fbxz->cdabxz", riem, curv) + np.einsum(
        "fbcd,afxz->cdabxz", riem, curv
    )
    return _mx(comm - target)

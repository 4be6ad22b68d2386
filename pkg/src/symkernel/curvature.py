"""Curvature algebra of a symmetric space.

Builds, from a flat-frame Riemann tensor with parallel curvature, the
spectral data of the curvature operator on two-forms, the holonomy
generators acting on the tangent space, their structure constants, and
the assembled Lie algebra of the motion group with its invariant metric.
All index conventions are Euclidean (frame indices raised and lowered
with the identity), so upper and lower tangent indices are interchangeable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams, DegenerateSplit, NotClosed, SymmetryViolation

DEFAULT_TOL_ALG = 1e-10
DEFAULT_TOL_RANK = 1e-8

# ambiguous band above the zero threshold, in units of the threshold
_DEGENERATE_BAND = 10.0


# ---------------------------------------------------------------------------
# input tensor


@dataclass(frozen=True)
class RiemannData:
    """Riemann tensor in an orthonormal frame, all indices down."""

    n: int
    riem: np.ndarray

    def __post_init__(self):
        riem = np.ascontiguousarray(np.asarray(self.riem, dtype=float))
        if riem.shape != (self.n,) * 4:
            raise BadParams(f"riem must have shape {(self.n,)*4}, got {riem.shape}")
        riem.setflags(write=False)
        object.__setattr__(self, "riem", riem)

    def check_symmetries(self, tol=DEFAULT_TOL_ALG):
        r = self.riem
        checks = {
            "antisymmetry_first_pair": r + np.swapaxes(r, 0, 1),
            "antisymmetry_second_pair": r + np.swapaxes(r, 2, 3),
            "pair_exchange": r - np.transpose(r, (2, 3, 0, 1)),
            "first_bianchi": r + np.transpose(r, (0, 2, 3, 1))
            + np.transpose(r, (0, 3, 1, 2)),
        }
        bad = {k: float(np.max(np.abs(v))) for k, v in checks.items()}
        worst = max(bad.values()) if bad else 0.0
        if worst > tol:
            name = max(bad, key=bad.get)
            raise SymmetryViolation(f"{name} residual {bad[name]:.3e} > {tol:.1e}")
        return bad


def pair_basis(n):
    """Ordered index pairs (a, b) with a < b for the two-form basis."""
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


def curvature_operator(riem_data, tol=DEFAULT_TOL_ALG):
    """Matrix of the curvature operator on orthonormal two-forms.

    The basis two-form for the pair (a, b) has components
    e_cd = delta_ca delta_db - delta_cb delta_da; with the inner product
    <X, Y> = (1/2) X_ab Y_ab these are orthonormal, and the operator
    matrix element for pairs (a, b), (c, d) is simply riem[a, b, c, d].
    """
    riem_data.check_symmetries(tol)
    pairs = pair_basis(riem_data.n)
    m = len(pairs)
    op = np.empty((m, m))
    for row, (a, b) in enumerate(pairs):
        for col, (c, d) in enumerate(pairs):
            op[row, col] = riem_data.riem[a, b, c, d]
    return op, pairs


def _canonicalize_cluster(block):
    """Deterministic orthonormal basis of a degenerate eigenspace.

    Largest-component pivot first: repeatedly pick the row holding the
    largest remaining entry, rotate the columns so that row is carried
    by a single basis vector, and fix its sign positive.
    """
    block = block.copy()
    m, c = block.shape
    used_rows = []
    for j in range(c):
        sub = np.abs(block[:, j:])
        for r in used_rows:
            sub[r, :] = -1.0
        r, jc = np.unravel_index(np.argmax(sub), sub.shape)
        used_rows.append(r)
        v = block[r, j:].copy()
        norm = np.linalg.norm(v)
        if norm == 0.0:
            continue
        target = np.zeros_like(v)
        target[0] = norm
        w = v - target
        wn = np.linalg.norm(w)
        if wn > 1e-300:
            w /= wn
            block[:, j:] = block[:, j:] - 2.0 * np.outer(block[:, j:] @ w, w)
        if block[r, j] < 0:
            block[:, j] = -block[:, j]
    return block


def spectral_split(riem_data, tol_rank=DEFAULT_TOL_RANK, tol_alg=DEFAULT_TOL_ALG):
    """Nonzero eigenvalues and eigen-two-forms of the curvature operator.

    Returns (eigenvalues, two_forms) with eigenvalues sorted descending
    and two_forms of shape (p, n, n), orthonormal under <X, Y> = X_ab
    Y_ab / 2. Raises DegenerateSplit when an eigenvalue falls in the
    ambiguous band just above the zero threshold.
    """
    op, pairs = curvature_operator(riem_data, tol_alg)
    sym_res = float(np.max(np.abs(op - op.T))) if op.size else 0.0
    if sym_res > tol_alg:
        raise SymmetryViolation(f"curvature operator not symmetric: {sym_res:.3e}")
    if op.size == 0:
        return np.zeros(0), np.zeros((0, riem_data.n, riem_data.n))
    evals, evecs = np.linalg.eigh(0.5 * (op + op.T))
    scale = float(np.max(np.abs(evals)))
    if scale == 0.0:
        return np.zeros(0), np.zeros((0, riem_data.n, riem_data.n))
    thresh = tol_rank * scale
    mags = np.abs(evals)
    ambiguous = (mags > thresh) & (mags < _DEGENERATE_BAND * thresh)
    if np.any(ambiguous):
        worst = float(np.min(mags[ambiguous]))
        raise DegenerateSplit(
            f"eigenvalue magnitude {worst:.3e} within ({thresh:.3e}, "
            f"{_DEGENERATE_BAND * thresh:.3e}) is ambiguous at tol_rank={tol_rank:.1e}"
        )
    keep = mags >= _DEGENERATE_BAND * thresh
    lam = evals[keep]
    vecs = evecs[:, keep]
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    vecs = vecs[:, order]
    # canonicalize within near-equal eigenvalue clusters
    p = lam.size
    start = 0
    while start < p:
        stop = start + 1
        while stop < p and abs(lam[stop] - lam[start]) <= tol_rank * scale:
            stop += 1
        if stop - start > 1:
            vecs[:, start:stop] = _canonicalize_cluster(vecs[:, start:stop])
        else:
            col = vecs[:, start]
            piv = np.argmax(np.abs(col))
            if col[piv] < 0:
                vecs[:, start] = -col
        start = stop
    n = riem_data.n
    two_forms = np.zeros((p, n, n))
    for i in range(p):
        for row, (a, b) in enumerate(pairs):
            two_forms[i, a, b] = vecs[row, i]
            two_forms[i, b, a] = -vecs[row, i]
    return lam, two_forms


def build_generators(eigenvalues, two_forms):
    """Holonomy generators on the tangent space: D_i = -lambda_i E_i."""
    return -eigenvalues[:, None, None] * two_forms


def _adjoint_structure(n, p, two_forms, generators, structure):
    """Structure constants c[C_out, A, B] of the assembled algebra.

    Index blocks: 0..n-1 tangent translations, n..n+p-1 holonomy.
    """
    big = n + p
    c = np.zeros((big, big, big))
    for i in range(p):
        c[n + i, :n, :n] = two_forms[i]  # [P_a, P_b] = E^i_ab Q_i
        c[:n, n + i, :n] = generators[i]  # [Q_i, P_b] = D^a_ib P_a
        c[:n, :n, n + i] = -generators[i]  # [P_b, Q_i] = -D^a_ib P_a
    c[n:, n:, n:] = structure  # [Q_i, Q_k] = F^j_ik Q_j
    return c


def _adjoint_matrices(n, p, two_forms, generators, structure):
    """Adjoint matrices (C_A)^B_C on the assembled algebra, shape (N, N, N)."""
    c = _adjoint_structure(n, p, two_forms, generators, structure)
    return np.transpose(c, (1, 0, 2))


def holonomy_structure_constants(generators, tol_alg=DEFAULT_TOL_ALG):
    """Structure constants F[j, i, k] with [D_i, D_k] = F[j, i, k] D_j.

    Solved in the least-squares sense against the generator basis; a
    residual above tol_alg (relative to the commutator scale) raises
    NotClosed.
    """
    p = generators.shape[0]
    struct = np.zeros((p, p, p))
    if p == 0:
        return struct
    basis = generators.reshape(p, -1).T  # (n^2, p)
    gram = basis.T @ basis
    gram_inv = np.linalg.inv(gram)
    scale = max(1.0, float(np.max(np.abs(generators))) ** 2)
    for i in range(p):
        for k in range(i + 1, p):
            comm = generators[i] @ generators[k] - generators[k] @ generators[i]
            b = comm.reshape(-1)
            f = gram_inv @ (basis.T @ b)
            resid = float(np.linalg.norm(basis @ f - b, ord=np.inf))
            if resid > tol_alg * scale:
                raise NotClosed(
                    f"commutator [D_{i}, D_{k}] leaves the span: "
                    f"residual {resid:.3e}"
                )
            struct[:, i, k] = f
            struct[:, k, i] = -f
    return struct


def _flat_projector(two_forms, n):
    """Projectors (curved, flat) from the row space of the two-forms."""
    p = two_forms.shape[0]
    if p == 0:
        return np.zeros((n, n)), np.eye(n)
    stacked = two_forms.reshape(p * n, n)
    u, s, vt = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(s > 1e-12 * (s[0] if s.size else 1.0)))
    rows = vt[:rank]
    h = rows.T @ rows
    return h, np.eye(n) - h


# ---------------------------------------------------------------------------
# assembled algebra


@dataclass(frozen=True)
class CurvatureAlgebra:
    """Spectral curvature data plus the assembled motion-group algebra.

    Attributes follow the interchange layout: `eigenvalues` is the
    diagonal of the two-form metric, `two_forms[i]` the orthonormal
    eigen-two-forms, `generators[i]` the tangent action of the holonomy
    basis, `structure[j, i, k]` its structure constants, and `metric`
    the invariant quadratic form on the assembled algebra (tangent
    block first, then holonomy block).
    """

    dim: int
    flat_dim: int
    rank: int
    eigenvalues: np.ndarray
    two_forms: np.ndarray
    generators: np.ndarray
    structure: np.ndarray
    metric: np.ndarray
    scalar_curvature: float
    holonomy_curvature: float
    group_curvature: float
    rho: np.ndarray
    proj_curved: np.ndarray
    proj_flat: np.ndarray
    tol_alg: float = field(default=DEFAULT_TOL_ALG, compare=False)

    def __post_init__(self):
        for name in (
            "eigenvalues",
            "two_forms",
            "generators",
            "structure",
            "metric",
            "rho",
            "proj_curved",
            "proj_flat",
        ):
            arr = np.ascontiguousarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def curved_dim(self):
        return self.dim - self.flat_dim

    def adjoint_structure(self):
        """Structure constants c[C_out, A, B]: [X_A, X_B] = c[C, A, B] X_C."""
        return _adjoint_structure(
            self.dim, self.rank, self.two_forms, self.generators, self.structure
        )

    def adjoint_matrices(self):
        """Matrices (C_A)^B_C of the adjoint action, shape (N, N, N)."""
        return np.transpose(self.adjoint_structure(), (1, 0, 2))


def assemble(riem_data, tol_alg=DEFAULT_TOL_ALG, tol_rank=DEFAULT_TOL_RANK):
    """Full pipeline from a Riemann tensor to a CurvatureAlgebra."""
    lam, two_forms = spectral_split(riem_data, tol_rank, tol_alg)
    gens = build_generators(lam, two_forms)
    struct = holonomy_structure_constants(gens, tol_alg)
    n, p = riem_data.n, lam.size
    rho = -np.einsum("iab,kba->ik", gens, gens)
    beta_inv = np.zeros((p, p))
    if p:
        beta_inv = np.diag(1.0 / lam)
    scalar = float(np.einsum("ik,ik->", beta_inv, rho))
    adj = np.transpose(struct, (1, 0, 2))  # adj[i] = F_i with (F_i)^j_k
    hol = -0.25 * float(
        np.einsum("ik,ijl,klj->", beta_inv, adj, adj)
    ) if p else 0.0
    h, q = _flat_projector(two_forms, n)
    metric = np.zeros((n + p, n + p))
    metric[:n, :n] = np.eye(n)
    if p:
        metric[n:, n:] = np.diag(lam)
    cmats = _adjoint_matrices(n, p, two_forms, gens, struct)
    minv = np.zeros((n + p, n + p))
    minv[:n, :n] = np.eye(n)
    if p:
        minv[n:, n:] = np.diag(1.0 / lam)
    group = -0.25 * float(np.einsum("AB,ACD,BDC->", minv, cmats, cmats))
    return CurvatureAlgebra(
        dim=n,
        flat_dim=int(round(np.trace(q))),
        rank=p,
        eigenvalues=lam,
        two_forms=two_forms,
        generators=gens,
        structure=struct,
        metric=metric,
        scalar_curvature=scalar,
        holonomy_curvature=hol,
        group_curvature=group,
        rho=rho,
        proj_curved=h,
        proj_flat=q,
        tol_alg=tol_alg,
    )


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    residuals: dict
    tol: float

    @property
    def ok(self):
        return all(v <= self.tol for v in self.residuals.values())

    @property
    def worst(self):
        name = max(self.residuals, key=self.residuals.get)
        return name, self.residuals[name]


def validate(alg, riem_data=None, tol=None):
    """Residuals of every defining identity of the curvature algebra."""
    tol = alg.tol_alg if tol is None else tol
    E, D, F = alg.two_forms, alg.generators, alg.structure
    lam = alg.eigenvalues
    n, p = alg.dim, alg.rank
    if riem_data is None:
        riem = np.einsum("i,iab,icd->abcd", lam, E, E)
    else:
        riem = riem_data.riem
    res = {}

    def mx(x):
        return float(np.max(np.abs(x))) if np.size(x) else 0.0

    recon = riem - np.einsum("i,iab,icd->abcd", lam, E, E)
    res["reconstruction"] = mx(recon)

    rr = np.einsum("fgea,ebcd->fgabcd", riem, riem)
    integr = (
        rr
        - np.transpose(rr, (0, 1, 3, 2, 4, 5))
        + np.einsum("fgec,edab->fgabcd", riem, riem)
        - np.einsum("fged,ecab->fgabcd", riem, riem)
    )
    res["integrability"] = mx(integr)

    # D^a_i[b R_c]ade + D^a_i[d R_e]abc = 0, antisymmetrized on [b,c], [d,e]
    t1 = np.einsum("iab,cade->ibcde", D, riem)
    t1 = 0.5 * (t1 - np.transpose(t1, (0, 2, 1, 3, 4)))
    t2 = np.einsum("iad,eabc->idebc", D, riem)
    t2 = 0.5 * (t2 - np.transpose(t2, (0, 2, 1, 3, 4)))
    res["curvature_equivariance"] = mx(t1 + np.transpose(t2, (0, 3, 4, 1, 2)))

    # cyclic antisymmetrization of D^a_jb E^j_cd over b, c, d
    de = np.einsum("jab,jcd->abcd", D, E)
    cyc = de + np.transpose(de, (0, 2, 3, 1)) + np.transpose(de, (0, 3, 1, 2))
    res["generator_two_form_cycle"] = mx(cyc)

    if p:
        inter = (
            np.einsum("iac,kcb->ikab", E, D)
            - np.einsum("ibc,kca->ikab", E, D)
            - np.einsum("ikj,jab->ikab", F, E)
        )
        res["intertwining"] = mx(inter)
    else:
        res["intertwining"] = 0.0

    if p:
        comm = np.einsum("iab,kbc->ikac", D, D) - np.einsum("kab,ibc->ikac", D, D)
        res["commutator_closure"] = mx(comm - np.einsum("jik,jac->ikac", F, D))
    else:
        res["commutator_closure"] = 0.0

    if p:
        jac = (
            np.einsum("ljk,mil->mijk", F, F)
            + np.einsum("lki,mjl->mijk", F, F)
            + np.einsum("lij,mkl->mijk", F, F)
        )
        res["jacobi"] = mx(jac)
        mi = lam[:, None, None] * F  # beta_ik F^k_jl with beta diagonal
        res["holonomy_metric_invariance"] = mx(mi + np.transpose(mi, (2, 1, 0)))
    else:
        res["jacobi"] = 0.0
        res["holonomy_metric_invariance"] = 0.0

    cmats = alg.adjoint_matrices()
    cstruct = alg.adjoint_structure()
    big = n + p
    blk = np.einsum("aij,bjk->abik", cmats, cmats)
    blk = blk - np.transpose(blk, (1, 0, 2, 3))
    target = np.einsum("cab,cik->abik", cstruct, cmats)
    res["block_commutators"] = mx(blk - target)

    g = alg.metric
    ginv = np.zeros_like(g)
    ginv[:n, :n] = np.eye(n)
    if p:
        ginv[n:, n:] = np.diag(1.0 / lam)
    adjt = np.transpose(cmats, (0, 2, 1))
    res["adjoint_antisymmetry"] = mx(adjt + g @ cmats @ ginv)

    h, q = alg.proj_curved, alg.proj_flat
    res["projectors"] = max(
        mx(h @ h - h),
        mx(q @ q - q),
        mx(h @ q),
        mx(h + q - np.eye(n)),
        abs(np.trace(q) - alg.flat_dim),
        mx(np.einsum("iab,bc->iac", E, q)) if p else 0.0,
    )

    if p:
        res["scalar_consistency"] = abs(
            float(np.sum(np.diag(alg.rho) / lam)) - alg.scalar_curvature
        )
    else:
        res["scalar_consistency"] = abs(alg.scalar_curvature)

    return ValidationReport(residuals=res, tol=tol)


# ---------------------------------------------------------------------------
# built-in spaces


def sphere_riemann(n, radius=1.0):
    """Round sphere of dimension n and the given radius."""
    if n < 2 or radius <= 0:
        raise BadParams("sphere needs n >= 2 and radius > 0")
    eye = np.eye(n)
    riem = (np.einsum("ac,bd->abcd", eye, eye) - np.einsum("ad,bc->abcd", eye, eye))
    return RiemannData(n=n, riem=riem / radius**2)


def hyperbolic_riemann(n, radius=1.0):
    """Hyperbolic space of dimension n and curvature radius `radius`."""
    base = sphere_riemann(n, 1.0).riem
    return RiemannData(n=n, riem=-base / radius**2)


def flat_riemann(n):
    if n < 1:
        raise BadParams("flat factor needs n >= 1")
    return RiemannData(n=n, riem=np.zeros((n, n, n, n)))


def product_riemann(factors):
    """Block-diagonal Riemann tensor of a product of spaces."""
    if not factors:
        raise BadParams("empty product")
    n = sum(f.n for f in factors)
    riem = np.zeros((n, n, n, n))
    off = 0
    for f in factors:
        m = f.n
        riem[off:off + m, off:off + m, off:off + m, off:off + m] = f.riem
        off += m
    return RiemannData(n=n, riem=riem)


def sphere_volume(n, radius=1.0):
    """Volume of the round n-sphere of the given radius."""
    return 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0) * radius**n


# ---------------------------------------------------------------------------
# interchange


def riemann_to_dict(rd):
    return {"n": rd.n, "riem": [float(x) for x in rd.riem.reshape(-1)]}


def riemann_from_dict(d):
    try:
        n = int(d["n"])
        riem = np.asarray(d["riem"], dtype=float).reshape((n,) * 4)
    except (KeyError, TypeError, ValueError) as exc:
        raise BadParams(f"not a tensor document (needs n, riem): {exc}") from exc
    return RiemannData(n=n, riem=riem)


def algebra_to_dict(alg):
    return {
        "n": alg.dim,
        "n0": alg.flat_dim,
        "p": alg.rank,
        "beta": [float(x) for x in alg.eigenvalues],
        "E": [[[float(x) for x in row] for row in mat] for mat in alg.two_forms],
        "D": [[[float(x) for x in row] for row in mat] for mat in alg.generators],
        "F": [[[float(x) for x in row] for row in mat] for mat in alg.structure],
        "gamma": [[float(x) for x in row] for row in alg.metric],
        "R": float(alg.scalar_curvature),
        "R_H": float(alg.holonomy_curvature),
        "R_G": float(alg.group_curvature),
    }


def algebra_from_dict(d, tol_alg=DEFAULT_TOL_ALG):
    try:
        n, n0, p = int(d["n"]), int(d["n0"]), int(d["p"])
        lam = np.asarray(d["beta"], dtype=float)
        E = np.asarray(d["E"], dtype=float).reshape(p, n, n)
        D = np.asarray(d["D"], dtype=float).reshape(p, n, n)
        F = np.asarray(d["F"], dtype=float).reshape(p, p, p)
        metric = np.asarray(d["gamma"], dtype=float).reshape(n + p, n + p)
    except (KeyError, TypeError, ValueError) as exc:
        raise BadParams(f"not an algebra document: {exc}") from exc
    rho = -np.einsum("iab,kba->ik", D, D)
    h, q = _flat_projector(E, n)
    return CurvatureAlgebra(
        dim=n,
        flat_dim=n0,
        rank=p,
        eigenvalues=lam,
        two_forms=E,
        generators=D,
        structure=F,
        metric=metric,
        scalar_curvature=float(d["R"]),
        holonomy_curvature=float(d["R_H"]),
        group_curvature=float(d["R_G"]),
        rho=rho,
        proj_curved=h,
        proj_flat=q,
        tol_alg=tol_alg,
    )

"""Heat kernel coefficients from Gaussian averages over the holonomy.

The diagonal heat kernel of a symmetric space has a closed generating
function: a Gaussian expectation, over auxiliary variables carrying the
holonomy directions, of a product of hyperbolic determinant factors and
a cosh of the fiber holonomy. Expanding everything in powers of
s = sqrt(t), averaging term by term with Wick pairings, and multiplying
by the scalar exponential prefactor yields the short-time coefficients
a_k as exact rational combinations of curvature data.

Conventions: the diagonal equals (4 pi t)^(-n/2) sum_k a_k t^k, with
a_0 = I on the fiber.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BadParams, TruncationOverflow
from .representations import casimir

MAX_ORDER = 6
DEFAULT_ORDER = 3


# ---------------------------------------------------------------------------
# Bernoulli numbers and the log-sinhc series


def bernoulli_numbers(count):
    """B_0 .. B_{count-1} as exact fractions (B_1 = -1/2 convention)."""
    out = [Fraction(1)]
    for m in range(1, count):
        acc = Fraction(0)
        for j in range(m):
            acc += Fraction(math.comb(m + 1, j)) * out[j]
        out.append(-acc / (m + 1))
    return out


def log_sinhc_coefficients(order):
    """Exact coefficients c_k of log(sinh x / x) = sum_k c_k x^(2k).

    c_k = 2^(2k-1) B_2k / (k (2k)!); c_1 = 1/6, c_2 = -1/180.
    """
    bern = bernoulli_numbers(2 * order + 1)
    return [
        Fraction(2) ** (2 * k - 1) * bern[2 * k] / (k * math.factorial(2 * k))
        for k in range(1, order + 1)
    ]


# ---------------------------------------------------------------------------
# Wick moments


class MomentEngine:
    """Gaussian moments of the holonomy variables.

    The covariance is <w_i w_k> = 2 delta_ik / lambda_i; a general
    moment is the sum over all pairings of products of covariances,
    memoized on the sorted index tuple.
    """

    def __init__(self, eigenvalues):
        lam = np.asarray(eigenvalues, dtype=float)
        if lam.size and np.any(lam == 0.0):
            raise BadParams("zero eigenvalue in the two-form metric")
        self._cov = 2.0 / lam if lam.size else lam
        self._cache = {}

    def covariance(self, i, k):
        return self._cov[i] if i == k else 0.0

    def moment(self, indices):
        """Expectation of the product of variables named by `indices`."""
        key = tuple(sorted(indices))
        if len(key) % 2:
            return 0.0
        if not key:
            return 1.0
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        first, rest = key[0], key[1:]
        total = 0.0
        for pos in range(len(rest)):
            cov = self.covariance(first, rest[pos])
            if cov != 0.0:
                total += cov * self.moment(rest[:pos] + rest[pos + 1:])
        self._cache[key] = total
        return total


# ---------------------------------------------------------------------------
# polynomials in the holonomy variables with matrix coefficients


class OmegaPoly:
    """Matrix-valued polynomial in commuting holonomy variables.

    terms maps a sorted index tuple (a monomial) to a complex (d, d)
    coefficient matrix. Scalars are carried as (1, 1) matrices and
    broadcast through products.
    """

    __slots__ = ("terms", "shape")

    def __init__(self, shape, terms=None):
        self.shape = shape
        self.terms = {} if terms is None else terms

    @classmethod
    def linear(cls, matrices):
        """Polynomial sum_i w_i M_i from a stack of matrices (p, d, d)."""
        matrices = np.asarray(matrices, dtype=complex)
        terms = {}
        for i in range(matrices.shape[0]):
            if np.any(matrices[i]):
                terms[(i,)] = matrices[i].copy()
        return cls(matrices.shape[1:], terms)

    @classmethod
    def constant(cls, matrix):
        matrix = np.asarray(matrix, dtype=complex)
        terms = {(): matrix.copy()} if np.any(matrix) else {}
        return cls(matrix.shape, terms)

    def degree(self):
        return max((len(k) for k in self.terms), default=0)

    def is_homogeneous(self, deg):
        return all(len(k) == deg for k in self.terms)

    def add(self, other):
        if self.shape != other.shape:
            raise BadParams("shape mismatch in polynomial sum")
        terms = dict(self.terms)
        for key, mat in other.terms.items():
            if key in terms:
                terms[key] = terms[key] + mat
            else:
                terms[key] = mat.copy()
        return OmegaPoly(self.shape, terms)

    def scale(self, factor):
        return OmegaPoly(
            self.shape, {k: factor * m for k, m in self.terms.items()}
        )

    def mul(self, other, max_degree=None):
        """Product; coefficient matrices multiply, monomials merge sorted.

        Terms whose degree exceeds max_degree are dropped (series
        truncation, exact for the retained orders).
        """
        if self.shape == (1, 1) and other.shape != (1, 1):
            shape = other.shape
        elif other.shape == (1, 1) and self.shape != (1, 1):
            shape = self.shape
        elif self.shape[1] == other.shape[0]:
            shape = (self.shape[0], other.shape[1])
        else:
            raise BadParams("shape mismatch in polynomial product")
        terms = {}
        for k1, m1 in self.terms.items():
            for k2, m2 in other.terms.items():
                if max_degree is not None and len(k1) + len(k2) > max_degree:
                    continue
                key = tuple(sorted(k1 + k2))
                if m1.shape == (1, 1):
                    mat = m1[0, 0] * m2
                elif m2.shape == (1, 1):
                    mat = m2[0, 0] * m1
                else:
                    mat = m1 @ m2
                if key in terms:
                    terms[key] += mat
                else:
                    terms[key] = mat
        return OmegaPoly(shape, terms)

    def trace(self):
        out = OmegaPoly((1, 1))
        for key, mat in self.terms.items():
            out.terms[key] = np.array([[np.trace(mat)]], dtype=complex)
        return out

    def average(self, moments):
        """Gaussian expectation: matrix of shape `shape`."""
        out = np.zeros(self.shape, dtype=complex)
        for key, mat in self.terms.items():
            w = moments.moment(key)
            if w != 0.0:
                out = out + w * mat
        return out


class GradedSeries:
    """Series in s = sqrt(t) whose slot j is an OmegaPoly of degree j.

    Only even slots may be populated, and slot j must be homogeneous of
    omega-degree exactly j; these invariants tie the time grading to
    the Gaussian grading and are enforced on every write.
    """

    def __init__(self, order, shape):
        self.order = order  # highest power of t retained
        self.shape = shape
        self.slots = [OmegaPoly(shape) for _ in range(2 * order + 1)]

    def set_slot(self, j, poly):
        if j > 2 * self.order:
            raise TruncationOverflow(
                f"slot {j} exceeds the retained order {self.order}"
            )
        if j % 2:
            raise TruncationOverflow(f"odd grading slot {j} must stay empty")
        if not poly.is_homogeneous(j):
            raise TruncationOverflow(
                f"slot {j} must be homogeneous of degree {j}, got degree "
                f"{poly.degree()}"
            )
        self.slots[j] = poly

    def add_to_slot(self, j, poly):
        self.set_slot(j, self.slots[j].add(poly))

    @classmethod
    def one(cls, order, shape=(1, 1)):
        out = cls(order, shape)
        out.slots[0] = OmegaPoly.constant(np.eye(shape[0], dtype=complex))
        return out

    def scale_all(self, factor):
        out = GradedSeries(self.order, self.shape)
        out.slots = [p.scale(factor) for p in self.slots]
        return out

    def mul(self, other):
        if self.shape == (1, 1):
            shape = other.shape
        elif other.shape == (1, 1):
            shape = self.shape
        else:
            shape = (self.shape[0], other.shape[1])
        cap = 2 * self.order
        out = GradedSeries(self.order, shape)
        for j1, p1 in enumerate(self.slots):
            if not p1.terms:
                continue
            for j2, p2 in enumerate(other.slots):
                if not p2.terms or j1 + j2 > cap:
                    continue
                out.add_to_slot(j1 + j2, p1.mul(p2))
        return out

    def exp(self):
        """Exponential of a series with empty constant slot."""
        if self.slots[0].terms:
            raise BadParams("exp needs a series with no constant term")
        result = GradedSeries.one(self.order, self.shape)
        power = GradedSeries.one(self.order, self.shape)
        fact = 1.0
        for m in range(1, 2 * self.order + 1):
            power = power.mul(self)
            fact *= m
            if all(not p.terms for p in power.slots):
                break
            for j, poly in enumerate(power.slots):
                if poly.terms:
                    result.add_to_slot(j, poly.scale(1.0 / fact))
        return result


# ---------------------------------------------------------------------------
# generating function


def _matrix_poly_logdet(matrices, order, coeffs, half_arg_power=2):
    """Graded series of log det sinhc(s M(w) / 2) as scalar polynomials.

    Slot 2k holds c_k / 4^k tr(M(w)^(2k)); the caller applies the +-1/2
    determinant power as an overall scale.
    """
    out = GradedSeries(order, (1, 1))
    matrices = np.asarray(matrices, dtype=complex)
    if matrices.size == 0:
        return out
    linear = OmegaPoly.linear(matrices)
    square = linear.mul(linear, max_degree=2 * order)
    power = None
    for k in range(1, order + 1):
        power = square if power is None else power.mul(square, max_degree=2 * order)
        coeff = float(coeffs[k - 1]) / 4.0**k
        out.set_slot(2 * k, power.trace().scale(coeff))
    return out


def _cosh_series(matrices, order, dim):
    """Graded series of cosh(s R(w)) on the fiber."""
    out = GradedSeries.one(order, (dim, dim))
    matrices = np.asarray(matrices, dtype=complex)
    if matrices.size == 0 or not np.any(matrices):
        return out
    linear = OmegaPoly.linear(matrices)
    square = linear.mul(linear, max_degree=2 * order)
    power = None
    for k in range(1, order + 1):
        power = square if power is None else power.mul(square, max_degree=2 * order)
        if not power.terms:
            break
        out.set_slot(2 * k, power.scale(1.0 / math.factorial(2 * k)))
    return out


def _matrix_exp_tseries(mat, order):
    """Coefficients of exp(t mat) as matrices, t^0 .. t^order."""
    d = mat.shape[0]
    out = [np.eye(d, dtype=complex)]
    for k in range(1, order + 1):
        out.append(out[-1] @ mat / k)
    return out


def _scalar_field_tseries(field, order, coeffs):
    """Coefficients of det(sinh(tB)/(tB))^(-1/2) as a t-series.

    The field strength enters with a full power of t, so the k-th log
    term sits at t^(2k); absent or zero fields give the constant 1.
    """
    out = [1.0 + 0.0j] + [0.0j] * order
    if field is None or not np.any(field):
        return out
    log_terms = [0.0j] * (order + 1)
    f2 = field @ field
    power = np.eye(field.shape[0])
    for k in range(1, order // 2 + 1):
        power = power @ f2
        log_terms[2 * k] = -0.5 * float(coeffs[k - 1]) * np.trace(power)
    # exponentiate the scalar t-series
    for k in range(1, order + 1):
        acc = 0.0j
        for j in range(1, k + 1):
            acc += j * log_terms[j] * out[k - j]
        out[k] = acc / k
    return out


@dataclass(frozen=True)
class HeatExpansion:
    """Short-time expansion of the fiber heat kernel diagonal."""

    order: int
    coefficients: tuple
    rep_dim: int

    def traces(self):
        """Fiber traces tr a_k, k = 0 .. order."""
        return [complex(np.trace(c)) for c in self.coefficients]


def heat_coefficients(alg, rep, order=DEFAULT_ORDER, field=None):
    """Heat kernel coefficients a_0 .. a_order as fiber matrices.

    alg is a CurvatureAlgebra, rep a FiberRep over it, field an
    optional constant abelian field strength on the flat directions.
    """
    order = int(order)
    if order < 0 or order > MAX_ORDER:
        raise BadParams(f"order must lie in 0..{MAX_ORDER}, got {order}")
    d = rep.dim
    coeffs = log_sinhc_coefficients(max(order, 1))
    adj = np.transpose(alg.structure, (1, 0, 2))  # F_i matrices
    tangent = _matrix_poly_logdet(alg.generators, order, coeffs)
    holonomy = _matrix_poly_logdet(adj, order, coeffs)
    integrand = holonomy.scale_all(0.5).exp().mul(tangent.scale_all(-0.5).exp())
    integrand = integrand.mul(_cosh_series(rep.hol, order, d))
    moments = MomentEngine(alg.eigenvalues)
    eye = np.eye(d, dtype=complex)
    averaged = []
    for k in range(order + 1):
        slot = integrand.slots[2 * k]
        if not slot.terms:
            averaged.append(np.zeros((d, d), dtype=complex))
            continue
        avg = slot.average(moments)
        averaged.append(avg if avg.shape == (d, d) else avg[0, 0] * eye)
    cas = casimir(alg, rep)
    scalar_shift = alg.scalar_curvature / 8.0 + alg.holonomy_curvature / 6.0
    expfac = _matrix_exp_tseries(scalar_shift * eye - cas, order)
    bfac = _scalar_field_tseries(field, order, coeffs)
    out = []
    for k in range(order + 1):
        acc = np.zeros((d, d), dtype=complex)
        for j in range(k + 1):
            for m in range(k - j + 1):
                acc += bfac[m] * (expfac[j] @ averaged[k - j - m])
        out.append(acc)
    return HeatExpansion(order=order, coefficients=tuple(out), rep_dim=d)

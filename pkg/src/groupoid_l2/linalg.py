"""Exact linear algebra over the rationals (and Gaussian rationals).

Matrices are plain lists of rows.  Entries are ``Fraction`` or
``GaussianRational``; any type with field arithmetic and ``conjugate()``
works.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class InternalError(RuntimeError):
    """Exact and floating-point routes disagree."""


class GaussianRational:
    """a + b*i with a, b rational."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def lift(x):
        if isinstance(x, GaussianRational):
            return x
        return GaussianRational(x, 0)

    def __add__(self, other):
        other = GaussianRational.lift(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.lift(other))

    def __rsub__(self, other):
        return GaussianRational.lift(other) - self

    def __mul__(self, other):
        o = GaussianRational.lift(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.lift(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        q = self * o.conjugate()
        return GaussianRational(q.re / n, q.im / n)

    def __rtruediv__(self, other):
        return GaussianRational.lift(other) / self

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other):
        try:
            o = GaussianRational.lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"{self.re}+{self.im}i"


def conj(x):
    return x.conjugate()


def zeros(m, n):
    return [[Fraction(0)] * n for _ in range(m)]


def identity(n):
    M = zeros(n, n)
    for i in range(n):
        M[i][i] = Fraction(1)
    return M


def transpose(M, ncols=None):
    if not M:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*M)]


def conj_transpose(M, ncols=None):
    return [[conj(x) for x in row] for row in transpose(M, ncols)]


def matmul(A, B, inner=None):
    """A @ B.  ``inner`` is needed only when A has no columns."""
    if not A:
        return []
    n = len(A[0]) if A[0] else (inner or 0)
    if n == 0:
        ncols = len(B[0]) if B else 0
        return zeros(len(A), ncols)
    ncols = len(B[0])
    out = []
    for row in A:
        nz = [(k, a) for k, a in enumerate(row) if a != 0]
        r = [Fraction(0)] * ncols
        for k, a in nz:
            Bk = B[k]
            for j in range(ncols):
                b = Bk[j]
                if b != 0:
                    r[j] = r[j] + a * b
        out.append(r)
    return out


def matvec(A, v):
    return [sum((a * x for a, x in zip(row, v) if a != 0 and x != 0),
                Fraction(0)) for row in A]


def is_zero_matrix(M):
    return all(x == 0 for row in M for x in row)


def rref(M, ncols=None):
    """Reduced row echelon form.  Returns (R, pivot_columns)."""
    R = [list(row) for row in M]
    if not R:
        return R, []
    n = len(R[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(R)) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        piv = R[r][c]
        if piv != 1:
            R[r] = [x / piv for x in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                Ri, Rr = R[i], R[r]
                R[i] = [a - f * b if b != 0 else a for a, b in zip(Ri, Rr)]
        pivots.append(c)
        r += 1
        if r == len(R):
            break
    return R, pivots


def rank(M):
    return len(rref(M)[1])


def nullspace(M, ncols):
    """Basis of {v : M v = 0} as a list of length-``ncols`` vectors."""
    if not M:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    R, pivots = rref(M, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, c in zip(R, pivots):
            if row[f] != 0:
                v[c] = -row[f]
        basis.append(v)
    return basis


def row_basis(vectors):
    """A basis (in RREF) of the span of ``vectors``."""
    vectors = [v for v in vectors if any(x != 0 for x in v)]
    if not vectors:
        return []
    R, pivots = rref(vectors)
    return R[:len(pivots)]


def solve(A, B):
    """Solve A X = B for square invertible A (B given as a list of rows)."""
    n = len(A)
    k = len(B[0]) if B else 0
    aug = [list(A[i]) + list(B[i]) for i in range(n)]
    R, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:n + k] for row in R[:n]]


def inner(u, v, weights):
    """Weighted inner product sum_i u_i conj(v_i) w_i."""
    return sum((a * conj(b) * w for a, b, w in zip(u, v, weights)
                if a != 0 and b != 0), Fraction(0))


@dataclass
class LinearOperator:
    """Matrix between weighted coordinate spaces.

    ``matrix`` has shape len(codomain) x len(domain); the inner product on
    each side is diagonal with the given weights.
    """

    matrix: list
    domain: list
    codomain: list
    domain_weights: list
    codomain_weights: list

    @property
    def shape(self):
        return len(self.codomain), len(self.domain)

    def adjoint(self):
        """Adjoint for the weighted inner products: W_dom^-1 M^H W_cod."""
        M = conj_transpose(self.matrix, len(self.domain))
        out = [[x * wc / wd for x, wc in zip(row, self.codomain_weights)]
               for row, wd in zip(M, self.domain_weights)]
        return LinearOperator(out, list(self.codomain), list(self.domain),
                              list(self.codomain_weights), list(self.domain_weights))

    def __matmul__(self, other):
        if isinstance(other, LinearOperator):
            if list(self.domain) != list(other.codomain):
                raise ValueError("basis mismatch in composition")
            if self.domain:
                M = matmul(self.matrix, other.matrix)
            else:
                M = zeros(len(self.codomain), len(other.domain))
            return LinearOperator(M, list(other.domain), list(self.codomain),
                                  list(other.domain_weights), list(self.codomain_weights))
        return matvec(self.matrix, other)

    def __add__(self, other):
        if (list(self.domain), list(self.codomain)) != (list(other.domain), list(other.codomain)):
            raise ValueError("basis mismatch in sum")
        M = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.matrix, other.matrix)]
        return LinearOperator(M, list(self.domain), list(self.codomain),
                              list(self.domain_weights), list(self.codomain_weights))

    def __eq__(self, other):
        return (isinstance(other, LinearOperator)
                and list(self.domain) == list(other.domain)
                and list(self.codomain) == list(other.codomain)
                and self.matrix == other.matrix)

    def rank(self):
        return rank(self.matrix)

    def kernel(self):
        return nullspace(self.matrix, len(self.domain))

    def to_float(self):
        m, n = self.shape
        A = np.zeros((m, n), dtype=complex)
        for i, row in enumerate(self.matrix):
            for j, x in enumerate(row):
                if x != 0:
                    A[i, j] = complex(x)
        return A

    def float_norm(self):
        """Operator norm for the weighted inner products."""
        m, n = self.shape
        if m == 0 or n == 0:
            return 0.0
        A = self.to_float()
        dw = np.sqrt(np.array([float(w) for w in self.domain_weights]))
        cw = np.sqrt(np.array([float(w) for w in self.codomain_weights]))
        B = (cw[:, None] * A) / dw[None, :]
        return float(np.linalg.norm(B, 2))


def weighted_projection_trace(basis, probes, weights):
    """sum_p <P p, p> for P the weighted-orthogonal projection onto span(basis).

    ``basis`` must be linearly independent.  Computed as
    p^H W B (B^H W B)^-1 B^H W p, exactly.
    """
    if not basis or not probes:
        return Fraction(0)
    k = len(basis)
    gram = [[inner(basis[j], basis[i], weights) for j in range(k)] for i in range(k)]
    rhs = [[inner(p, basis[i], weights) for p in probes] for i in range(k)]
    coeffs = solve(gram, rhs)
    total = Fraction(0)
    for c, p in enumerate(probes):
        for i in range(k):
            if coeffs[i][c] != 0:
                total += coeffs[i][c] * inner(basis[i], p, weights)
    return total


def project(basis, v, weights):
    """Weighted-orthogonal projection of v onto span(basis) (basis independent)."""
    n = len(v)
    if not basis:
        return [Fraction(0)] * n
    k = len(basis)
    gram = [[inner(basis[j], basis[i], weights) for j in range(k)] for i in range(k)]
    rhs = [[inner(v, basis[i], weights)] for i in range(k)]
    c = solve(gram, rhs)
    out = [Fraction(0)] * n
    for i in range(k):
        ci = c[i][0]
        if ci != 0:
            out = [o + ci * b for o, b in zip(out, basis[i])]
    return out


def float_projection_trace(vectors, probes, weights, rtol=1e-9):
    """Floating-point cross-check of ``weighted_projection_trace``.

    Uses an eigen-decomposition of the weighted Gram operator; directions with
    eigenvalue below ``rtol`` times the largest are treated as kernel.
    """
    if not vectors or not probes:
        return 0.0
    w = np.sqrt(np.array([float(x) for x in weights]))
    B = np.array([[complex(x) for x in v] for v in vectors]).T * w[:, None]
    H = B @ B.conj().T
    evals, evecs = np.linalg.eigh(H)
    top = max(evals.max(), 0.0)
    if top == 0.0:
        return 0.0
    Q = evecs[:, evals > rtol * top]
    P = Q @ Q.conj().T
    total = 0.0
    for p in probes:
        q = np.array([complex(x) for x in p]) * w
        total += float(np.real(q.conj() @ P @ q))
    return total

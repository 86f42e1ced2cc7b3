"""L2-Betti numbers of complexes and groupoids.

Everything is computed fibre by fibre.  The boundary maps preserve anchors,
so each Laplacian is block diagonal along the atoms and its kernel is the
direct sum of the fibrewise kernels.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from .complexes import (
    GComplex, alpha, boundary_matrix, build_graphing_complex, chain_subspace,
    is_tree_fibered, zero_operator,
)
from .groupoid import one_sheeted_decomposition
from .gspace import copies
from .linalg import (
    LinearOperator, nullspace, project, row_basis, transpose,
)
from .hilbert import vn_dimension


def _restrict(op, rows, cols):
    M = [[op.matrix[i][j] for j in cols] for i in rows]
    return LinearOperator(M, [op.domain[j] for j in cols], [op.codomain[i] for i in rows],
                          [op.domain_weights[j] for j in cols],
                          [op.codomain_weights[i] for i in rows])


def _boundary_or_zero(K, n):
    """d_n, or the zero map when one of the levels is missing."""
    if 1 <= n <= K.top:
        return boundary_matrix(K, n)
    return zero_operator(K, n, n - 1)


def laplacian(K, n):
    """Delta_n = d_n* d_n + d_{n+1} d_{n+1}* with weighted adjoints."""
    d_n = _boundary_or_zero(K, n)
    d_up = _boundary_or_zero(K, n + 1)
    return d_n.adjoint() @ d_n + d_up @ d_up.adjoint()


def fiber_laplacians(K, n):
    """{atom: Delta_n restricted to that fibre}."""
    d_n = _boundary_or_zero(K, n)
    d_up = _boundary_or_zero(K, n + 1)
    lo, mid, hi = K.chain_space(n - 1), K.chain_space(n), K.chain_space(n + 1)
    out = {}
    for x in K.groupoid.atoms:
        a = _restrict(d_n, lo.fibers.get(x, []), mid.fibers[x])
        b = _restrict(d_up, mid.fibers[x], hi.fibers.get(x, []))
        out[x] = a.adjoint() @ a + b @ b.adjoint()
    return out


def _fiber_kernel(op):
    if not op.domain:
        return []
    if not op.matrix:
        return nullspace([], len(op.domain))
    return nullspace(op.matrix, len(op.domain))


def harmonic_fibers(K, n):
    """{atom: basis of ker Delta_n on that fibre} in oriented coordinates."""
    return {x: _fiber_kernel(L) for x, L in fiber_laplacians(K, n).items()}


def betti_complex(K, n, check=True):
    """beta_n(K, G) = dim_{L(G)} ker Delta_n."""
    if n < 0 or n > K.top:
        return Fraction(0)
    return vn_dimension(chain_subspace(K, n, harmonic_fibers(K, n)), check=check)


def cycle_dimension(K, n):
    """dim ker d_n (all of C_n when n = 0)."""
    d_n = _boundary_or_zero(K, n)
    lo, mid = K.chain_space(n - 1), K.chain_space(n)
    fibers = {x: _fiber_kernel(_restrict(d_n, lo.fibers.get(x, []), mid.fibers[x]))
              for x in K.groupoid.atoms}
    return vn_dimension(chain_subspace(K, n, fibers), check=False)


def boundary_dimension(K, n):
    """b_n = dim of the closure of im d_n inside C_{n-1} (0 if d_n is absent)."""
    if n < 1 or n > K.top:
        return Fraction(0)
    d_n = boundary_matrix(K, n)
    lo, mid = K.chain_space(n - 1), K.chain_space(n)
    fibers = {}
    for x in K.groupoid.atoms:
        sub = _restrict(d_n, lo.fibers[x], mid.fibers[x])
        cols = transpose(sub.matrix) if sub.matrix and sub.domain else []
        fibers[x] = row_basis(cols)
    return vn_dimension(chain_subspace(K, n - 1, fibers), check=False)


@dataclass
class BettiResult:
    values: dict
    method: str
    kernels: dict = field(default_factory=dict)

    def __getitem__(self, n):
        return self.values[n]


def betti_all(K, check=True):
    values, kernels = {}, {}
    for n in range(K.top + 1):
        kernels[n] = harmonic_fibers(K, n)
        values[n] = vn_dimension(chain_subspace(K, n, kernels[n]), check=check)
    return BettiResult(values, "hodge-kernel", kernels)


# exhaustion

def is_subcomplex(A, B):
    if A.groupoid is not B.groupoid and not A.groupoid.same_as(B.groupoid):
        return False
    if A.vertices.points != B.vertices.points:
        return False
    for n in range(A.top + 1):
        lev = set(B.levels[n]) if n <= B.top else set()
        if not set(A.levels[n]) <= lev:
            return False
    return True


class NotSubcomplexError(ValueError):
    pass


def nabla(Ki, Kj, n):
    """dim of the image of H_n(Ki) -> H_n(Kj) on harmonic representatives."""
    if not is_subcomplex(Ki, Kj):
        raise NotSubcomplexError("first complex is not a subcomplex of the second")
    if n > Ki.top:
        return Fraction(0)
    Hi = harmonic_fibers(Ki, n)
    Hj = harmonic_fibers(Kj, n)
    Ci, Cj = Ki.chain_space(n), Kj.chain_space(n)
    image = {}
    for x in Ki.groupoid.atoms:
        cols = Cj.fibers[x]
        pos = {Cj.basis[k]: p for p, k in enumerate(cols)}
        w = [Cj.weights[k] for k in cols]
        Bj = row_basis(Hj[x])
        vecs = []
        for h in Hi[x]:
            ext = [Fraction(0)] * len(cols)
            for k, c in zip(Ci.fibers[x], h):
                ext[pos[Ci.basis[k]]] = c
            vecs.append(project(Bj, ext, w))
        image[x] = vecs
    return vn_dimension(chain_subspace(Kj, n, image), check=False)


@dataclass
class ExhaustionTable:
    level: int
    table: dict
    limit: Fraction
    increasing_in_i: bool
    decreasing_in_j: bool

    @property
    def monotone(self):
        return self.increasing_in_i and self.decreasing_in_j


def betti_via_exhaustion(chain, n):
    """Full nabla_n table for a nested chain and its double limit."""
    for a, b in zip(chain, chain[1:]):
        if not is_subcomplex(a, b):
            raise NotSubcomplexError("chain is not nested")
    m = len(chain)
    table = {(i, j): nabla(chain[i], chain[j], n) for i in range(m) for j in range(i, m)}
    inc = all(table[(i, j)] <= table[(i + 1, j)]
              for i in range(m) for j in range(i + 1, m))
    dec = all(table[(i, j)] >= table[(i, j + 1)]
              for i in range(m) for j in range(i, m - 1))
    limit = table[(m - 1, m - 1)]
    return ExhaustionTable(n, table, limit, inc, dec)


@dataclass
class Step2Report:
    bound: int
    worst: int
    holds: bool


def _step2_bound(N, k):
    total = 0
    for n in range(k):
        total += N ** n * math.prod(range(k - n, k + 1))
    return total


def eg_truncation(G, N, k, dim_cap=2, pieces=None):
    """Sigma_k inside the N-fold universal complex.

    Vertices are G x {1..N}.  A tuple of distinct vertices over x is a
    simplex when some c in r^-1(x) satisfies g_j^-1 c in E~_k for every
    entry; this makes the levels closed under faces and permutations and
    forces consecutive quotients into E~_k E~_k^-1.
    """
    if pieces is None:
        pieces = one_sheeted_decomposition(G)
    Ek = set().union(*pieces[:k]) if k > 0 else set()
    V = copies(G, N)
    levels = [[(v,) for v in V.points]]
    stars = {}
    for c in G.arrows:
        star = [G.compose(c, G.inv(h)) for h in Ek if G.s(h) == G.s(c)]
        stars[c] = sorted({(g, i) for g in star for i in range(1, N + 1)},
                          key=V.index.__getitem__)
    for n in range(1, dim_cap + 1):
        lev = set()
        for c, star in stars.items():
            if len(star) > n:
                lev.update(permutations(star, n + 1))
        if not lev:
            break
        levels.append(lev)
    K = GComplex(V, levels, name=f"eg(N={N},k={k})")
    counts = {v: 0 for v in V.points}
    for lev in K.levels:
        for t in lev:
            key = K.key(t)
            if all(a < b for a, b in zip(key, key[1:])):
                for v in t:
                    counts[v] += 1
    bound = _step2_bound(N, k)
    worst = max(counts.values(), default=0)
    K.step2 = Step2Report(bound, worst, worst <= bound)
    return K


# groupoid level

@dataclass
class GroupoidBetti:
    beta0: Fraction
    beta1_upper: Fraction
    exact1: bool
    generators: tuple


def groupoid_complex(G, budget=200000):
    """Connected graphing complex from a cheapest generating set.

    A treeing is used when one exists, so the fibres are trees.
    """
    from .cost import find_treeing, minimal_cost

    cert = minimal_cost(G, budget=budget)
    gens = tuple(cert.arrows)
    K = build_graphing_complex(G, [{a} for a in gens])
    if not is_tree_fibered(K):
        tr = find_treeing(G, budget=budget)
        if tr is not None:
            gens = tuple(sorted(set().union(*tr)))
            K = build_graphing_complex(G, [{a} for a in gens])
    return K, gens


def betti_groupoid(G, budget=200000):
    K, gens = groupoid_complex(G, budget)
    b = betti_all(K)
    return GroupoidBetti(b[0], b.values.get(1, Fraction(0)), is_tree_fibered(K), gens)


# Euler characteristic and Morse inequalities

@dataclass
class EulerReport:
    chi: Fraction
    chi2: Fraction

    @property
    def equal(self):
        return self.chi == self.chi2


def euler(K):
    chi = sum(((-1) ** n * alpha(K, n).value for n in range(K.top + 1)), Fraction(0))
    chi2 = sum(((-1) ** n * betti_complex(K, n) for n in range(K.top + 1)), Fraction(0))
    return EulerReport(chi, chi2)


@dataclass
class MorseReport:
    level: int
    alpha_side: Fraction
    beta_side: Fraction
    gap: Fraction
    next_boundary: Fraction

    @property
    def holds(self):
        """alpha side >= beta side, with the gap equal to b_{n+1}."""
        return self.gap >= 0 and self.gap == self.next_boundary

    @property
    def stated_sign_holds(self):
        """The inequality with the alpha side on the small end."""
        return self.alpha_side <= self.beta_side


def morse_check(K, n):
    """From-top alternating sums of alpha and beta up to degree n."""
    a = sum(((-1) ** (n - k) * alpha(K, k).value for k in range(n + 1)), Fraction(0))
    b = sum(((-1) ** (n - k) * betti_complex(K, k) for k in range(n + 1)), Fraction(0))
    return MorseReport(n, a, b, a - b, boundary_dimension(K, n + 1))

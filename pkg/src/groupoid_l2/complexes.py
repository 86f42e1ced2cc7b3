"""Simplicial G-complexes with their chain spaces and boundary operators.

Level n of a complex is a set of ordered (n+1)-tuples of vertices with a
common anchor.  Chains are handled in the oriented basis: one sorted tuple
per unordered simplex, weighted by the mass of its anchor.  The boundary is
the classical alternating sum of faces in that basis; kernels and images
agree with those of the ordered-tuple formula, which is (n+1) times it.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from .groupoid import GroupoidError
from .gspace import (
    GSpace, check_quasi_periodic, free_witness, regular_space,
)
from .hilbert import InvariantSubspace, gamma2_dimension, vn_dimension  # noqa: F401
from .linalg import LinearOperator, zeros


def parity(seq):
    """+1 or -1: sign of the permutation sorting ``seq`` (distinct entries)."""
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


class GComplex:
    """Graded family of G-invariant tuple sets over a vertex G-space."""

    def __init__(self, vertices, levels, name=None):
        self.vertices = vertices
        self.groupoid = vertices.groupoid
        self.name = name
        vidx = vertices.index
        self.levels = []
        for n, lev in enumerate(levels):
            tuples = sorted({tuple(t) for t in lev}, key=lambda t: [vidx[v] for v in t])
            self.levels.append(tuples)
        if not self.levels:
            self.levels.append([(v,) for v in vertices.points])
        self._spaces = {}
        self._chains = {}

    @property
    def top(self):
        return len(self.levels) - 1

    def key(self, t):
        return tuple(self.vertices.index[v] for v in t)

    def level_space(self, n):
        """Level n as a G-space under the diagonal action."""
        if n not in self._spaces:
            V = self.vertices
            self._spaces[n] = GSpace(
                self.groupoid, self.levels[n], {t: V.anchor[t[0]] for t in self.levels[n]},
                lambda g, t: tuple(V.act(g, v) for v in t))
        return self._spaces[n]

    def chain_space(self, n):
        if n not in self._chains:
            self._chains[n] = ChainSpace.build(self, n)
        return self._chains[n]

    def __repr__(self):
        return f"GComplex(levels={[len(l) for l in self.levels]})"


@dataclass
class ChainSpace:
    """Antisymmetric chains on level n in the oriented basis."""

    level: int
    basis: list
    index: dict
    weights: list
    fibers: dict = field(default_factory=dict)

    @classmethod
    def build(cls, K, n):
        if n < 0 or n > K.top:
            return cls(n, [], {}, [], {x: [] for x in K.groupoid.atoms})
        V = K.vertices
        seen = {}
        for t in K.levels[n]:
            s = tuple(sorted(t, key=V.index.__getitem__))
            seen[s] = None
        basis = sorted(seen, key=K.key)
        index = {s: i for i, s in enumerate(basis)}
        weights = [V.weight(s[0]) for s in basis]
        fibers = {x: [] for x in K.groupoid.atoms}
        for i, s in enumerate(basis):
            fibers[V.anchor[s[0]]].append(i)
        return cls(n, basis, index, weights, fibers)

    def __len__(self):
        return len(self.basis)


def oriented(K, t):
    """(basis simplex, sign) for an ordered tuple."""
    keys = K.key(t)
    s = tuple(v for _, v in sorted(zip(keys, t)))
    return s, parity(keys)


# graphing complexes

def build_graphing_complex(G, graphing):
    """Sigma_E: level 0 = G anchored by r, level 1 = pairs joined by some E."""
    members = [frozenset(E) for E in graphing]
    union = set()
    for E in members:
        if union & E:
            raise GroupoidError("graphing members are not disjoint")
        union |= E
    V = regular_space(G)
    edges = []
    for x in G.atoms:
        fib = V.fiber(x)
        for g0 in fib:
            for g1 in fib:
                if g0 == g1:
                    continue
                if (G.compose(G.inv(g0), g1) in union
                        or G.compose(G.inv(g1), g0) in union):
                    edges.append((g0, g1))
    return GComplex(V, [[(g,) for g in G.arrows], edges], name="graphing")


# validation

@dataclass
class ComplexReport:
    valid: bool
    violations: list
    ulb_bound: int
    fundamental_domain_measures: list

    def __bool__(self):
        return self.valid


def validate_complex(K):
    """Check the simplicial G-complex axioms and compute the ULB bound N."""
    V = K.vertices
    G = K.groupoid
    bad = []
    levels = [set(l) for l in K.levels]
    if free_witness(V) is not None:
        g, v = free_witness(V)
        bad.append(f"level 0: action not free ({g} fixes {v!r})")
    for n, lev in enumerate(levels):
        for t in lev:
            if len(t) != n + 1:
                bad.append(f"level {n}: tuple {t!r} has wrong length")
                continue
            if any(v not in V.index for v in t):
                bad.append(f"level {n}: tuple {t!r} uses unknown vertices")
                continue
            if n >= 1 and t[0] == t[1]:
                bad.append(f"level {n}: non-degeneracy v0 != v1 fails at {t!r}")
            if len({V.anchor[v] for v in t}) != 1:
                bad.append(f"level {n}: tuple {t!r} has unequal anchors")
            for p in permutations(t):
                if p not in lev:
                    bad.append(f"level {n}: permutation closure fails, {p!r} missing")
                    break
            if n >= 1:
                for j in range(n + 1):
                    face = t[:j] + t[j + 1:]
                    if face not in levels[n - 1]:
                        bad.append(f"level {n}: face closure fails, {face!r} missing")
                        break
    if not bad:
        for n, lev in enumerate(levels):
            for t in lev:
                for g in G.with_source(V.anchor[t[0]]):
                    gt = tuple(V.act(g, v) for v in t)
                    if gt not in lev:
                        bad.append(f"level {n}: not G-invariant, {g}.{t!r} missing")
                        break
                    if gt == t and not G.is_unit(g):
                        bad.append(f"level {n}: action not free, {g} fixes {t!r}")
                        break
    count = {v: 0 for v in V.points}
    for n, lev in enumerate(levels):
        for t in lev:
            if any(v not in V.index for v in t):
                continue
            k = K.key(t)
            if all(a < b for a, b in zip(k, k[1:])):
                for v in t:
                    if v in count:
                        count[v] += 1
    N = max(count.values(), default=0)
    measures = []
    if not bad:
        for n in range(len(levels)):
            measures.append(check_quasi_periodic(K.level_space(n)).measure)
    return ComplexReport(not bad, bad, N, measures)


# boundary and antisymmetrisation

def boundary_matrix(K, n):
    """The boundary C_n -> C_{n-1} in the oriented bases."""
    if n < 1 or n > K.top:
        raise ValueError(f"boundary d_{n} needs levels {n} and {n - 1}")
    src, dst = K.chain_space(n), K.chain_space(n - 1)
    M = zeros(len(dst), len(src))
    for j, s in enumerate(src.basis):
        for i in range(n + 1):
            face = s[:i] + s[i + 1:]
            M[dst.index[face]][j] += (-1) ** i
    return LinearOperator(M, list(src.basis), list(dst.basis),
                          list(src.weights), list(dst.weights))


def zero_operator(K, n_from, n_to):
    src, dst = K.chain_space(n_from), K.chain_space(n_to)
    return LinearOperator(zeros(len(dst), len(src)), list(src.basis), list(dst.basis),
                          list(src.weights), list(dst.weights))


def antisymmetrize(K, n, f):
    """(A_n f)(u) = ((n+1)!)^-1 sum_sigma sgn(sigma) f(sigma^-1 u).

    ``f`` maps ordered level-n tuples to scalars (missing keys are zero).
    """
    fact = math.factorial(n + 1)
    out = {}
    for t in K.levels[n]:
        acc = Fraction(0)
        for perm in permutations(range(n + 1)):
            val = f.get(tuple(t[i] for i in perm), 0)
            if val:
                acc += parity(perm) * val
        if acc:
            out[t] = acc / fact
    return out


def embed_fiber(K, n, x, vectors):
    """Oriented chains on fibre x as antisymmetric vectors on level-n tuples."""
    U = K.level_space(n)
    C = K.chain_space(n)
    pos = {t: i for i, t in enumerate(U.fiber(x))}
    rows = C.fibers[x]
    out = []
    for v in vectors:
        w = [Fraction(0)] * len(pos)
        for k, c in zip(rows, v):
            if c == 0:
                continue
            s = C.basis[k]
            for perm in permutations(range(n + 1)):
                w[pos[tuple(s[i] for i in perm)]] = parity(perm) * c
        out.append(w)
    return out


def chain_subspace(K, n, fiber_vectors):
    """Invariant subspace of Gamma(Sigma^(n)) from oriented per-fibre vectors."""
    U = K.level_space(n)
    return InvariantSubspace.from_fibers(
        U, {x: embed_fiber(K, n, x, vs) for x, vs in fiber_vectors.items()})


def full_chain_subspace(K, n):
    C = K.chain_space(n)
    fibers = {}
    for x, rows in C.fibers.items():
        m = len(rows)
        fibers[x] = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    return chain_subspace(K, n, fibers)


@dataclass
class AlphaResult:
    level: int
    by_domain: Fraction
    by_dimension: Fraction

    @property
    def agree(self):
        return self.by_domain == self.by_dimension

    @property
    def value(self):
        return self.by_domain


def alpha(K, n, check=True):
    """alpha_n two ways: domain measure / (n+1)! and dim of the image of A_n."""
    U = K.level_space(n)
    F = check_quasi_periodic(U)
    by_domain = F.measure / math.factorial(n + 1)
    by_dim = vn_dimension(full_chain_subspace(K, n), check=check)
    return AlphaResult(n, by_domain, by_dim)


# fibres

@dataclass
class FiberInfo:
    atom: object
    vertices: int
    edges: int
    connected: bool
    tree: object  # bool, or None when the complex has dimension > 1


def _components(nodes, edges):
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(v) for v in nodes})


def fiber_report(K):
    """Per-atom fibre statistics together with the tree test."""
    V = K.vertices
    C1 = K.chain_space(1)
    out = []
    for x in K.groupoid.atoms:
        nodes = V.fiber(x)
        edges = [C1.basis[i] for i in C1.fibers[x]] if K.top >= 1 else []
        conn = _components(nodes, edges) <= 1
        tree = None
        if K.top <= 1 or not K.levels[2]:
            tree = conn and len(edges) == len(nodes) - 1
        out.append(FiberInfo(x, len(nodes), len(edges), conn, tree))
    return out


def is_tree_fibered(K):
    return all(f.tree for f in fiber_report(K))


@dataclass
class NormCheck:
    level: int
    norm: float
    ulb_bound: int
    stated_bound: float
    provable_bound: float

    @property
    def stated_holds(self):
        return self.norm <= self.stated_bound + 1e-9

    @property
    def provable_holds(self):
        return self.norm <= self.provable_bound + 1e-9


def norm_bound_check(K, n, N=None):
    """Float operator norm of d_n against n sqrt(N) and sqrt((n+1) N)."""
    if N is None:
        N = validate_complex(K).ulb_bound
    nrm = boundary_matrix(K, n).float_norm()
    return NormCheck(n, nrm, N, n * math.sqrt(N), math.sqrt((n + 1) * N))

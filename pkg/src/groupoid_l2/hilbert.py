"""The groupoid ring with its trace, and von Neumann dimension.

Vectors of a G-space Hilbert module are stored fibre by fibre: the module
Gamma(U) splits as the orthogonal sum of the fibres U_x, and an invariant
subspace V splits accordingly as the sum of V_x = 1_x V.  Every dimension
is computed exactly over the rationals; a floating-point route exists only
as an optional cross-check.
"""

from fractions import Fraction

from .groupoid import GroupoidError, is_one_sheeted
from .gspace import quasi_periodic_decomposition, regular_space
from .linalg import (
    GaussianRational, InternalError, LinearOperator, conj, float_projection_trace,
    row_basis, rref, weighted_projection_trace,
)

ZERO = GaussianRational(0)


class ArrowFunction:
    """Finitely supported function on the arrows of G (an element of C[G])."""

    __slots__ = ("groupoid", "values")

    def __init__(self, G, values=None):
        self.groupoid = G
        vals = {}
        for g, v in (values or {}).items():
            if g not in G.arrow:
                raise GroupoidError(f"unknown arrow {g}")
            v = GaussianRational.lift(v)
            if v:
                vals[g] = v
        self.values = vals

    def __call__(self, g):
        return self.values.get(g, ZERO)

    @property
    def support(self):
        return frozenset(self.values)

    def _same(self, other):
        if self.groupoid is not other.groupoid and not self.groupoid.same_as(other.groupoid):
            raise GroupoidError("arrow functions live on different groupoids")

    def __add__(self, other):
        self._same(other)
        out = dict(self.values)
        for g, v in other.values.items():
            out[g] = out.get(g, ZERO) + v
        return ArrowFunction(self.groupoid, out)

    def __neg__(self):
        return ArrowFunction(self.groupoid, {g: -v for g, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return ArrowFunction(self.groupoid, {g: c * v for g, v in self.values.items()})

    def __mul__(self, other):
        if isinstance(other, ArrowFunction):
            return convolve(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, ArrowFunction):
            return NotImplemented
        return self.groupoid.same_as(other.groupoid) and self.values == other.values

    def __repr__(self):
        inner = ", ".join(f"{g}: {v}" for g, v in sorted(self.values.items()))
        return f"ArrowFunction({{{inner}}})"


def indicator(G, B):
    return ArrowFunction(G, {g: 1 for g in B})


def unit_function(G):
    return indicator(G, G.unit_arrows)


def convolve(f1, f2):
    """(f1 f2)(g) = sum over g1 g2 = g of f1(g1) f2(g2)."""
    f1._same(f2)
    G = f1.groupoid
    by_range = {}
    for g2, v in f2.values.items():
        by_range.setdefault(G.r(g2), []).append((g2, v))
    out = {}
    for g1, a in f1.values.items():
        for g2, b in by_range.get(G.s(g1), ()):
            g = G.compose(g1, g2)
            out[g] = out.get(g, ZERO) + a * b
    return ArrowFunction(G, out)


def adjoint(f):
    """f*(g) = conj(f(g^-1))."""
    G = f.groupoid
    return ArrowFunction(G, {G.inv(g): conj(v) for g, v in f.values.items()})


def u(G, E):
    """The partial isometry 1_E of a one-sheeted set E."""
    if not is_one_sheeted(G, E):
        raise GroupoidError("arrow set is not one-sheeted")
    return indicator(G, E)


def trace(f):
    """tau(f) = sum_x f(unit_x) mu(x)."""
    G = f.groupoid
    return sum((f(G.unit[x]) * G.weight[x] for x in G.atoms), ZERO)


def conditional_expectation(f):
    """Restriction of f to the unit arrows."""
    G = f.groupoid
    return ArrowFunction(G, {g: v for g, v in f.values.items() if G.is_unit(g)})


def l2_weights(G):
    """Weights of the arrow basis of L^2(G, mu^G): the source mass."""
    return [G.weight[G.s(g)] for g in G.arrows]


def regular_rep(f):
    """Left convolution by f on L^2(G, mu^G) in the arrow basis."""
    G = f.groupoid
    idx = {g: i for i, g in enumerate(G.arrows)}
    n = len(G.arrows)
    M = [[Fraction(0)] * n for _ in range(n)]
    for g1, a in f.values.items():
        for g2 in G.with_range(G.s(g1)):
            i, j = idx[G.compose(g1, g2)], idx[g2]
            M[i][j] = M[i][j] + a
    w = l2_weights(G)
    return LinearOperator(M, list(G.arrows), list(G.arrows), w, list(w))


def arrow_vector(f):
    """f as a coordinate vector in the arrow basis."""
    return [f(g) for g in f.groupoid.arrows]


# invariant subspaces of Gamma(U)

class NotInvariantError(ValueError):
    def __init__(self, arrow, vector):
        super().__init__(f"subspace not invariant under translation by {arrow}")
        self.arrow = arrow
        self.vector = vector


def _in_span(basis, pivots, v):
    """Membership of v in the row space of an RREF basis."""
    v = list(v)
    for row, c in zip(basis, pivots):
        if v[c] != 0:
            k = v[c]
            v = [a - k * b for a, b in zip(v, row)]
    return all(x == 0 for x in v)


class InvariantSubspace:
    """A subspace of Gamma(U) given by spanning vectors.

    ``vectors`` are lists of coordinates in ``space.points`` order.  Use
    ``from_fibers`` to pass per-fibre bases directly.
    """

    def __init__(self, space, vectors=(), _fibers=None):
        self.space = space
        U = space
        if _fibers is None:
            vectors = [list(v) for v in vectors]
            for v in vectors:
                if len(v) != len(U.points):
                    raise ValueError("vector length does not match the G-space")
            self.vectors = vectors
            _fibers = {}
            for x in U.groupoid.atoms:
                cols = [U.index[p] for p in U.fiber(x)]
                _fibers[x] = [[v[c] for c in cols] for v in vectors]
            self._split_ok = None
        else:
            self.vectors = None
            self._split_ok = True
        self._bases = {}
        for x, vs in _fibers.items():
            B = row_basis(vs)
            piv = rref(B)[1] if B else []
            self._bases[x] = (B, piv)

    @classmethod
    def from_fibers(cls, space, fibers):
        """``fibers`` maps each atom x to vectors over ``space.fiber(x)``."""
        full = {x: list(fibers.get(x, ())) for x in space.groupoid.atoms}
        return cls(space, _fibers=full)

    @classmethod
    def full(cls, space):
        fibers = {}
        for x in space.groupoid.atoms:
            n = len(space.fiber(x))
            fibers[x] = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        return cls.from_fibers(space, fibers)

    @classmethod
    def zero(cls, space):
        return cls.from_fibers(space, {})

    def fiber_basis(self, x):
        return self._bases[x][0]

    def rational_rank(self):
        return sum(len(B) for B, _ in self._bases.values())

    def contains_fiber_vector(self, x, v):
        B, piv = self._bases[x]
        return _in_span(B, piv, v)

    def _splits(self):
        """Whether V contains 1_x v for every spanning v (invariance under units)."""
        if self._split_ok is None:
            multi = [v for v in self.vectors
                     if len({self.space.anchor[p] for p, c in zip(self.space.points, v) if c != 0}) > 1]
            if not multi:
                self._split_ok = True
            else:
                self._split_ok = len(row_basis(self.vectors)) == self.rational_rank()
        return self._split_ok

    def invariance_witness(self):
        """None if V is invariant under every translation, else (arrow, vector)."""
        U = self.space
        G = U.groupoid
        if not self._splits():
            return next(iter(G.unit_arrows)), None
        pos = {x: {p: i for i, p in enumerate(U.fiber(x))} for x in G.atoms}
        for g in G.arrows:
            if G.is_unit(g):
                continue
            x, y = G.s(g), G.r(g)
            src, dst = U.fiber(x), pos[y]
            for b in self.fiber_basis(x):
                t = [Fraction(0)] * len(dst)
                for p, c in zip(src, b):
                    if c != 0:
                        t[dst[U.act(g, p)]] = c
                if not self.contains_fiber_vector(y, t):
                    return g, b
        return None

    def is_invariant(self):
        return self.invariance_witness() is None

    def __add__(self, other):
        """Sum of subspaces of the same space (direct when orthogonal)."""
        if other.space is not self.space:
            raise ValueError("subspaces of different G-spaces")
        return InvariantSubspace.from_fibers(
            self.space, {x: self.fiber_basis(x) + other.fiber_basis(x)
                         for x in self.space.groupoid.atoms})

    def is_contained_in(self, other):
        return all(other.contains_fiber_vector(x, v)
                   for x in self.space.groupoid.atoms for v in self.fiber_basis(x))


def _probes_by_fiber(U, sections):
    out = {}
    for sec in sections:
        for f in sec.points:
            x = U.anchor[f]
            out.setdefault(x, []).append(U.fiber(x).index(f))
    return out


def vn_dimension(V, choose="min", split="greedy", check=True, cross_check=False):
    """dim_{L(G)} V = sum_i <P_V 1_{F_i}, 1_{F_i}> over sections F_i.

    Each section meets every fibre at most once and P_V is block diagonal
    along fibres, so every term splits into one exact projection trace per
    fibre.
    """
    U = V.space
    if check:
        w = V.invariance_witness()
        if w is not None:
            raise NotInvariantError(*w)
    sections = quasi_periodic_decomposition(U, choose=choose, split=split)
    probes = _probes_by_fiber(U, sections)
    total = Fraction(0)
    approx = 0.0
    for x, idxs in probes.items():
        B = V.fiber_basis(x)
        if not B:
            continue
        n = len(U.fiber(x))
        w = [U.groupoid.weight[x]] * n
        ps = [[Fraction(int(i == j)) for j in range(n)] for i in idxs]
        total += weighted_projection_trace(B, ps, w)
        if cross_check:
            approx += float_projection_trace(B, ps, w)
    if isinstance(total, GaussianRational):
        if total.im != 0:
            raise InternalError("dimension has a nonzero imaginary part")
        total = total.re
    if cross_check and abs(float(total) - approx) > 1e-9 * max(1.0, abs(approx)):
        raise InternalError(f"exact dimension {total} disagrees with float {approx}")
    return Fraction(total)


def gamma2_dimension(U, **kw):
    """vn_dimension of the full module Gamma(U)."""
    return vn_dimension(InvariantSubspace.full(U), **kw)


def arrow_subspace(G, vectors):
    """Invariant subspace of L^2(G) (range-anchored G) spanned by arrow vectors."""
    return InvariantSubspace(regular_space(G), vectors)

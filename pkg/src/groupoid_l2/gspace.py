"""Fibred G-spaces and their quasi-periodic sections."""

from dataclasses import dataclass
from fractions import Fraction


class NotFreeError(ValueError):
    """The action has a non-unit arrow fixing a point."""

    def __init__(self, arrow, point):
        super().__init__(f"action not free: {arrow} fixes {point!r}")
        self.arrow = arrow
        self.point = point


class GSpace:
    """Finite set U with anchor pi: U -> atoms and a left action of G.

    ``act(g, u)`` must be defined whenever s(g) == anchor[u].  The full
    action table is tabulated at construction.
    """

    def __init__(self, groupoid, points, anchor, act):
        self.groupoid = groupoid
        self.points = tuple(points)
        self.index = {u: i for i, u in enumerate(self.points)}
        if len(self.index) != len(self.points):
            raise ValueError("duplicate points in G-space")
        self.anchor = {u: anchor[u] for u in self.points}
        G = groupoid
        self.table = {}
        for u in self.points:
            for g in G.with_source(self.anchor[u]):
                self.table[(g, u)] = act(g, u)
        self._fibers = {x: [] for x in G.atoms}
        for u in self.points:
            self._fibers[self.anchor[u]].append(u)

    def act(self, g, u):
        return self.table[(g, u)]

    def fiber(self, x):
        return self._fibers[x]

    def weight(self, u):
        return self.groupoid.weight[self.anchor[u]]

    def measure(self, points):
        return sum((self.weight(u) for u in points), Fraction(0))

    def orbit(self, u):
        G = self.groupoid
        return frozenset(self.table[(g, u)] for g in G.with_source(self.anchor[u]))

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return f"GSpace(points={len(self.points)})"


def validate_gspace(U):
    """Action axioms; returns a list of violations."""
    G = U.groupoid
    bad = []
    for (g, u), v in U.table.items():
        if v not in U.index:
            bad.append(f"{g}.{u!r} leaves the space")
        elif U.anchor[v] != G.r(g):
            bad.append(f"anchor of {g}.{u!r} is not r({g})")
    if bad:
        return bad
    for u in U.points:
        if U.table[(G.unit[U.anchor[u]], u)] != u:
            bad.append(f"unit does not fix {u!r}")
        for g2 in G.with_source(U.anchor[u]):
            v = U.table[(g2, u)]
            for g1 in G.with_source(G.r(g2)):
                if U.table[(g1, v)] != U.table[(G.compose(g1, g2), u)]:
                    bad.append(f"({g1}{g2}).{u!r} != {g1}.({g2}.{u!r})")
    return bad


def is_free(U):
    return free_witness(U) is None


def free_witness(U):
    G = U.groupoid
    for (g, u), v in U.table.items():
        if v == u and not G.is_unit(g):
            return g, u
    return None


# constructors

def regular_space(G):
    """G acting on itself by left translation, anchored by r."""
    return GSpace(G, G.arrows, {g: G.r(g) for g in G.arrows}, G.compose)


def translated_section(G, atoms):
    """G.X1 = {h : s(h) in X1} with left translation, anchored by r."""
    atoms = set(atoms)
    pts = [g for g in G.arrows if G.s(g) in atoms]
    return GSpace(G, pts, {g: G.r(g) for g in pts}, G.compose)


def copies(G, n):
    """G x {1..n} with the diagonal action."""
    pts = [(g, i) for i in range(1, n + 1) for g in G.arrows]
    return GSpace(G, pts, {p: G.r(p[0]) for p in pts},
                  lambda g, p: (G.compose(g, p[0]), p[1]))


def disjoint_union(*spaces):
    G = spaces[0].groupoid
    pts, anchor = [], {}
    for i, U in enumerate(spaces):
        for u in U.points:
            pts.append((i, u))
            anchor[(i, u)] = U.anchor[u]
    return GSpace(G, pts, anchor, lambda g, p: (p[0], spaces[p[0]].act(g, p[1])))


# fundamental domains

@dataclass
class FundamentalDomain:
    points: tuple
    measure: Fraction


def orbits(U):
    seen = set()
    out = []
    for u in U.points:
        if u in seen:
            continue
        o = U.orbit(u)
        seen |= o
        out.append(o)
    return out


def check_quasi_periodic(U, choose="min"):
    """Verify freeness and return an orbit transversal.

    The representative of each orbit is its least point (``choose="min"``)
    or greatest point (``"max"``) in the space's point order.
    """
    w = free_witness(U)
    if w is not None:
        raise NotFreeError(*w)
    pick = min if choose == "min" else max
    reps = tuple(sorted((pick(o, key=U.index.__getitem__) for o in orbits(U)),
                        key=U.index.__getitem__))
    return FundamentalDomain(reps, U.measure(reps))


@dataclass
class Section:
    """A section F_i of a fundamental domain with X_i = pi(F_i).

    ``embedding`` maps every point of G.F_i to the arrow g with point = g.f.
    """

    points: tuple
    atoms: frozenset
    embedding: dict


def quasi_periodic_decomposition(U, choose="min", split="greedy"):
    """Split a fundamental domain into sections on which pi is injective.

    ``split="greedy"`` packs points into the first section missing their
    anchor; ``"singletons"`` makes one section per point.
    """
    F = check_quasi_periodic(U, choose)
    buckets = []
    for f in F.points:
        x = U.anchor[f]
        if split == "greedy":
            for b in buckets:
                if x not in b:
                    b[x] = f
                    break
            else:
                buckets.append({x: f})
        elif split == "singletons":
            buckets.append({x: f})
        else:
            raise ValueError(f"unknown split strategy {split!r}")
    G = U.groupoid
    sections = []
    for b in buckets:
        emb = {}
        for f in b.values():
            for g in G.with_source(U.anchor[f]):
                emb[U.act(g, f)] = g
        sections.append(Section(tuple(b.values()), frozenset(b), emb))
    return sections


def section_measure(U, section):
    return sum((U.groupoid.weight[x] for x in section.atoms), Fraction(0))

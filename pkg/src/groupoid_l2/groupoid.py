"""Finite pmp discrete groupoids.

Composition convention: ``compose(g1, g2)`` is defined iff s(g1) == r(g2),
and then s(g1 g2) = s(g2), r(g1 g2) = r(g1).
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product


def natural_key(ident):
    """Sort key that orders 'g2' before 'g10'."""
    s = str(ident)
    return tuple((0, int(t), "") if t.isdigit() else (1, 0, t)
                 for t in re.findall(r"\d+|\D+", s))


@dataclass(frozen=True)
class Arrow:
    id: str
    source: str
    range: str


class GroupoidError(ValueError):
    pass


class FiniteGroupoid:
    """Finite groupoid over a weighted atomic unit space.

    Weights need not sum to one (restrictions keep the ambient measure);
    ``validate`` reports normalisation separately.
    """

    def __init__(self, weights, arrows, units, inverse, compose):
        self.atoms = tuple(weights)
        self.weight = {x: Fraction(w) for x, w in weights.items()}
        arrows = [a if isinstance(a, Arrow) else Arrow(*a) for a in arrows]
        self.arrow = {a.id: a for a in sorted(arrows, key=lambda a: natural_key(a.id))}
        if len(self.arrow) != len(arrows):
            raise GroupoidError("duplicate arrow id")
        self.arrows = tuple(self.arrow)
        self.unit = dict(units)
        self.inverse = dict(inverse)
        self._compose = dict(compose)
        for a in self.arrow.values():
            if a.source not in self.weight or a.range not in self.weight:
                raise GroupoidError(f"arrow {a.id} has endpoint outside the unit space")
        for x in self.atoms:
            if x not in self.unit:
                raise GroupoidError(f"atom {x} has no unit arrow")
            if self.unit[x] not in self.arrow:
                raise GroupoidError(f"unit {self.unit[x]} is not an arrow")
        for g, h in self.inverse.items():
            if g not in self.arrow or h not in self.arrow:
                raise GroupoidError(f"inverse pair ({g}, {h}) references unknown arrow")
        for (g1, g2), g in self._compose.items():
            for a in (g1, g2, g):
                if a not in self.arrow:
                    raise GroupoidError(f"composition ({g1}, {g2}) -> {g} references unknown arrow")
        self.unit_arrows = frozenset(self.unit.values())
        self._by_source = {x: [] for x in self.atoms}
        self._by_range = {x: [] for x in self.atoms}
        for a in self.arrow.values():
            self._by_source[a.source].append(a.id)
            self._by_range[a.range].append(a.id)

    # basic structure

    def s(self, g):
        return self.arrow[g].source

    def r(self, g):
        return self.arrow[g].range

    def inv(self, g):
        return self.inverse[g]

    def compose(self, g1, g2):
        if self.s(g1) != self.r(g2):
            raise GroupoidError(f"{g1} and {g2} are not composable")
        return self._compose[(g1, g2)]

    def composable(self, g1, g2):
        return self.s(g1) == self.r(g2)

    def is_unit(self, g):
        return g in self.unit_arrows

    def with_source(self, x):
        return self._by_source[x]

    def with_range(self, x):
        return self._by_range[x]

    @property
    def total_mass(self):
        return sum(self.weight.values(), Fraction(0))

    @property
    def non_units(self):
        return tuple(g for g in self.arrows if g not in self.unit_arrows)

    def is_principal(self):
        seen = set()
        for a in self.arrow.values():
            key = (a.range, a.source)
            if key in seen:
                return False
            seen.add(key)
        return True

    def composition_table(self):
        return dict(self._compose)

    def __len__(self):
        return len(self.arrows)

    def __repr__(self):
        return f"FiniteGroupoid(atoms={len(self.atoms)}, arrows={len(self.arrows)})"

    def same_as(self, other):
        """Equality of the full data (ids included)."""
        return (self.weight == other.weight and self.arrow == other.arrow
                and self.unit == other.unit and self.inverse == other.inverse
                and self._compose == other._compose)

    def sub(self, arrow_ids, atoms=None):
        """Subgroupoid on the given arrows (assumed closed); keeps weights."""
        keep = set(arrow_ids)
        atoms = self.atoms if atoms is None else [x for x in self.atoms if x in set(atoms)]
        keep |= {self.unit[x] for x in atoms}
        return FiniteGroupoid(
            {x: self.weight[x] for x in atoms},
            [self.arrow[g] for g in keep],
            {x: self.unit[x] for x in atoms},
            {g: self.inverse[g] for g in keep if g in self.inverse and self.inverse[g] in keep},
            {(a, b): c for (a, b), c in self._compose.items()
             if a in keep and b in keep and c in keep},
        )


@dataclass
class ValidationReport:
    valid: bool
    principal: bool
    violations: list = field(default_factory=list)
    total_mass: Fraction = Fraction(1)

    def __bool__(self):
        return self.valid


def validate(G, normalized=True):
    """Check every groupoid axiom and pmp invariance; never raises."""
    bad = []
    for x, w in G.weight.items():
        if w <= 0:
            bad.append(f"nonpositive weight at atom {x}: {w}")
    if normalized and G.total_mass != 1:
        bad.append(f"weights sum to {G.total_mass}, not 1")
    for x in G.atoms:
        u = G.unit[x]
        if G.s(u) != x or G.r(u) != x:
            bad.append(f"unit {u} does not sit at atom {x}")
    for g in G.arrows:
        a = G.arrow[g]
        if G.weight.get(a.source) != G.weight.get(a.range):
            bad.append(f"weight mismatch along {g}: weight(s)={G.weight[a.source]} "
                       f"!= weight(r)={G.weight[a.range]}")
    table = G.composition_table()
    for g1 in G.arrows:
        for g2 in G.with_range(G.s(g1)):
            if (g1, g2) not in table:
                bad.append(f"missing composition for composable pair ({g1}, {g2})")
                continue
            g = table[(g1, g2)]
            if G.s(g) != G.s(g2) or G.r(g) != G.r(g1):
                bad.append(f"composite {g1}*{g2}={g} has wrong endpoints")
    for (g1, g2) in table:
        if G.s(g1) != G.r(g2):
            bad.append(f"composition given for non-composable pair ({g1}, {g2})")
    if bad:
        return ValidationReport(False, G.is_principal(), bad, G.total_mass)
    for g in G.arrows:
        if table[(g, G.unit[G.s(g)])] != g or table[(G.unit[G.r(g)], g)] != g:
            bad.append(f"unit law fails at {g}")
        h = G.inverse.get(g)
        if h is None:
            bad.append(f"{g} has no inverse")
            continue
        if G.inverse.get(h) != g:
            bad.append(f"inverse is not involutive at {g}")
        if G.s(h) != G.r(g) or G.r(h) != G.s(g):
            bad.append(f"inverse of {g} has wrong endpoints")
            continue
        if table[(g, h)] != G.unit[G.r(g)] or table[(h, g)] != G.unit[G.s(g)]:
            bad.append(f"inverse law fails at {g}")
    for g1 in G.arrows:
        for g2 in G.with_range(G.s(g1)):
            g12 = table[(g1, g2)]
            for g3 in G.with_range(G.s(g2)):
                if table[(g12, g3)] != table[(g1, table[(g2, g3)])]:
                    bad.append(f"associativity fails at ({g1}, {g2}, {g3})")
    return ValidationReport(not bad, G.is_principal(), bad, G.total_mass)


def check(G, normalized=True):
    rep = validate(G, normalized)
    if not rep.valid:
        raise GroupoidError("; ".join(rep.violations[:5]))
    return G


# arrow sets

def _require_arrows(G, B):
    missing = [g for g in B if g not in G.arrow]
    if missing:
        raise GroupoidError(f"arrows not in groupoid: {missing}")


def mu_g(G, B):
    """mu^G(B): sum of source weights."""
    _require_arrows(G, B)
    return sum((G.weight[G.s(g)] for g in set(B)), Fraction(0))


def is_one_sheeted(G, E):
    E = list(E)
    return (len({G.s(g) for g in E}) == len(E)
            and len({G.r(g) for g in E}) == len(E))


def inverse_set(G, E):
    return frozenset(G.inv(g) for g in E)


def one_sheeted_decomposition(G):
    """Greedy split of the arrows into disjoint one-sheeted pieces.

    The first piece is the unit set.  Non-unit arrows are scanned in id
    order and put in the first piece whose sources and ranges they avoid and
    which does not already hold their inverse.
    """
    pieces = [set(G.unit_arrows)]
    srcs, rngs = [set()], [set()]
    for g in G.non_units:
        s, r, h = G.s(g), G.r(g), G.inv(g)
        for i in range(1, len(pieces)):
            if s not in srcs[i] and r not in rngs[i] and (h == g or h not in pieces[i]):
                break
        else:
            pieces.append(set())
            srcs.append(set())
            rngs.append(set())
            i = len(pieces) - 1
        pieces[i].add(g)
        srcs[i].add(s)
        rngs[i].add(r)
    return [frozenset(p) for p in pieces]


def partial_bijection(G, E):
    """phi_E = r o (s|_E)^-1 as a dict s(E) -> r(E)."""
    _require_arrows(G, E)
    if not is_one_sheeted(G, E):
        raise GroupoidError("arrow set is not one-sheeted")
    return {G.s(g): G.r(g) for g in E}


def closure(G, A):
    """Arrow ids of the subgroupoid generated by A (units always included)."""
    gens = set(A) | {G.inv(a) for a in A}
    found = set(G.unit_arrows)
    todo = list(found)
    # left-multiply by generators: a * h needs s(a) == r(h)
    gens_by_source = {}
    for a in gens:
        gens_by_source.setdefault(G.s(a), []).append(a)
    while todo:
        h = todo.pop()
        for a in gens_by_source.get(G.r(h), ()):
            g = G.compose(a, h)
            if g not in found:
                found.add(g)
                todo.append(g)
    return frozenset(found)


def generated_subgroupoid(G, A):
    _require_arrows(G, A)
    return G.sub(closure(G, A))


def restriction(G, Y):
    """G restricted to atoms Y (arrows with both ends in Y); weights kept."""
    Y = set(Y)
    if not Y:
        raise GroupoidError("restriction to an empty set")
    if not Y <= set(G.atoms):
        raise GroupoidError(f"not atoms of the groupoid: {sorted(Y - set(G.atoms))}")
    keep = [g for g in G.arrows if G.s(g) in Y and G.r(g) in Y]
    return G.sub(keep, atoms=Y)


def relation_groupoid(weights, pairs=None, name=None):
    """Principal groupoid on ``weights`` containing the given (range, source)
    pairs; ``pairs=None`` means the full relation.  Pairs must already form an
    equivalence relation.  Arrow ids: the atom for units, 'x>y' for the
    arrow with source x and range y."""
    atoms = list(weights)
    if pairs is None:
        pairs = [(y, x) for y in atoms for x in atoms]
    pairs = set(pairs) | {(x, x) for x in atoms}
    name = name or (lambda y, x: x if x == y else f"{x}>{y}")
    ids = {p: name(*p) for p in pairs}
    arrows = [Arrow(ids[(y, x)], x, y) for (y, x) in pairs]
    units = {x: ids[(x, x)] for x in atoms}
    inverse = {ids[(y, x)]: ids[(x, y)] for (y, x) in pairs}
    compose = {}
    for (z, y1) in pairs:
        for (y2, x) in pairs:
            if y1 == y2:
                compose[(ids[(z, y1)], ids[(y2, x)])] = ids[(z, x)]
    return FiniteGroupoid(weights, arrows, units, inverse, compose)


def orbit_relation(G):
    """The principal groupoid (r x s)(G) on the same units."""
    pairs = {(G.r(g), G.s(g)) for g in G.arrows}
    return relation_groupoid(G.weight, pairs,
                             name=lambda y, x: G.unit[x] if x == y else f"{x}>{y}")


@dataclass
class InvariantPartition:
    blocks: list

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self):
        return len(self.blocks)


def orbit(G, x):
    return frozenset(G.r(g) for g in G.with_source(x))


def invariant_partition(G):
    seen = set()
    blocks = []
    for x in G.atoms:
        if x in seen:
            continue
        # orbits of a groupoid are already closed; BFS guards malformed input
        block, todo = {x}, [x]
        while todo:
            y = todo.pop()
            for z in orbit(G, y) | {G.s(g) for g in G.with_range(y)}:
                if z not in block:
                    block.add(z)
                    todo.append(z)
        seen |= block
        blocks.append(frozenset(block))
    return InvariantPartition(blocks)


@dataclass
class FiniteGroup:
    elements: tuple
    identity: object
    mul: dict

    def inverse(self, a):
        return next(b for b in self.elements if self.mul[(a, b)] == self.identity)

    @property
    def order(self):
        return len(self.elements)

    def is_group(self):
        E = self.elements
        if any((a, b) not in self.mul or self.mul[(a, b)] not in E for a in E for b in E):
            return False
        if any(self.mul[(self.identity, a)] != a or self.mul[(a, self.identity)] != a for a in E):
            return False
        if any(all(self.mul[(a, b)] != self.identity for b in E) for a in E):
            return False
        return all(self.mul[(self.mul[(a, b)], c)] == self.mul[(a, self.mul[(b, c)])]
                   for a in E for b in E for c in E)


def cyclic_group(n):
    E = tuple(range(n))
    return FiniteGroup(E, 0, {(a, b): (a + b) % n for a in E for b in E})


def product_group(H, K):
    E = tuple(product(H.elements, K.elements))
    mul = {((a1, b1), (a2, b2)): (H.mul[(a1, a2)], K.mul[(b1, b2)])
           for (a1, b1) in E for (a2, b2) in E}
    return FiniteGroup(E, (H.identity, K.identity), mul)


def isotropy(G, x):
    elems = tuple(g for g in G.with_source(x) if G.r(g) == x)
    mul = {(a, b): G.compose(a, b) for a in elems for b in elems}
    return FiniteGroup(elems, G.unit[x], mul)


def transformation_groupoid(group, action, weights):
    """X x| Gamma for a right action x.gamma = action[(x, gamma)].

    Arrow (x, gamma) has range x and source x.gamma; ids are 'x.gamma'.
    """
    if not group.is_group():
        raise GroupoidError("multiplication table is not a group")
    atoms = list(weights)
    E = group.elements
    for x in atoms:
        if action[(x, group.identity)] != x:
            raise GroupoidError("identity does not act trivially")
        for a in E:
            for b in E:
                if action[(action[(x, a)], b)] != action[(x, group.mul[(a, b)])]:
                    raise GroupoidError("not a right action")
            if Fraction(weights[action[(x, a)]]) != Fraction(weights[x]):
                raise GroupoidError(f"action of {a} does not preserve the measure at {x}")

    def ident(x, g):
        return f"{x}.{g}" if not isinstance(g, tuple) else f"{x}." + ",".join(map(str, g))

    arrows = [Arrow(ident(x, g), action[(x, g)], x) for x in atoms for g in E]
    units = {x: ident(x, group.identity) for x in atoms}
    inverse = {}
    compose = {}
    for x in atoms:
        for g in E:
            gi = group.inverse(g)
            inverse[ident(x, g)] = ident(action[(x, g)], gi)
            y = action[(x, g)]
            for h in E:
                compose[(ident(x, g), ident(y, h))] = ident(x, group.mul[(g, h)])
    return FiniteGroupoid(weights, arrows, units, inverse, compose)

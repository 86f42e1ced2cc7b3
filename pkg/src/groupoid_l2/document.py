"""The line-oriented .gpd document format and random instances.

A document is a sequence of lines (``#`` starts a comment)::

    unit x x 1/2            unit <unit-arrow-id> <atom> <weight>
    arrow f x y             arrow <id> <source> <range>
    inverse f f-1           inverse <g> <g^-1>
    compose f f-1 y         compose <g1> <g2> <g1 g2>
    graphing E f ; f-1      graphing <name> <ids> ; <ids> ...
    subgroupoid G1 f f-1    subgroupoid <name> <ids>
    subset Y x              subset <name> <atoms>

Unit arrows are self-inverse and composition with a unit on either side is
implied; every other composable pair needs a ``compose`` line.
"""

import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .groupoid import (
    Arrow, FiniteGroupoid, GroupoidError, natural_key, validate,
)


class DocumentError(ValueError):
    """Any problem turning text into a valid groupoid (exit code 2)."""

    kind = "error"


class ParseError(DocumentError):
    kind = "parse"

    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SemanticError(DocumentError):
    kind = "semantic"


class ValidationFailure(DocumentError):
    kind = "validation"

    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass
class Document:
    groupoid: FiniteGroupoid
    graphings: dict = field(default_factory=dict)
    subgroupoids: dict = field(default_factory=dict)
    subsets: dict = field(default_factory=dict)

    def digest(self):
        return hashlib.sha256(serialize(self).encode()).hexdigest()[:16]


_ARITY = {"unit": 3, "arrow": 3, "inverse": 2, "compose": 3}


def _weight(text, lineno):
    try:
        w = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(lineno, f"bad weight {text!r}") from None
    if w <= 0:
        raise SemanticError(f"line {lineno}: nonpositive weight {text}")
    return w


def parse(text, validate_result=True):
    units, arrows, inverse, compose = {}, {}, {}, {}
    weights = {}
    named = {"graphing": {}, "subgroupoid": {}, "subset": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head in _ARITY:
            if len(rest) != _ARITY[head]:
                raise ParseError(lineno, f"'{head}' takes {_ARITY[head]} fields, got {len(rest)}")
            if head == "unit":
                uid, atom, w = rest
                if atom in weights:
                    raise SemanticError(f"line {lineno}: duplicate atom {atom}")
                if uid in arrows:
                    raise SemanticError(f"line {lineno}: duplicate arrow id {uid}")
                weights[atom] = _weight(w, lineno)
                units[atom] = uid
                arrows[uid] = (atom, atom, lineno)
            elif head == "arrow":
                aid, src, rng = rest
                if aid in arrows:
                    raise SemanticError(f"line {lineno}: duplicate arrow id {aid}")
                arrows[aid] = (src, rng, lineno)
            elif head == "inverse":
                a, b = rest
                for g, h in ((a, b), (b, a)):
                    if inverse.get(g, h) != h:
                        raise SemanticError(f"line {lineno}: conflicting inverse for {g}")
                    inverse[g] = h
            else:
                g1, g2, g = rest
                if (g1, g2) in compose and compose[(g1, g2)][0] != g:
                    raise SemanticError(f"line {lineno}: conflicting composition for ({g1}, {g2})")
                compose[(g1, g2)] = (g, lineno)
        elif head in named:
            if not rest:
                raise ParseError(lineno, f"'{head}' needs a name")
            name, *ids = rest
            if name in named[head]:
                raise SemanticError(f"line {lineno}: duplicate {head} name {name}")
            if head == "graphing":
                members, cur = [], []
                for tok in ids:
                    if tok == ";":
                        members.append(cur)
                        cur = []
                    else:
                        cur.append(tok)
                members.append(cur)
                named[head][name] = (members, lineno)
            else:
                named[head][name] = (ids, lineno)
        else:
            raise ParseError(lineno, f"unknown directive {head!r}")

    if not weights:
        raise SemanticError("document declares no units")
    for aid, (src, rng, lineno) in arrows.items():
        for end in (src, rng):
            if end not in weights:
                raise SemanticError(f"line {lineno}: arrow {aid} uses unknown atom {end}")
    for g, h in inverse.items():
        for a in (g, h):
            if a not in arrows:
                raise SemanticError(f"inverse refers to unknown arrow {a}")
    for (g1, g2), (g, lineno) in compose.items():
        for a in (g1, g2, g):
            if a not in arrows:
                raise SemanticError(f"line {lineno}: composition refers to unknown arrow {a}")

    unit_ids = set(units.values())
    full_inverse = {u: u for u in unit_ids}
    full_inverse.update(inverse)
    table = {}
    for aid, (src, rng, _) in arrows.items():
        table[(units[rng], aid)] = aid
        table[(aid, units[src])] = aid
    for key, (g, _) in compose.items():
        table[key] = g
    missing_inv = [a for a in arrows if a not in full_inverse]
    if missing_inv:
        raise SemanticError(f"arrow {missing_inv[0]} has no inverse")
    try:
        G = FiniteGroupoid(weights, [Arrow(a, s, r) for a, (s, r, _) in arrows.items()],
                           units, full_inverse, table)
    except GroupoidError as exc:
        raise SemanticError(str(exc)) from None

    doc = Document(G)
    for name, (members, lineno) in named["graphing"].items():
        for m in members:
            for a in m:
                if a not in G.arrow:
                    raise SemanticError(f"line {lineno}: graphing {name} uses unknown arrow {a}")
        doc.graphings[name] = [frozenset(m) for m in members]
    for name, (ids, lineno) in named["subgroupoid"].items():
        for a in ids:
            if a not in G.arrow:
                raise SemanticError(f"line {lineno}: subgroupoid {name} uses unknown arrow {a}")
        doc.subgroupoids[name] = frozenset(ids)
    for name, (ids, lineno) in named["subset"].items():
        for x in ids:
            if x not in G.weight:
                raise SemanticError(f"line {lineno}: subset {name} uses unknown atom {x}")
        doc.subsets[name] = [x for x in G.atoms if x in set(ids)]

    if validate_result:
        rep = validate(G)
        if not rep.valid:
            raise ValidationFailure(rep.violations)
    return doc


def load(path, validate_result=True):
    with open(path) as fh:
        return parse(fh.read(), validate_result)


def _frac(w):
    return f"{w.numerator}/{w.denominator}"


def _ids(ids):
    return " ".join(sorted(ids, key=natural_key))


def serialize(doc):
    """Canonical text: every section sorted by natural id order."""
    if isinstance(doc, FiniteGroupoid):
        doc = Document(doc)
    G = doc.groupoid
    out = []
    for x in sorted(G.atoms, key=natural_key):
        out.append(f"unit {G.unit[x]} {x} {_frac(G.weight[x])}")
    for g in G.non_units:
        out.append(f"arrow {g} {G.s(g)} {G.r(g)}")
    for g in G.non_units:
        h = G.inv(g)
        if natural_key(g) <= natural_key(h):
            out.append(f"inverse {g} {h}")
    triples = [(g1, g2, g) for (g1, g2), g in G.composition_table().items()
               if not G.is_unit(g1) and not G.is_unit(g2)]
    triples.sort(key=lambda t: (natural_key(t[0]), natural_key(t[1])))
    for g1, g2, g in triples:
        out.append(f"compose {g1} {g2} {g}")
    for name in sorted(doc.graphings, key=natural_key):
        out.append(f"graphing {name} " + " ; ".join(_ids(m) for m in doc.graphings[name]))
    for name in sorted(doc.subgroupoids, key=natural_key):
        out.append(f"subgroupoid {name} {_ids(doc.subgroupoids[name])}")
    for name in sorted(doc.subsets, key=natural_key):
        out.append(f"subset {name} {_ids(doc.subsets[name])}")
    return "\n".join(line.rstrip() for line in out) + "\n"


def same_document(a, b):
    return (a.groupoid.same_as(b.groupoid)
            and {k: sorted(map(sorted, v)) for k, v in a.graphings.items()}
            == {k: sorted(map(sorted, v)) for k, v in b.graphings.items()}
            and a.subgroupoids == b.subgroupoids
            and {k: sorted(v) for k, v in a.subsets.items()}
            == {k: sorted(v) for k, v in b.subsets.items()})


# random instances

def _build(orbits, orders, masses):
    total = sum(m * len(o) for o, m in zip(orbits, masses))
    weights, arrows, units, inverse, table = {}, [], {}, {}, {}

    def name(x, y, j, k):
        if k == 1:
            return x if x == y else f"{x}>{y}"
        return x if (x == y and j == 0) else f"{x}>{y}^{j}"

    for orb, k, m in zip(orbits, orders, masses):
        for x in orb:
            weights[x] = Fraction(m, total)
            units[x] = x
        for x in orb:
            for y in orb:
                for j in range(k):
                    g = name(x, y, j, k)
                    arrows.append(Arrow(g, x, y))
                    inverse[g] = name(y, x, (-j) % k, k)
                    for z in orb:
                        for i in range(k):
                            table[(name(y, z, i, k), g)] = name(x, z, (i + j) % k, k)
    return FiniteGroupoid(weights, arrows, units, inverse, table)


def random_groupoid(seed, atoms, isotropy_max=1, arrow_budget=None, tries=200):
    """Deterministic random groupoid: orbits carry full relations times Z/k.

    Orbit masses are random small integers spread uniformly over the atoms
    of each orbit.  When ``arrow_budget`` is given, draws with more arrows
    are rejected and redrawn.
    """
    if atoms < 1 or isotropy_max < 1:
        raise ValueError("need atoms >= 1 and isotropy_max >= 1")
    if arrow_budget is not None and arrow_budget < atoms:
        raise ValueError("arrow budget below the number of units")
    rng = random.Random(seed)
    names = [f"x{i}" for i in range(1, atoms + 1)]
    for _ in range(tries):
        perm = names[:]
        rng.shuffle(perm)
        orbits, cur = [], [perm[0]]
        for x in perm[1:]:
            if rng.random() < 0.5:
                cur.append(x)
            else:
                orbits.append(cur)
                cur = [x]
        orbits.append(cur)
        orbits = [sorted(o, key=natural_key) for o in orbits]
        orbits.sort(key=lambda o: natural_key(o[0]))
        orders = [rng.randint(1, isotropy_max) for _ in orbits]
        masses = [rng.randint(1, 3) for _ in orbits]
        size = sum(len(o) ** 2 * k for o, k in zip(orbits, orders))
        if arrow_budget is None or size <= arrow_budget:
            return _build(orbits, orders, masses)
    raise ValueError("no draw fits the arrow budget")

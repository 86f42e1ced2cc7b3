"""Small named groupoids shared by the tests and the CLI."""

from fractions import Fraction

from .groupoid import (
    Arrow, FiniteGroupoid, cyclic_group, relation_groupoid, transformation_groupoid,
)

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


def triv2():
    """Two atoms of weight 1/2, units only."""
    return relation_groupoid({"x": HALF, "y": HALF}, pairs=[])


def r2():
    """Full relation on {x, y}; f: x -> y and its inverse f-1."""
    names = {("y", "x"): "f", ("x", "y"): "f-1"}
    return relation_groupoid({"x": HALF, "y": HALF},
                             name=lambda y, x: x if x == y else names[(y, x)])


def r3():
    """Full relation on {a, b, c}; arrow 'a>b' goes from a to b."""
    return relation_groupoid({"a": THIRD, "b": THIRD, "c": THIRD})


def z2pt():
    """Z/2 = {e, a} over a single atom of weight 1."""
    return FiniteGroupoid(
        {"pt": 1},
        [Arrow("e", "pt", "pt"), Arrow("a", "pt", "pt")],
        {"pt": "e"},
        {"e": "e", "a": "a"},
        {("e", "e"): "e", ("e", "a"): "a", ("a", "e"): "a", ("a", "a"): "e"},
    )


def swap():
    """Z/2 swapping two atoms of weight 1/2 (isomorphic to R2)."""
    act = {("x", 0): "x", ("y", 0): "y", ("x", 1): "y", ("y", 1): "x"}
    return transformation_groupoid(cyclic_group(2), act, {"x": HALF, "y": HALF})


def triv_action():
    """Z/2 acting trivially on two atoms of weight 1/2."""
    act = {(x, g): x for x in "xy" for g in (0, 1)}
    return transformation_groupoid(cyclic_group(2), act, {"x": HALF, "y": HALF})


def amalg3():
    """R3 with G1 = relation on {a, b} (+ unit c), G2 = relation on {b, c}
    (+ unit a), G3 = G1 n G2 = units.  Returns (G, G1 ids, G2 ids)."""
    G = r3()
    g1 = frozenset(g for g in G.arrows if {G.s(g), G.r(g)} <= {"a", "b"}) | G.unit_arrows
    g2 = frozenset(g for g in G.arrows if {G.s(g), G.r(g)} <= {"b", "c"}) | G.unit_arrows
    return G, g1, g2


def sigma(G=None):
    """The 3-cycle a -> b -> c -> a in R3."""
    return frozenset({"a>b", "b>c", "c>a"})


def sigma2(G=None):
    return frozenset({"a>c", "b>a", "c>b"})


ALL = {
    "triv2": triv2,
    "r2": r2,
    "r3": r3,
    "z2pt": z2pt,
    "swap": swap,
    "trivaction": triv_action,
}

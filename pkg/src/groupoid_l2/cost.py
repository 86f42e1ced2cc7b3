"""Graphings and treeings, with exact minimal cost and the identities it obeys.

Cost is additive over arrows and every single arrow is one-sheeted, so the
cost of G is the least source mass of an arrow set generating G.  The
optimiser searches such sets directly.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .groupoid import (
    GroupoidError, closure, invariant_partition, is_one_sheeted, mu_g, natural_key,
    orbit_relation, restriction,
)

PASS = "pass"
FAIL = "fail"
UNMET = "hypothesis-unmet"
BUDGET = "budget-exhausted"
FLAGGED = "flagged"


class BudgetExhausted(RuntimeError):
    pass


@dataclass
class Verdict:
    ok: bool
    witness: object = None

    def __bool__(self):
        return self.ok


class Graphing:
    """A finite family of one-sheeted arrow sets of G."""

    def __init__(self, G, members):
        self.groupoid = G
        self.members = [frozenset(E) for E in members]
        for E in self.members:
            for g in E:
                if g not in G.arrow:
                    raise GroupoidError(f"unknown arrow {g}")
            if not is_one_sheeted(G, E):
                raise GroupoidError(f"member {sorted(E, key=natural_key)} is not one-sheeted")

    @property
    def union(self):
        return frozenset().union(*self.members) if self.members else frozenset()

    @property
    def cost(self):
        return cost_of_graphing(self)

    def is_disjoint(self):
        seen = set()
        for E in self.members:
            if seen & E:
                return False
            seen |= E
        return True

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __repr__(self):
        inner = ", ".join("{" + ", ".join(sorted(E, key=natural_key)) + "}" for E in self.members)
        return f"Graphing([{inner}])"


def _as_graphing(G, graphing):
    return graphing if isinstance(graphing, Graphing) else Graphing(G, graphing)


def is_graphing(G, graphing):
    """Does the family generate G?  The witness is an arrow outside the closure."""
    g = _as_graphing(G, graphing)
    got = closure(G, g.union)
    missing = [a for a in G.arrows if a not in got]
    return Verdict(not missing, missing[0] if missing else None)


def cost_of_graphing(graphing):
    G = graphing.groupoid
    return sum((mu_g(G, E) for E in graphing.members), Fraction(0))


def disjointify(graphing):
    """E~_n = E_n minus the earlier E~_j."""
    seen = set()
    out = []
    for E in graphing.members:
        out.append(frozenset(E - seen))
        seen |= E
    return Graphing(graphing.groupoid, out)


# minimal cost

@dataclass
class CostCertificate:
    value: Fraction
    arrows: tuple
    nodes: int
    prunes: int
    exact: bool

    @property
    def status(self):
        return "exact" if self.exact else "bound-only"


def representatives(G):
    """One non-unit arrow per pair {g, g^-1}, by descending weight then id."""
    reps = []
    seen = set()
    for g in G.non_units:
        if g in seen:
            continue
        h = G.inv(g)
        seen.update((g, h))
        reps.append(min(g, h, key=natural_key))
    reps.sort(key=lambda g: (-G.weight[G.s(g)], natural_key(g)))
    return reps


def minimal_cost(G, budget=None):
    """Least mu^G(A) over generating sets A of non-unit arrows (branch and bound)."""
    reps = representatives(G)
    w = [G.weight[G.s(g)] for g in reps]
    everything = frozenset(G.arrows)
    best = [sum(w, Fraction(0)), tuple(reps)]
    stats = {"nodes": 0, "prunes": 0, "exhausted": False}

    def feasible(chosen, i):
        return closure(G, chosen + reps[i:]) == everything

    def dfs(i, chosen, mass):
        stats["nodes"] += 1
        if budget is not None and stats["nodes"] > budget:
            stats["exhausted"] = True
            return
        if mass >= best[0]:
            stats["prunes"] += 1
            return
        if closure(G, chosen) == everything:
            best[0], best[1] = mass, tuple(chosen)
            return
        if i == len(reps) or not feasible(chosen, i):
            stats["prunes"] += 1
            return
        dfs(i + 1, chosen, mass)
        if stats["exhausted"]:
            return
        dfs(i + 1, chosen + [reps[i]], mass + w[i])

    dfs(0, [], Fraction(0))
    arrows = tuple(sorted(best[1], key=natural_key))
    if closure(G, arrows) != everything:
        raise AssertionError("certificate does not generate the groupoid")
    return CostCertificate(best[0], arrows, stats["nodes"], stats["prunes"],
                           not stats["exhausted"])


def cost(G, budget=None):
    return minimal_cost(G, budget).value


# treeings

def _letters(G, members):
    """Signed letters (j, +1 / -1) with their arrow sets."""
    out = []
    for j, E in enumerate(members):
        out.append(((j, 1), E))
        out.append(((j, -1), frozenset(G.inv(g) for g in E)))
    return out


def is_treeing(G, graphing):
    """No reduced word of positive length meets the units.

    The witness is a list of (member index, sign, arrow) whose product is
    a unit.
    """
    members = _as_graphing(G, graphing).members
    letters = _letters(G, members)
    by_range = {}
    for L, S in letters:
        for h in S:
            by_range.setdefault((L, G.r(h)), []).append(h)
    parent = {}
    queue = deque()
    for L, S in letters:
        for h in sorted(S, key=natural_key):
            st = (h, L)
            if st in parent:
                continue
            parent[st] = None
            if G.is_unit(h):
                return Verdict(False, [(L[0], L[1], h)])
            queue.append(st)
    while queue:
        p, last = queue.popleft()
        for L, _ in letters:
            if L[0] == last[0] and L[1] != last[1]:
                continue
            for h in by_range.get((L, G.s(p)), ()):
                q = G.compose(p, h)
                st = (q, L)
                if st in parent:
                    continue
                parent[st] = ((p, last), h)
                if G.is_unit(q):
                    return Verdict(False, _word(parent, st))
                queue.append(st)
    return Verdict(True)


def _word(parent, st):
    word = []
    while parent[st] is not None:
        prev, h = parent[st]
        word.append((st[1][0], st[1][1], h))
        st = prev
    word.append((st[1][0], st[1][1], st[0]))
    return list(reversed(word))


def find_treeing(G, budget=None):
    """A generating family of singletons that is a treeing, or None."""
    reps = representatives(G)
    everything = frozenset(G.arrows)
    nodes = [0]

    def dfs(i, chosen):
        nodes[0] += 1
        if budget is not None and nodes[0] > budget:
            raise BudgetExhausted("treeing search exceeded its budget")
        if closure(G, chosen) == everything:
            return chosen
        if i == len(reps) or closure(G, chosen + reps[i:]) != everything:
            return None
        cand = chosen + [reps[i]]
        if is_treeing(G, [{a} for a in cand]):
            found = dfs(i + 1, cand)
            if found is not None:
                return found
        return dfs(i + 1, chosen)

    found = dfs(0, [])
    if found is None:
        return None
    return Graphing(G, [{a} for a in sorted(found, key=natural_key)])


def is_treeable(G, budget=None):
    return find_treeing(G, budget) is not None


# theorem checks

@dataclass
class CheckReport:
    name: str
    status: str
    relation: str = ""
    lhs: object = None
    rhs: object = None
    details: dict = field(default_factory=dict)
    witness: object = None

    @property
    def passed(self):
        return self.status in (PASS, FLAGGED)


def _exact(cert, name, rel):
    if not cert.exact:
        return CheckReport(name, BUDGET, rel, details={"nodes": cert.nodes})
    return None


def treeing_cost_check(G, graphing, budget=None):
    name, rel = "treeing", "C(G) = C(E)"
    g = _as_graphing(G, graphing)
    gen = is_graphing(G, g)
    tr = is_treeing(G, g)
    if not gen or not tr:
        return CheckReport(name, UNMET, rel, details={"generates": gen.ok, "treeing": tr.ok},
                           witness=gen.witness if not gen else tr.witness)
    cert = minimal_cost(G, budget)
    bad = _exact(cert, name, rel)
    if bad:
        return bad
    lhs, rhs = cert.value, cost_of_graphing(g)
    return CheckReport(name, PASS if lhs == rhs else FAIL, rel, lhs, rhs,
                       {"certificate": list(cert.arrows)})


def meets_every_orbit(G, Y):
    Y = set(Y)
    return all(any(G.r(g) in Y for g in G.with_source(x)) for x in G.atoms)


def induction_check(G, Y, budget=None):
    """C(G) - mu(X) = C(G|Y) - mu(Y), and treeability passes to G|Y."""
    name, rel = "induction", "C(G) - mu(X) = C(G|Y) - mu(Y)"
    Y = [x for x in G.atoms if x in set(Y)]
    if not Y or not meets_every_orbit(G, Y):
        missed = [x for x in G.atoms if not any(G.r(g) in set(Y) for g in G.with_source(x))]
        return CheckReport(name, UNMET, rel, witness=missed[:1])
    H = restriction(G, Y)
    c1, c2 = minimal_cost(G, budget), minimal_cost(H, budget)
    bad = _exact(c1, name, rel) or _exact(c2, name, rel)
    if bad:
        return bad
    lhs = c1.value - G.total_mass
    rhs = c2.value - sum((G.weight[y] for y in Y), Fraction(0))
    t1, t2 = is_treeable(G, budget), is_treeable(H, budget)
    ok = lhs == rhs and t1 == t2
    return CheckReport(name, PASS if ok else FAIL, rel, lhs, rhs,
                       {"treeable": t1, "restriction_treeable": t2, "Y": Y})


def cost_decomposition_check(G, budget=None):
    name, rel = "decomp", "C(G) = sum C(G|X_i)"
    cert = minimal_cost(G, budget)
    parts = []
    for block in invariant_partition(G):
        c = minimal_cost(restriction(G, block), budget)
        if not c.exact:
            return CheckReport(name, BUDGET, rel)
        parts.append(c.value)
    bad = _exact(cert, name, rel)
    if bad:
        return bad
    rhs = sum(parts, Fraction(0))
    return CheckReport(name, PASS if cert.value == rhs else FAIL, rel, cert.value, rhs,
                       {"blocks": parts})


def orbit_relation_cost_check(G, budget=None):
    name, rel = "orbit", "C(G) >= C(R_G)"
    c1, c2 = minimal_cost(G, budget), minimal_cost(orbit_relation(G), budget)
    bad = _exact(c1, name, rel) or _exact(c2, name, rel)
    if bad:
        return bad
    return CheckReport(name, PASS if c1.value >= c2.value else FAIL, rel, c1.value, c2.value)


# free products

@dataclass
class FreeProductCertificate:
    first: frozenset
    second: frozenset
    first_closed: bool = False
    second_closed: bool = False
    generates: bool = False
    free: bool = False
    intersection_principal: bool = False
    hyperfinite: bool = True
    witness: list = None

    @property
    def intersection(self):
        return self.first & self.second

    @property
    def ok(self):
        return (self.first_closed and self.second_closed and self.generates
                and self.free and self.intersection_principal and self.hyperfinite)


def _closed(G, S):
    S = frozenset(S) | G.unit_arrows
    return closure(G, S) == S


def freeness_witness(G, first, second):
    """An alternating word over (G1 - G3) and (G2 - G3) with product in G3."""
    G3 = first & second
    sides = [sorted(first - G3, key=natural_key), sorted(second - G3, key=natural_key)]
    by_range = [{}, {}]
    for i in (0, 1):
        for h in sides[i]:
            by_range[i].setdefault(G.r(h), []).append(h)
    parent = {}
    queue = deque()
    for i in (0, 1):
        for h in sides[i]:
            parent[(h, i)] = None
            queue.append((h, i))
    while queue:
        p, i = queue.popleft()
        j = 1 - i
        for h in by_range[j].get(G.s(p), ()):
            q = G.compose(p, h)
            st = (q, j)
            if st in parent:
                continue
            parent[st] = ((p, i), h)
            if q in G3:
                word = []
                cur = st
                while parent[cur] is not None:
                    prev, hh = parent[cur]
                    word.append(hh)
                    cur = prev
                word.append(cur[0])
                return list(reversed(word))
            queue.append(st)
    return None


def certify_free_product(G, first, second):
    first = frozenset(first) | G.unit_arrows
    second = frozenset(second) | G.unit_arrows
    cert = FreeProductCertificate(first, second)
    cert.first_closed = _closed(G, first)
    cert.second_closed = _closed(G, second)
    cert.generates = closure(G, first | second) == frozenset(G.arrows)
    cert.witness = freeness_witness(G, first, second)
    cert.free = cert.witness is None
    cert.intersection_principal = G.sub(cert.intersection).is_principal()
    return cert


def free_product_check(G, cert, budget=None):
    """C(G) = C(G1) + C(G2) - C(G3) under a verified certificate."""
    name, rel = "additivity", "C(G) = C(G1) + C(G2) - C(G3)"
    first, second = cert if isinstance(cert, tuple) else (cert.first, cert.second)
    cert = certify_free_product(G, first, second)
    flags = {"first_closed": cert.first_closed, "second_closed": cert.second_closed,
             "generates": cert.generates, "free": cert.free,
             "intersection_principal": cert.intersection_principal,
             "hyperfinite": cert.hyperfinite}
    if not cert.ok:
        return CheckReport(name, UNMET, rel, details=flags, witness=cert.witness)
    costs = [minimal_cost(H, budget) for H in
             (G, G.sub(cert.first), G.sub(cert.second), G.sub(cert.intersection))]
    for c in costs:
        if not c.exact:
            return CheckReport(name, BUDGET, rel, details=flags)
    c, c1, c2, c3 = (x.value for x in costs)
    rhs = c1 + c2 - c3
    flags["parts"] = [c1, c2, c3]
    return CheckReport(name, PASS if c == rhs else FAIL, rel, c, rhs, flags)


# cost against Betti numbers

def cost_vs_betti_check(G, budget=None):
    """beta_1 - beta_0 + 1 <= C(G), with equality for treeable G."""
    from .betti import betti_groupoid

    name, rel = "cvb", "beta1 - beta0 + 1 <= C(G)"
    b = betti_groupoid(G, budget=budget)
    cert = minimal_cost(G, budget)
    bad = _exact(cert, name, rel)
    if bad:
        return bad
    lhs = b.beta1_upper - b.beta0 + 1
    treeable = is_treeable(G, budget)
    ok = lhs <= cert.value and (not treeable or lhs == cert.value)
    details = {"beta0": b.beta0, "beta1": b.beta1_upper, "beta1_exact": b.exact1,
               "treeable": treeable, "strict": lhs < cert.value}
    return CheckReport(name, PASS if ok else FAIL, rel, lhs, cert.value, details)


def involution_free(G, graphing):
    """No units in the union and no arrow together with its inverse."""
    A = _as_graphing(G, graphing).union
    return not (A & G.unit_arrows) and not any(G.inv(g) in A for g in A)


def graphing_identity_check(G, graphing):
    """alpha_1 of the graphing complex against the cost of the graphing.

    Equality is asserted for involution-free disjoint graphings; otherwise
    both values are reported and a discrepancy is flagged.
    """
    from .complexes import alpha, build_graphing_complex

    name, rel = "graphing-complex", "alpha1 = C(E)"
    g = _as_graphing(G, graphing)
    if not g.is_disjoint():
        return CheckReport(name, UNMET, rel, details={"disjoint": False})
    a1 = alpha(build_graphing_complex(G, g.members), 1)
    c = cost_of_graphing(g)
    inv_free = involution_free(G, g)
    details = {"involution_free": inv_free, "alpha_routes_agree": a1.agree}
    if inv_free:
        status = PASS if a1.value == c and a1.agree else FAIL
    else:
        status = PASS if a1.value == c else FLAGGED
    return CheckReport(name, status, rel, a1.value, c, details)

"""Command-line front end.

Exit codes: 0 every assertion holds, 1 a theorem assertion failed, 2 the
input could not be parsed or validated, 3 a hypothesis was not met or a
search budget ran out.
"""

import argparse
import json
import sys
import time
from fractions import Fraction

from . import betti as B
from . import complexes as C
from . import cost as K
from .document import DocumentError, load, random_groupoid, serialize
from .groupoid import natural_key, one_sheeted_decomposition, validate

SUITES = ("morse", "euler", "induction", "additivity", "treeing", "cvb", "decomp", "orbit")


def jsonable(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((jsonable(v) for v in obj), key=lambda v: natural_key(str(v)))
    return obj


def _ids(S):
    return sorted(S, key=natural_key)


def item(report):
    d = {"name": report.name, "status": report.status, "relation": report.relation,
         "lhs": report.lhs, "rhs": report.rhs}
    if report.details:
        d["details"] = report.details
    if report.witness is not None:
        d["witness"] = report.witness
    return d


def _status(ok):
    return K.PASS if ok else K.FAIL


# suites

def _complexes(doc, budget):
    G = doc.groupoid
    out = []
    Kx, gens = B.groupoid_complex(G, budget)
    out.append(("generators", Kx))
    for name in sorted(doc.graphings, key=natural_key):
        g = K.disjointify(K.Graphing(G, doc.graphings[name]))
        out.append((f"graphing:{name}", C.build_graphing_complex(G, g.members)))
    return out


def suite_morse(doc, args):
    items = []
    for label, Kx in _complexes(doc, args.budget):
        for n in range(Kx.top + 1):
            m = B.morse_check(Kx, n)
            items.append({"name": f"morse[{label}, n={n}]", "status": _status(m.holds),
                          "relation": "alpha side - beta side = b_{n+1} >= 0",
                          "lhs": m.alpha_side, "rhs": m.beta_side,
                          "details": {"gap": m.gap, "b_next": m.next_boundary,
                                      "stated_sign_holds": m.stated_sign_holds}})
    return items


def suite_euler(doc, args):
    items = []
    for label, Kx in _complexes(doc, args.budget):
        e = B.euler(Kx)
        items.append({"name": f"euler[{label}]", "status": _status(e.equal),
                      "relation": "chi = chi2", "lhs": e.chi, "rhs": e.chi2})
    return items


def suite_induction(doc, args):
    G = doc.groupoid
    if args.Y:
        if args.Y not in doc.subsets:
            raise DocumentError(f"no subset named {args.Y}")
        names = [args.Y]
    else:
        names = sorted(doc.subsets, key=natural_key)
    if not names:
        return [{"name": "induction", "status": K.UNMET, "relation": "",
                 "details": {"reason": "no subset Y given"}}]
    out = []
    for n in names:
        r = item(K.induction_check(G, doc.subsets[n], args.budget))
        r["name"] = f"induction[{n}]"
        out.append(r)
    return out


def suite_additivity(doc, args):
    subs = doc.subgroupoids
    if "G1" in subs and "G2" in subs:
        pair = (subs["G1"], subs["G2"])
    elif len(subs) >= 2:
        names = sorted(subs, key=natural_key)[:2]
        pair = (subs[names[0]], subs[names[1]])
    else:
        return [{"name": "additivity", "status": K.UNMET, "relation": "",
                 "details": {"reason": "two designated subgroupoids are needed"}}]
    return [item(K.free_product_check(doc.groupoid, pair, args.budget))]


def suite_treeing(doc, args):
    G = doc.groupoid
    out = []
    for name in sorted(doc.graphings, key=natural_key):
        r = item(K.treeing_cost_check(G, doc.graphings[name], args.budget))
        r["name"] = f"treeing[{name}]"
        out.append(r)
    if not out:
        tr = K.find_treeing(G, args.budget)
        if tr is None:
            return [{"name": "treeing", "status": K.UNMET, "relation": "C(G) = C(E)",
                     "details": {"reason": "the groupoid is not treeable"}}]
        r = item(K.treeing_cost_check(G, tr, args.budget))
        r["details"] = dict(r.get("details", {}), treeing=[_ids(m) for m in tr.members])
        out.append(r)
    return out


def suite_cvb(doc, args):
    return [item(K.cost_vs_betti_check(doc.groupoid, args.budget))]


def suite_decomp(doc, args):
    return [item(K.cost_decomposition_check(doc.groupoid, args.budget))]


def suite_orbit(doc, args):
    return [item(K.orbit_relation_cost_check(doc.groupoid, args.budget))]


RUNNERS = {s: globals()[f"suite_{s}"] for s in SUITES}


# commands

def cmd_validate(doc, args):
    rep = validate(doc.groupoid)
    return {"valid": rep.valid, "principal": rep.principal, "violations": rep.violations,
            "total_mass": rep.total_mass}, 0 if rep.valid else 2


def cmd_decompose(doc, args):
    pieces = one_sheeted_decomposition(doc.groupoid)
    return {"pieces": [_ids(p) for p in pieces], "count": len(pieces)}, 0


def cmd_betti(doc, args):
    G = doc.groupoid
    if args.complex == "eg":
        Kx = B.eg_truncation(G, args.N, args.k, args.dim_cap)
        res = B.betti_all(Kx)
        return {"complex": "eg", "N": args.N, "k": args.k, "dim_cap": args.dim_cap,
                "levels": [len(l) for l in Kx.levels],
                "betti": res.values,
                "alpha": {n: C.alpha(Kx, n).value for n in range(Kx.top + 1)},
                "step2": {"bound": Kx.step2.bound, "worst": Kx.step2.worst,
                          "holds": Kx.step2.holds}}, 0
    if args.graphing:
        if args.graphing not in doc.graphings:
            raise DocumentError(f"no graphing named {args.graphing}")
        g = K.disjointify(K.Graphing(G, doc.graphings[args.graphing]))
        Kx = C.build_graphing_complex(G, g.members)
        res = B.betti_all(Kx)
        return {"complex": "graphing", "graphing": args.graphing, "betti": res.values,
                "alpha": {n: C.alpha(Kx, n).value for n in range(Kx.top + 1)},
                "tree_fibered": C.is_tree_fibered(Kx)}, 0
    b = B.betti_groupoid(G, budget=args.budget)
    return {"complex": "graphing", "generators": list(b.generators), "beta0": b.beta0,
            "beta1_upper": b.beta1_upper, "beta1_exact": b.exact1}, 0


def cmd_cost(doc, args):
    cert = K.minimal_cost(doc.groupoid, args.budget)
    return {"value": cert.value, "arrows": list(cert.arrows), "status": cert.status,
            "nodes": cert.nodes, "prunes": cert.prunes}, 0 if cert.exact else 3


def cmd_verify(doc, args):
    explicit = args.suite != "all"
    names = SUITES if not explicit else [s.strip() for s in args.suite.split(",") if s.strip()]
    unknown = [s for s in names if s not in RUNNERS]
    if unknown:
        raise DocumentError(f"unknown suite {unknown[0]}")
    items = {}
    code = 0
    for name in names:
        for it in RUNNERS[name](doc, args):
            items[it["name"]] = it
            st = it["status"]
            if st == K.FAIL:
                code = 1
            elif st in (K.UNMET, K.BUDGET):
                if explicit or st == K.BUDGET:
                    if code == 0:
                        code = 3
                else:
                    it["status"] = "skipped"
    return {"suites": list(names), "items": items}, code


def build_parser():
    p = argparse.ArgumentParser(prog="groupoid-l2", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--budget", type=int, default=None, help="search node budget")
        return sp

    add("validate", "check the groupoid axioms")
    add("decompose", "greedy one-sheeted decomposition")
    sp = add("betti", "L2-Betti numbers")
    sp.add_argument("--complex", choices=("graphing", "eg"), default="graphing")
    sp.add_argument("--graphing", help="named graphing to build the complex from")
    sp.add_argument("--N", type=int, default=1)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--dim-cap", type=int, default=2)
    add("cost", "exact minimal cost")
    sp = add("verify", "run theorem checks")
    sp.add_argument("--suite", default="all",
                    help="comma-separated subset of: " + ",".join(SUITES) + " (default all)")
    sp.add_argument("--Y", help="named subset for the induction suite")
    sp = sub.add_parser("random", help="write a random groupoid document")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--atoms", type=int, default=3)
    sp.add_argument("--isotropy-max", type=int, default=1)
    sp.add_argument("--arrow-budget", type=int, default=None)
    sp.add_argument("--out", help="document path (stdout when omitted)")
    return p


COMMANDS = {"validate": cmd_validate, "decompose": cmd_decompose, "betti": cmd_betti,
            "cost": cmd_cost, "verify": cmd_verify}


def run_command(argv):
    """Returns (report dict, exit code)."""
    return execute(build_parser().parse_args(argv))


def execute(args):
    t0 = time.perf_counter()
    report = {"command": args.command}
    if args.command == "random":
        try:
            G = random_groupoid(args.seed, args.atoms, args.isotropy_max, args.arrow_budget)
        except ValueError as exc:
            report.update(error={"kind": "parameters", "message": str(exc)})
            return report, 2
        text = serialize(G)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
            report.update(path=args.out, atoms=len(G.atoms), arrows=len(G.arrows))
        else:
            report.update(document=text)
        return report, 0
    try:
        doc = load(args.file)
        report["file"] = args.file
        report["digest"] = doc.digest()
        body, code = COMMANDS[args.command](doc, args)
    except DocumentError as exc:
        report["error"] = {"kind": exc.kind, "message": str(exc)}
        if hasattr(exc, "violations"):
            report["error"]["violations"] = exc.violations
        return report, 2
    except OSError as exc:
        report["error"] = {"kind": "io", "message": str(exc)}
        return report, 2
    except K.BudgetExhausted as exc:
        report["error"] = {"kind": "budget", "message": str(exc)}
        return report, 3
    report.update(body)
    report["exit_code"] = code
    report["seconds"] = round(time.perf_counter() - t0, 4)
    return report, code


def main(argv=None):
    args = build_parser().parse_args(argv)
    report, code = execute(args)
    if args.command == "random" and "document" in report:
        sys.stdout.write(report["document"])
        return code
    text = json.dumps(jsonable(report), indent=2) + "\n"
    if args.command != "random" and args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

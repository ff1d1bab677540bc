"""Command-line interface: ``uadom <group> <command> [options]``.

Every command prints one JSON document (keys sorted) on stdout and a short
summary on stderr.  Exit codes: 0 definite success, 2 definite negative,
3 unknown, 1 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from uadom.errors import Budget, BudgetExceeded, HypothesisFailure, ParseError, UadomError

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE, EXIT_UNKNOWN = 0, 1, 2, 3

THEORIES = ("semigroup", "commutative-semigroup", "group", "nilpotent2", "none")


class UsageError(Exception):
    pass


def _emit(payload: dict, summary: str, code: int) -> int:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    sys.stderr.write(summary.rstrip() + "\n")
    return code


def _budget(args) -> Budget:
    return Budget.from_env(nodes=getattr(args, "budget_nodes", None), models=getattr(args, "budget_models", None))


def _budget_report(b: Budget) -> dict:
    return {"nodes": b.nodes, "models": b.models, "assignments": b.assignments}


def _labels(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def _ints(text: str) -> list[int]:
    try:
        return [int(s) for s in _labels(text)]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _assignment(text: str) -> dict[str, str]:
    out = {}
    for part in _labels(text):
        if "=" not in part:
            raise UsageError(f"assignment entries look like name=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


# ---------------------------------------------------------------------------
# shared loaders

def _load_algebra(args):
    from uadom.algebra import make_subalgebra
    from uadom.formats import load_algebra

    af = load_algebra(args.algebra)
    if getattr(args, "sub", None) is not None:
        B = make_subalgebra(af.algebra, _ints(args.sub))
    elif af.subalgebras:
        B = af.B
    else:
        raise UsageError("no subalgebra: add a 'sub' line to the algebra file or pass --sub")
    return af.algebra, B


def _load_ids(args, sig):
    from uadom import library
    from uadom.formats import parse_identities

    if getattr(args, "identities", None):
        return parse_identities(Path(args.identities).read_text(encoding="utf-8"), sig)
    theory = getattr(args, "theory", "none") or "none"
    if theory == "none":
        return []
    if theory == "semigroup":
        return list(library.SEMIGROUP_IDS)
    if theory == "commutative-semigroup":
        return [library.ASSOCIATIVITY, library.COMMUTATIVITY]
    if theory == "group":
        return list(library.GROUP_IDS)
    return list(library.NILPOTENT2_IDS)


def _ground(args):
    from uadom.tsys import GroundSet

    if getattr(args, "set", None):
        return GroundSet.of(_labels(args.set))
    if getattr(args, "n", None) is not None:
        return GroundSet.numbered(args.n)
    raise UsageError("give the ground set with --set a,b,c or --n N")


def _collection(args, ground):
    from uadom.formats import parse_collection
    from uadom.tsys import SubsetCollection

    masks = parse_collection(Path(args.collection).read_text(encoding="utf-8"), ground.names)
    return SubsetCollection(ground, frozenset(masks))


# ---------------------------------------------------------------------------
# tsys

def cmd_tsys_pre_check(args) -> int:
    from uadom.tsys import check_pre_transfer

    g = _ground(args)
    res = check_pre_transfer(_collection(args, g))
    out = res.to_dict(g)
    return _emit(out, f"pre-transfer axioms: {out['verdict']}", EXIT_OK if res.ok else EXIT_NEGATIVE)


def cmd_tsys_closure(args) -> int:
    from uadom.tsys import extract_chain, induced_system, least_closure

    g = _ground(args)
    c = _collection(args, g)
    p = least_closure(c)
    star = induced_system(p)
    classes = sorted(p.classes().values())
    out = {
        "classes": len(classes),
        "partition": [[g.labels(u) for u in cls] for cls in classes],
        "induced": star.to_list(),
    }
    if args.chain:
        a, b = (g.mask(_labels(s)) if s != "{}" else 0 for s in args.chain)
        chain = extract_chain(c, a, b)
        out["chain"] = None if chain is None else [g.labels(u) for u in chain]
    return _emit(out, f"{len(classes)} classes", EXIT_OK)


def cmd_tsys_decide(args) -> int:
    from uadom.tsys import is_transfer_system

    g = _ground(args)
    d = is_transfer_system(_collection(args, g))
    out = d.to_dict()
    return _emit(out, f"transfer system: {out['verdict']}", EXIT_OK if d.is_transfer else EXIT_NEGATIVE)


def cmd_tsys_principal(args) -> int:
    from uadom.tsys import principal_system

    g = _ground(args)
    c = principal_system(g, g.mask(_labels(args.v)))
    return _emit({"collection": c.to_list(), "size": len(c)}, f"{len(c)} members", EXIT_OK)


def cmd_tsys_witness(args) -> int:
    from uadom.tsys import dominion_witness

    g = _ground(args)
    w = dominion_witness(g, g.mask(_labels(args.v)), oracle=not args.no_oracle)
    return _emit(w.to_dict(), f"model n={w.n} m={w.m} realises T(V)", EXIT_OK)


def cmd_tsys_census(args) -> int:
    from uadom.tsys import census

    report = census(args.max_n, jobs=args.jobs)
    ok = all(r["transfer_not_pre"] == 0 and r["closure_not_fixed"] == 0 for r in report.values())
    return _emit({"census": report}, "census complete", EXIT_OK if ok else EXIT_NEGATIVE)


# ---------------------------------------------------------------------------
# coprod

def _outcome_code(outcome) -> int:
    from uadom.coproduct import Verdict

    return {Verdict.PROVEN: EXIT_OK, Verdict.DISPROVEN: EXIT_NEGATIVE, Verdict.UNKNOWN: EXIT_UNKNOWN}[outcome.verdict]


def cmd_coprod_prove(args) -> int:
    from uadom.coproduct import build_presentation, prove_equal
    from uadom.terms import parse_term

    A, B = _load_algebra(args)
    ids = _load_ids(args, A.sig)
    budget = _budget(args)
    s = parse_term(args.lhs, A.sig, tagged=True)
    t = parse_term(args.rhs, A.sig, tagged=True)
    try:
        p = build_presentation(A, B, ids, args.depth, saturate=False, budget=budget)
        outcome = prove_equal(p, s, t)
        report = p.report()
    except BudgetExceeded as exc:
        from uadom.coproduct import Outcome, Verdict

        outcome, report = Outcome(Verdict.UNKNOWN, str(exc)), {}
    out = {**outcome.to_dict(), "presentation": report, "budget": _budget_report(budget)}
    return _emit(out, f"coproduct equality: {outcome.verdict.value}", _outcome_code(outcome))


def cmd_coprod_refute(args) -> int:
    from uadom.coproduct import refute_terms
    from uadom.terms import Gen, parse_term

    A, B = _load_algebra(args)
    ids = _load_ids(args, A.sig)
    budget = _budget(args)
    if args.lhs is not None:
        s = parse_term(args.lhs, A.sig, tagged=True)
        t = parse_term(args.rhs, A.sig, tagged=True)
    else:
        s, t = Gen("L", args.a), Gen("R", args.a2 if args.a2 is not None else args.a)
    outcome = refute_terms(A, B, ids, s, t, args.max_c, budget=budget)
    out = {**outcome.to_dict(), "budget": _budget_report(budget)}
    return _emit(out, f"refutation: {outcome.verdict.value}", _outcome_code(outcome))


# ---------------------------------------------------------------------------
# model

def cmd_model_transferable(args) -> int:
    from uadom.model import ModelInstance, model_transferable, model_transferable_bfs

    inst = ModelInstance(args.n, args.m)
    T = _ints(args.subset) if args.subset not in ("{}", "") else []
    ok = model_transferable(inst, T)
    out = {"n": args.n, "m": args.m, "subset": T, "transferable": ok}
    if args.oracle:
        out["search_agrees"] = model_transferable_bfs(inst, T) == ok
    return _emit(out, f"transferable: {ok}", EXIT_OK if ok else EXIT_NEGATIVE)


def cmd_model_pair_equiv(args) -> int:
    from uadom.model import ModelInstance, format_pair, model_pair_equivalent, parse_pair

    inst = ModelInstance(args.n, args.m)
    p, q = parse_pair(args.left, args.n), parse_pair(args.right, args.n)
    ok = model_pair_equivalent(inst, p, q)
    out = {"left": format_pair(p), "right": format_pair(q), "equivalent": ok}
    return _emit(out, f"equivalent: {ok}", EXIT_OK if ok else EXIT_NEGATIVE)


# ---------------------------------------------------------------------------
# transfer

def cmd_transfer_check(args) -> int:
    from uadom.terms import parse_term
    from uadom.transferable import CoproductBackend, ModelBackend, SplitContext, Status, is_transferable

    names = _labels(args.vars)
    raw = _assignment(args.assign)
    budget = _budget(args)
    if args.backend == "model":
        from uadom.library import SEMIGROUP
        from uadom.model import ModelInstance, parse_coordinate

        if args.n is None or args.m is None:
            raise UsageError("the model backend needs --n and --m")
        inst = ModelInstance(args.n, args.m)
        x = {k: parse_coordinate(v, args.n) for k, v in raw.items()}
        if any(v is None for v in x.values()):
            raise UsageError("assigned values must be integers")
        W = parse_term(args.word, SEMIGROUP)
        backend = ModelBackend(inst)
    else:
        if not args.algebra:
            raise UsageError("the coprod backend needs --algebra")
        A, B = _load_algebra(args)
        ids = _load_ids(args, A.sig)
        x = {k: int(v) for k, v in raw.items()}
        W = parse_term(args.word, A.sig)
        backend = CoproductBackend(A, B, ids, depth=args.depth, max_c=args.max_c, budget=budget)
    ctx = SplitContext(W, tuple(names), x, backend, budget)
    T = _labels(args.subset) if args.subset != "{}" else []
    res = is_transferable(ctx, T)
    code = {Status.TRANSFERABLE: EXIT_OK, Status.NOT_TRANSFERABLE: EXIT_NEGATIVE, Status.UNKNOWN: EXIT_UNKNOWN}[res.status]
    return _emit(res.to_dict(), f"subset {T}: {res.status.value}", code)


# ---------------------------------------------------------------------------
# arrays

def _load_array(path: str, sig):
    from uadom.formats import parse_array_text

    return parse_array_text(Path(path).read_text(encoding="utf-8"), sig)


def cmd_array_validate(args) -> int:
    from uadom.arrays import validate_array
    from uadom.formats import load_algebra

    algebras = [load_algebra(p).algebra for p in args.algebra]
    arr = _load_array(args.array, algebras[0].sig)
    res = validate_array(arr, algebras, _budget(args))
    return _emit(res.to_dict(), f"array: {res.to_dict()['verdict']}", EXIT_OK if res.ok else EXIT_NEGATIVE)


def cmd_array_certify(args) -> int:
    from uadom.arrays import certify, verify_certificate

    A, B = _load_algebra(args)
    arr = _load_array(args.array, A.sig)
    budget = _budget(args)
    x = {k: int(v) for k, v in _assignment(args.assign).items()}
    try:
        cert = certify(arr, A, B, x, axiom=args.axiom, budget=budget)
    except HypothesisFailure as exc:
        out = {"verdict": "hypothesis-failure", "block": exc.block, "value": exc.value}
        return _emit(out, str(exc), EXIT_NEGATIVE)
    out = {"verdict": "certified", "certificate": cert.to_dict()}
    if args.verify:
        out["verification"] = verify_certificate(
            cert, [A], args.max_c, _load_ids(args, A.sig), budget
        ).to_dict()
    return _emit(out, f"certified element {cert.value}", EXIT_OK)


def cmd_array_bstar(args) -> int:
    from uadom.arrays import b_star, identity_array, zigzag_array

    A, B = _load_algebra(args)
    arrays = [identity_array()] + [_load_array(p, A.sig) for p in args.array]
    if args.zigzag:
        arrays.append(zigzag_array())
    res = b_star(A, B, arrays, _budget(args))
    out = {
        "B": sorted(B.members),
        "certified": sorted(res.certified),
        "b_star": sorted(res.members),
        "note": "relative to the listed arrays, closed under the operations of A",
    }
    return _emit(out, f"|B*| = {len(res.members)}", EXIT_OK)


def cmd_array_zigzag(args) -> int:
    from uadom.zigzag import find_zigzag_instance

    inst = find_zigzag_instance(args.max_size, _budget(args))
    if inst is None:
        return _emit({"found": False, "max_size": args.max_size}, "no configuration", EXIT_NEGATIVE)
    return _emit({"found": True, **inst.to_dict()}, f"found a configuration of size {inst.A.size}", EXIT_OK)


# ---------------------------------------------------------------------------
# scenarios and experiments

def cmd_scenarios_run(args) -> int:
    from uadom.scenarios import run_scenarios

    goldens = Path(args.golden_dir) if args.golden_dir else None
    results = run_scenarios(args.filter, update=args.update_goldens, goldens=goldens, budget=_budget(args))
    bad = [n for n, r in results.items() if r["status"] not in ("pass", "updated")]
    summary = "\n".join(f"{n}: {r['status']}" for n, r in results.items())
    return _emit({"scenarios": results}, summary, EXIT_NEGATIVE if bad else EXIT_OK)


def cmd_experiment_bstar_vs_dom(args) -> int:
    from uadom.algebra import dominion_upper
    from uadom.arrays import b_star, identity_array, zigzag_array

    A, B = _load_algebra(args)
    ids = _load_ids(args, A.sig)
    budget = _budget(args)
    arrays = [identity_array()] + [_load_array(p, A.sig) for p in args.array]
    if args.zigzag:
        arrays.append(zigzag_array())
    star = b_star(A, B, arrays, budget)
    bound = dominion_upper(A, B, ids, args.max_c, budget=budget)
    out = {
        "B": sorted(B.members),
        "b_star": sorted(star.members),
        "dominion_upper": sorted(bound.members),
        "codomains_tested": bound.codomains_tested,
        "b_star_within_bound": star.members <= bound.members,
        "gap": sorted(bound.members - star.members),
    }
    return _emit(out, f"B* {len(star.members)} vs bound {len(bound.members)}", EXIT_OK)


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uadom", description="Dominions, transferable sets and transfer systems.")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for parallel enumerations")
    parser.add_argument("--budget-nodes", type=int, help="term-graph node budget (env UADOM_BUDGET_NODES)")
    parser.add_argument("--budget-models", type=int, help="model enumeration budget (env UADOM_BUDGET_MODELS)")
    groups = parser.add_subparsers(dest="group", required=True)

    def algebra_opts(p, identities=True):
        p.add_argument("--algebra", required=True, help="algebra file")
        p.add_argument("--sub", help="subalgebra B as comma-separated elements (default: first 'sub' line)")
        if identities:
            p.add_argument("--identities", help="identities file, one 'lhs = rhs' per line")
            p.add_argument("--theory", choices=THEORIES, default="none", help="built-in identity set")

    def ground_opts(p):
        p.add_argument("--set", help="ground set labels, comma-separated")
        p.add_argument("--n", type=int, help="ground set 1..N")

    # tsys
    tsys = groups.add_parser("tsys", help="transfer systems").add_subparsers(dest="cmd", required=True)
    for name, func, help_ in (
        ("pre-check", cmd_tsys_pre_check, "check the three pre-transfer axioms"),
        ("closure", cmd_tsys_closure, "least equivalence generated by a collection"),
        ("decide", cmd_tsys_decide, "decide whether a collection is a transfer system"),
    ):
        p = tsys.add_parser(name, help=help_)
        ground_opts(p)
        p.add_argument("--collection", required=True, help="collection file, one subset per line, {} for empty")
        if name == "closure":
            p.add_argument("--chain", nargs=2, metavar=("FROM", "TO"), help="extract a generating chain, e.g. {} a,b,c")
        p.set_defaults(func=func)
    p = tsys.add_parser("principal", help="the principal system T(V)")
    ground_opts(p)
    p.add_argument("--v", required=True, help="V as comma-separated labels")
    p.set_defaults(func=cmd_tsys_principal)
    p = tsys.add_parser("witness", help="realise T(V) in the integer model")
    ground_opts(p)
    p.add_argument("--v", required=True, help="V as comma-separated labels")
    p.add_argument("--no-oracle", action="store_true", help="skip the partition search cross-check")
    p.set_defaults(func=cmd_tsys_witness)
    p = tsys.add_parser("census", help="count pre-transfer and transfer systems")
    p.add_argument("--max-n", type=int, default=4)
    p.set_defaults(func=cmd_tsys_census)

    # coprod
    coprod = groups.add_parser("coprod", help="equality in the amalgamated coproduct").add_subparsers(dest="cmd", required=True)
    p = coprod.add_parser("prove", help="congruence closure proof of s = t")
    algebra_opts(p)
    p.add_argument("--lhs", required=True, help="tagged term, leaves L:<a> / R:<a>")
    p.add_argument("--rhs", required=True)
    p.add_argument("--depth", type=int, default=2, help="identity instantiation rounds")
    p.set_defaults(func=cmd_coprod_prove)
    p = coprod.add_parser("refute", help="separate by homomorphisms agreeing on B")
    algebra_opts(p)
    p.add_argument("--a", type=int, help="element for L:a")
    p.add_argument("--a2", type=int, help="element for R:a2 (default a)")
    p.add_argument("--lhs", help="tagged term (instead of --a)")
    p.add_argument("--rhs", help="tagged term (instead of --a2)")
    p.add_argument("--max-c", type=int, default=2, help="largest codomain size")
    p.set_defaults(func=cmd_coprod_refute)

    # model
    model = groups.add_parser("model", help="integer model").add_subparsers(dest="cmd", required=True)
    p = model.add_parser("transferable", help="is a subset of the product word transferable")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--subset", required=True, help="1-based indices, or {}")
    p.add_argument("--oracle", action="store_true", help="cross-check by partition search")
    p.set_defaults(func=cmd_model_transferable)
    p = model.add_parser("pair-equiv", help="equality of two pairs in the coproduct")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--left", required=True, help="u,v with integers, exponent vectors like 1.0.2, or e for empty")
    p.add_argument("--right", required=True)
    p.set_defaults(func=cmd_model_pair_equiv)

    # transfer
    transfer = groups.add_parser("transfer", help="transferable sets").add_subparsers(dest="cmd", required=True)
    p = transfer.add_parser("check", help="check one subset")
    p.add_argument("--word", required=True)
    p.add_argument("--vars", required=True, help="ordered variable list")
    p.add_argument("--assign", required=True, help="name=value,...")
    p.add_argument("--subset", required=True, help="variables of T, or {}")
    p.add_argument("--backend", choices=("coprod", "model"), default="coprod")
    p.add_argument("--algebra", help="algebra file (coprod backend)")
    p.add_argument("--sub")
    p.add_argument("--identities")
    p.add_argument("--theory", choices=THEORIES, default="none")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--max-c", type=int, default=2)
    p.add_argument("--n", type=int, help="number of primes (model backend)")
    p.add_argument("--m", type=int, help="size of V (model backend)")
    p.set_defaults(func=cmd_transfer_check)

    # array
    array = groups.add_parser("array", help="equational arrays").add_subparsers(dest="cmd", required=True)
    p = array.add_parser("validate", help="check an array in finite algebras")
    p.add_argument("--array", required=True)
    p.add_argument("--algebra", required=True, action="append", help="repeatable")
    p.set_defaults(func=cmd_array_validate)
    p = array.add_parser("certify", help="certificate for one assignment")
    algebra_opts(p)
    p.add_argument("--array", required=True)
    p.add_argument("--assign", required=True, help="x1_1=..,x2_1=..")
    p.add_argument("--axiom", action="store_true", help="accept array validity without checking in A")
    p.add_argument("--verify", action="store_true", help="also replay and search for separating pairs")
    p.add_argument("--max-c", type=int, default=0)
    p.set_defaults(func=cmd_array_certify)
    p = array.add_parser("bstar", help="elements certified by a family of arrays")
    algebra_opts(p, identities=False)
    p.add_argument("--array", action="append", default=[])
    p.add_argument("--zigzag", action="store_true", help="include the shared-letter zigzag array")
    p.set_defaults(func=cmd_array_bstar)
    p = array.add_parser("zigzag", help="search for the smallest zigzag configuration")
    p.add_argument("--max-size", type=int, default=6)
    p.set_defaults(func=cmd_array_zigzag)

    # scenarios
    sc = groups.add_parser("scenarios", help="bundled worked examples").add_subparsers(dest="cmd", required=True)
    p = sc.add_parser("run", help="run scenarios and diff against goldens")
    p.add_argument("--filter", help="substring of the scenario name")
    p.add_argument("--update-goldens", action="store_true")
    p.add_argument("--golden-dir")
    p.set_defaults(func=cmd_scenarios_run)

    # experiment
    ex = groups.add_parser("experiment", help="exploratory comparisons").add_subparsers(dest="cmd", required=True)
    p = ex.add_parser("bstar-vs-dom", help="compare B* with the brute-force dominion bound")
    algebra_opts(p)
    p.add_argument("--array", action="append", default=[])
    p.add_argument("--zigzag", action="store_true")
    p.add_argument("--max-c", type=int, default=2)
    p.set_defaults(func=cmd_experiment_bstar_vs_dom)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ParseError, ValueError, OSError, UadomError) as exc:
        sys.stderr.write(f"uadom: error: {exc}\n")
        return EXIT_ERROR


def run(argv: Sequence[str] | None = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: build presentations and structures, run the
decision procedures, compile formulas, and export automata.

Exit codes: 0 success or true, 1 false, 2 validation failure, 3 usage or
parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import decision as dec, fa, fo, relations as rel
from .presentations import (
    FiniteExtensionData,
    FiniteGroupTable,
    GraphAutomaticPresentation,
    GroupWord,
    Nilpotent2Spec,
    bs1n,
    direct_product,
    extend_generator,
    fa_abelian_multiplication,
    fg_abelian,
    finite_extension,
    free_group,
    free_product,
    gamma_free,
    heisenberg,
    nilpotent2,
    restrict_to_regular_subgroup,
    semidirect,
    semidirect_zn_z,
    ut,
    ut_m,
    wreath_finite_by_z,
    zn,
)

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_INVALID = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _ints(text):
    if not text.strip():
        return []
    return [int(x) for x in text.split(",")]


def _matrix(text):
    return [[int(x) for x in row.split(",")] for row in text.split(";")]


def _load_doc(path):
    with open(path) as f:
        return json.load(f)


def _load_presentation(path):
    doc = _load_doc(path)
    if "identity" not in doc:
        raise ValueError(f"{path} does not hold a presentation")
    return GraphAutomaticPresentation.from_json(doc)


def _load_any(path):
    doc = _load_doc(path)
    if doc.get("structure"):
        return fo.structure_from_json(doc)
    return GraphAutomaticPresentation.from_json(doc)


def _guard_states(obj, limit):
    autos = []
    if isinstance(obj, GraphAutomaticPresentation):
        autos.append(obj.domain)
        autos.extend(r.dfa for r in obj.generators.values())
        autos.extend(r.dfa for r in obj.left.values())
    else:
        autos.append(obj.domain)
        autos.extend(r.dfa for r in obj.relations.values())
    worst = max(a.n_states for a in autos)
    if worst > limit:
        raise ValueError(
            f"automaton has {worst} states, over the --max-states limit {limit}"
        )


def _commutators(items):
    out = {}
    for item in items or []:
        head, _, tail = item.partition("=")
        i, j = (int(x) for x in head.split(","))
        out[(i, j)] = tuple(_ints(tail))
    return out


def _build(args):
    name = args.builder
    if name == "zn":
        return zn(args.n)
    if name == "abelian":
        return fg_abelian(args.n, _ints(args.torsion))
    if name == "heisenberg":
        return heisenberg(args.n if args.n else 3)
    if name == "ut":
        return ut(args.n) if args.step == 1 else ut_m(args.n, args.step)
    if name == "bs1n":
        return bs1n(args.p)
    if name == "free":
        return free_group(args.rank)
    if name == "gamma-free":
        return gamma_free(args.rank)
    if name == "wreath":
        return wreath_finite_by_z(FiniteGroupTable.cyclic(args.t))
    if name == "nilpotent2":
        spec = Nilpotent2Spec(
            args.n, args.split, tuple(_ints(args.orders)), _commutators(args.comm)
        )
        return nilpotent2(spec)
    if name == "semidirect-zn-z":
        return semidirect_zn_z(_matrix(args.matrix))
    if name == "direct-product":
        return direct_product(
            _load_presentation(args.first), _load_presentation(args.second)
        )
    if name == "free-product":
        return free_product(
            _load_presentation(args.first), _load_presentation(args.second)
        )
    if name == "semidirect":
        action = {}
        for item in args.action or []:
            gen, _, path = item.partition("=")
            with open(path) as f:
                action[gen] = rel.rel_from_text(f.read())
        return semidirect(
            _load_presentation(args.first), _load_presentation(args.second), action
        )
    if name == "finite-extension":
        doc = _load_doc(args.data)
        base = _load_presentation(doc["base"])
        correction = [
            [GroupWord.parse(w) for w in row] for row in doc["correction"]
        ]
        conjugation = {}
        for key, w in doc.get("conjugation", {}).items():
            i, gen = key.split()
            conjugation[(int(i), gen)] = GroupWord.parse(w)
        data = FiniteExtensionData(base, doc["mult"], correction, conjugation)
        return finite_extension(data)
    if name == "restrict":
        P = _load_presentation(args.pres)
        with open(args.sub) as f:
            sub = fa.from_text(f.read(), alphabet=P.base)
        return restrict_to_regular_subgroup(P, sub, args.gens.split(","))
    if name == "extend-gen":
        P = _load_presentation(args.pres)
        return extend_generator(P, args.name, GroupWord.parse(args.word))
    if name == "fa-abelian":
        return fa_abelian_multiplication(args.n, _ints(args.torsion))
    raise UsageError(f"unknown builder {name!r}")


def cmd_build(args):
    obj = _build(args)
    _guard_states(obj, args.max_states)
    if isinstance(obj, GraphAutomaticPresentation):
        if not args.no_check:
            report = dec.check_presentation(obj)
            if not report["ok"]:
                bad = [k for k, v in report["relations"].items() if not v["ok"]]
                print(f"presentation check failed: {', '.join(bad)}", file=sys.stderr)
                return EXIT_INVALID
        doc = obj.to_json()
        kind = f"{len(obj.generators)} generators"
    else:
        doc = fo.structure_to_json(obj)
        kind = f"{len(obj.relations)} relations"
    with open(args.out, "w") as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        f.write("\n")
    print(f"wrote {args.out}: {kind}")
    return EXIT_TRUE


def cmd_eval(args):
    P = _load_presentation(args.path)
    _guard_states(P, args.max_states)
    w = dec.canonical_rep(P, GroupWord.parse(args.word))
    print(" ".join(w.names()))
    return EXIT_TRUE


def cmd_equal(args):
    P = _load_presentation(args.path)
    same = dec.words_equal(P, GroupWord.parse(args.word1), GroupWord.parse(args.word2))
    print("true" if same else "false")
    return EXIT_TRUE if same else EXIT_FALSE


def cmd_relator(args):
    P = _load_presentation(args.path)
    holds = dec.relator_holds(P, GroupWord.parse(args.word))
    print("true" if holds else "false")
    return EXIT_TRUE if holds else EXIT_FALSE


def cmd_ball(args):
    P = _load_presentation(args.path)
    report = dec.growth_profile(P, args.radius)
    print("sizes: " + " ".join(str(s) for s in report.sizes))
    if args.list:
        for w in dec.ball(P, args.radius):
            print(" ".join(w.names()))
    return EXIT_TRUE


def cmd_conj(args):
    P = _load_presentation(args.path)
    ok, witness = dec.conjugate(
        P, GroupWord.parse(args.word1), GroupWord.parse(args.word2)
    )
    if ok:
        print("conjugate, witness: " + " ".join(witness.names()))
        return EXIT_TRUE
    print("not conjugate")
    return EXIT_FALSE


def cmd_check(args):
    P = _load_presentation(args.path)
    report = dec.check_presentation(P)
    print(f"identity in domain: {report['identity_in_domain']}")
    for name, entry in report["relations"].items():
        flags = " ".join(
            k
            for k in ("in_domain", "total", "functional", "injective", "surjective")
            if entry[k]
        )
        print(f"{name}: {'ok' if entry['ok'] else 'FAIL'} ({flags})"
              f" C={entry['growth_constant']}")
    print("ok" if report["ok"] else "FAILED")
    return EXIT_TRUE if report["ok"] else EXIT_INVALID


def cmd_fo(args):
    obj = _load_any(args.path)
    if isinstance(obj, GraphAutomaticPresentation):
        struct = fo.AutomaticStructure(
            obj.domain, {f"E{n}": r for n, r in obj.generators.items()}
        )
    else:
        struct = obj
    if args.formula_file:
        with open(args.formula_file) as f:
            text = f.read()
    else:
        text = args.formula
    if text is None:
        raise UsageError("pass a formula or --formula-file")
    if args.compile:
        order = args.vars.split(",") if args.vars else None
        _, r = fo.compile(struct, text, order)
        if isinstance(r, bool):
            raise UsageError("--compile needs a formula with free variables")
        with open(args.compile, "w") as f:
            f.write(rel.rel_to_text(r))
        print(f"wrote {args.compile}: arity {r.arity}, {r.dfa.n_states} states")
        return EXIT_TRUE
    result = fo.decide(struct, text)
    print("true" if result else "false")
    return EXIT_TRUE if result else EXIT_FALSE


def cmd_export(args):
    obj = _load_any(args.path)
    os.makedirs(args.dot, exist_ok=True)
    written = []

    def emit(stem, automaton):
        stem = "".join(c if c.isalnum() or c in "-_" else "_" for c in stem)
        path = os.path.join(args.dot, stem + ".dot")
        with open(path, "w") as f:
            f.write(fa.to_dot(fa.minimize(fa.to_dfa(automaton)), name=stem))
        written.append(path)

    emit("domain", obj.domain)
    pairs = (
        obj.generators.items()
        if isinstance(obj, GraphAutomaticPresentation)
        else obj.relations.items()
    )
    for name, r in pairs:
        emit(name, r.dfa)
    if isinstance(obj, GraphAutomaticPresentation):
        for name, r in obj.left.items():
            emit(f"left_{name}", r.dfa)
    for path in written:
        print(path)
    return EXIT_TRUE


def make_parser():
    parser = _Parser(prog="cayleyauto", description=__doc__)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--max-states", type=int, default=10**6)
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a presentation or structure")
    b.add_argument("builder")
    b.add_argument("--out", required=True)
    b.add_argument("--no-check", action="store_true")
    b.add_argument("-n", type=int, default=0)
    b.add_argument("-p", type=int, default=2)
    b.add_argument("-t", type=int, default=2)
    b.add_argument("--rank", type=int, default=2)
    b.add_argument("--step", type=int, default=1)
    b.add_argument("--split", type=int, default=0)
    b.add_argument("--torsion", default="")
    b.add_argument("--orders", default="")
    b.add_argument("--comm", action="append")
    b.add_argument("--matrix", default="")
    b.add_argument("--first")
    b.add_argument("--second")
    b.add_argument("--action", action="append")
    b.add_argument("--data")
    b.add_argument("--pres")
    b.add_argument("--sub")
    b.add_argument("--gens", default="")
    b.add_argument("--name")
    b.add_argument("--word")
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("eval", help="canonical representative of a word")
    e.add_argument("path")
    e.add_argument("word")
    e.set_defaults(func=cmd_eval)

    q = sub.add_parser("equal", help="whether two words name the same element")
    q.add_argument("path")
    q.add_argument("word1")
    q.add_argument("word2")
    q.set_defaults(func=cmd_equal)

    r = sub.add_parser("relator", help="whether a word is a global relator")
    r.add_argument("path")
    r.add_argument("word")
    r.set_defaults(func=cmd_relator)

    l = sub.add_parser("ball", help="ball sizes around the identity")
    l.add_argument("path")
    l.add_argument("-r", "--radius", type=int, required=True)
    l.add_argument("--list", action="store_true")
    l.set_defaults(func=cmd_ball)

    c = sub.add_parser("conj", help="conjugacy of two words")
    c.add_argument("path")
    c.add_argument("word1")
    c.add_argument("word2")
    c.set_defaults(func=cmd_conj)

    k = sub.add_parser("check", help="validate a presentation")
    k.add_argument("path")
    k.set_defaults(func=cmd_check)

    f = sub.add_parser("fo", help="decide or compile a first-order formula")
    f.add_argument("path")
    f.add_argument("formula", nargs="?")
    f.add_argument("--formula-file")
    f.add_argument("--decide", action="store_true")
    f.add_argument("--compile", metavar="OUT")
    f.add_argument("--vars")
    f.set_defaults(func=cmd_fo)

    x = sub.add_parser("export", help="write DOT files for the automata")
    x.add_argument("path")
    x.add_argument("--dot", required=True, metavar="DIR")
    x.set_defaults(func=cmd_export)
    return parser


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        if args.seed is not None:
            random.seed(args.seed)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except fo.FormulaError as exc:
        print(f"formula error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

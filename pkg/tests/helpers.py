"""Shared test utilities: brute-force language oracles and ball BFS."""

import math
import random

from cayleyauto import decision as dec, fa, relations as rel
from cayleyauto.fa import Word
from cayleyauto.presentations.core import GroupWord


def all_words(alphabet, max_length):
    out = [()]
    frontier = [()]
    for _ in range(max_length):
        new = [w + (c,) for w in frontier for c in range(alphabet.size)]
        out.extend(new)
        frontier = new
    return [Word(alphabet, w) for w in out]


def language(automaton, max_length):
    """Accepted index tuples up to a length, by brute-force membership."""
    a = automaton.alphabet
    return {
        w.indices for w in all_words(a, max_length) if fa.accepts(automaton, w)
    }


def random_nfa(rng, alphabet, max_states=4):
    n = rng.randint(1, max_states)
    states = range(n)
    trans = {}
    for q in states:
        for s in range(alphabet.size):
            targets = {t for t in states if rng.random() < 0.3}
            if targets:
                trans[(q, s)] = targets
    initial = {q for q in states if rng.random() < 0.5} or {0}
    accepting = frozenset(q for q in states if rng.random() < 0.4)
    return fa.Nfa(alphabet, n, initial, accepting, trans)


def ball_words(P, radius):
    """BFS ball as a list of shells of representative words."""
    rels = [P.relation(n, s) for n in P.generators for s in (1, -1)]
    seen = {P.identity.indices}
    shells = [[P.identity]]
    for _ in range(radius):
        new = []
        for u in shells[-1]:
            for r in rels:
                v = dec.eval_function(r, [u])
                if v.indices not in seen:
                    seen.add(v.indices)
                    new.append(v)
        shells.append(new)
    return shells


def ball_sizes(P, radius):
    shells = ball_words(P, radius)
    out = []
    total = 0
    for shell in shells:
        total += len(shell)
        out.append(total)
    return out


def random_group_word(rng, names, max_length):
    length = rng.randint(0, max_length)
    return GroupWord(
        [(rng.choice(names), rng.choice((1, -1))) for _ in range(length)]
    )


def label_isomorphic(P, Q, radius, name_map):
    """Whether BFS balls of two presentations match as labeled rooted graphs."""
    def edges(pres, r, names):
        rels = {(n, s): pres.relation(n, s) for n in names for s in (1, -1)}
        seen = {pres.identity.indices}
        frontier = [pres.identity]
        out = {}
        for _ in range(r):
            new = []
            for u in frontier:
                for key, rr in rels.items():
                    v = dec.eval_function(rr, [u])
                    out[(u.indices,) + key] = v.indices
                    if v.indices not in seen:
                        seen.add(v.indices)
                        new.append(v)
            frontier = new
        return out

    ep = edges(P, radius, list(name_map))
    eq = edges(Q, radius, [name_map[k] for k in name_map])
    mapping = {P.identity.indices: Q.identity.indices}
    frontier = [P.identity.indices]
    for _ in range(radius):
        new = []
        for u in frontier:
            for n in name_map:
                for s in (1, -1):
                    v = ep[(u, n, s)]
                    w = eq[(mapping[u], name_map[n], s)]
                    if v in mapping:
                        if mapping[v] != w:
                            return False
                    else:
                        mapping[v] = w
                        new.append(v)
        frontier = new
    return len(mapping) == len(set(mapping.values()))


class HeisenbergOracle:
    """Upper unitriangular 3x3 integer matrices with generator names."""

    GENS = {
        "A": (1, 0, 0),
        "B": (0, 1, 0),
        "C": (0, 0, 1),
    }

    @staticmethod
    def mul(g, h):
        a1, b1, c1 = g
        a2, b2, c2 = h
        return (a1 + a2, b1 + b2 + a1 * c2, c1 + c2)

    @classmethod
    def inv(cls, g):
        a, b, c = g
        return (-a, a * c - b, -c)

    @classmethod
    def apply(cls, g, name, sign):
        h = cls.GENS[name]
        return cls.mul(g, h if sign == 1 else cls.inv(h))

    @classmethod
    def evaluate(cls, w):
        g = (0, 0, 0)
        for name, sign in w:
            g = cls.apply(g, name, sign)
        return g

    @classmethod
    def conjugate_truth(cls, g, h):
        (a1, b1, c1), (a2, b2, c2) = g, h
        if (a1, c1) != (a2, c2):
            return False
        d = math.gcd(a1, c1)
        return (b1 - b2) % d == 0 if d else b1 == b2


# ---------------------------------------------------------------------------
# random first-order formulas over finite structures, with a naive evaluator


def finite_structure(rng, alphabet, max_word_len=2):
    """A random automatic structure whose domain is every word up to a
    length, with one unary and one binary relation over random tuples."""
    from cayleyauto import fo

    words = all_words(alphabet, max_word_len)
    dom = rel.relation_from_tuples(alphabet, 1, [(w,) for w in words])
    domain = rel.relation_language(dom)
    unary = [w for w in words if rng.random() < 0.4] or [words[0]]
    binary = [
        (u, v) for u in words for v in words if rng.random() < 0.25
    ] or [(words[0], words[0])]
    struct = fo.AutomaticStructure(
        domain,
        {
            "S": rel.relation_from_tuples(alphabet, 1, [(w,) for w in unary]),
            "R": rel.relation_from_tuples(alphabet, 2, binary),
        },
    )
    tables = {
        "S": {w.indices for w in unary},
        "R": {(u.indices, v.indices) for u, v in binary},
    }
    return struct, [w for w in words], tables


VARS = ("x", "y", "z")


def random_formula(rng, depth, bound):
    """Formula text with free variables drawn from VARS; `bound` is the set
    of variables currently quantified."""
    if depth == 0 or rng.random() < 0.3:
        kind = rng.randrange(3)
        if kind == 0:
            return f"S({rng.choice(VARS)})"
        if kind == 1:
            return f"R({rng.choice(VARS)},{rng.choice(VARS)})"
        return f"{rng.choice(VARS)} = {rng.choice(VARS)}"
    kind = rng.randrange(5)
    if kind == 0:
        return f"! ({random_formula(rng, depth - 1, bound)})"
    if kind in (1, 2, 3):
        op = {1: "&", 2: "|", 3: "->"}[kind]
        a = random_formula(rng, depth - 1, bound)
        b = random_formula(rng, depth - 1, bound)
        return f"({a}) {op} ({b})"
    free = [v for v in VARS if v not in bound]
    if not free:
        return random_formula(rng, depth - 1, bound)
    v = rng.choice(free)
    q = rng.choice("EA")
    return f"{q} {v} ({random_formula(rng, depth - 1, bound | {v})})"


def naive_eval(node, tables, domain_words, env):
    """Direct model checking of a parsed formula over a finite structure."""
    from cayleyauto import fo

    if isinstance(node, fo.Atom):
        args = tuple(env[v] for v in node.args)
        if node.name == "S":
            return args[0] in tables["S"]
        return args in tables["R"]
    if isinstance(node, fo.VarEqual):
        return env[node.left] == env[node.right]
    if isinstance(node, fo.Not):
        return not naive_eval(node.body, tables, domain_words, env)
    if isinstance(node, fo.And):
        return naive_eval(node.left, tables, domain_words, env) and naive_eval(
            node.right, tables, domain_words, env
        )
    if isinstance(node, fo.Or):
        return naive_eval(node.left, tables, domain_words, env) or naive_eval(
            node.right, tables, domain_words, env
        )
    if isinstance(node, fo.Implies):
        return (not naive_eval(node.left, tables, domain_words, env)) or naive_eval(
            node.right, tables, domain_words, env
        )
    if isinstance(node, fo.Exists):
        return any(
            naive_eval(node.body, tables, domain_words, {**env, node.var: w})
            for w in domain_words
        )
    if isinstance(node, fo.Forall):
        return all(
            naive_eval(node.body, tables, domain_words, {**env, node.var: w})
            for w in domain_words
        )
    raise TypeError(node)


def check_formula_soundness(rng, struct, words, tables, depth=3):
    """Compare one random compiled formula against naive evaluation on every
    assignment; returns the number of assignments checked."""
    import itertools

    from cayleyauto import fo

    text = random_formula(rng, depth, frozenset())
    node = fo.parse_formula(text)
    fv = tuple(sorted(fo.free_variables(node)))
    domain_words = [w.indices for w in words]
    if not fv:
        got = fo.decide(struct, node)
        expect = naive_eval(node, tables, domain_words, {})
        assert got == expect, text
        return 1
    order, r = fo.compile(struct, node)
    checked = 0
    for assign in itertools.product(words, repeat=len(fv)):
        env = {v: w.indices for v, w in zip(fv, assign)}
        expect = naive_eval(node, tables, domain_words, env)
        if isinstance(r, bool):
            # some formulas with free variables compile to a constant
            # (e.g. x = x relativized to a nonempty domain)
            got = r
        else:
            # the compiler may eliminate semantically irrelevant variables
            by_var = dict(zip(fv, assign))
            got = r.contains(tuple(by_var[v] for v in order))
        assert got == expect, (text, env)
        checked += 1
    return checked

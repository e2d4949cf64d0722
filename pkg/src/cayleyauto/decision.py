"""Decision procedures on graph-automatic presentations: word evaluation,
equality, relator verification, conjugacy, ball enumeration, and growth
diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import fa, fo, relations as rel
from .fa import Word


@dataclass
class EvalTrace:
    """Record of a right-multiplication run: the input group word, the
    representative after each letter, and the automaton transitions taken."""

    word: object
    steps: list = field(default_factory=list)
    transitions: int = 0


@dataclass
class GrowthReport:
    """Ball sizes against the |Σ|^(C·n) bound, with the per-generator
    constants C = C₁·C₂ (relation states × domain states)."""

    sizes: list
    constants: dict
    bounds: list
    ok: bool


def eval_function(r, inputs):
    """The unique y with (x₁,..,xₙ,y) in r for a functional relation of
    arity n+1.

    Runs the relation automaton over the fixed input tracks with the output
    track unknown.  The output either ends within the input columns or
    extends past them by at most the state count, so the search is linear in
    the input length with constants depending only on r.
    """
    n = r.arity - 1
    inputs = list(inputs)
    if len(inputs) != n:
        raise ValueError(f"expected {n} inputs for an arity-{r.arity} relation")
    y, _ = _eval_search(r, inputs)
    return y


def _eval_search(r, inputs):
    """(output word, transitions taken); raises if zero or several outputs."""
    conv = r.conv
    d = r.dfa
    n = r.arity - 1
    maxlen = max((len(u) for u in inputs), default=0)
    steps = 0

    def column(pos, ydig):
        t = tuple(
            u.indices[pos] if pos < len(u) else rel.PAD for u in inputs
        ) + (ydig,)
        if all(c == rel.PAD for c in t):
            return None
        return conv.index_of(t)

    # per automaton state keep up to two distinct output prefixes, so that a
    # second accepted output (a functionality violation) is always detected
    def push(store, q, words):
        cur = store.setdefault(q, [])
        for w in words:
            if w not in cur:
                cur.append(w)
                if len(cur) > 2:
                    cur.pop()

    found = []

    def record(store):
        for q, words in store.items():
            if q in d.accepting:
                for w in words:
                    if w not in found:
                        found.append(w)

    # states split by whether the output track has already ended
    running = {d.initial: [()]}
    ended = {}
    for pos in range(maxlen):
        nrun, nend = {}, {}
        for q, words in running.items():
            row = d.rows.get(q, {})
            for ydig in range(conv.radix - 1):
                sym = column(pos, ydig)
                if sym in row and row[sym] != d.sink:
                    steps += 1
                    push(nrun, row[sym], [w + (ydig,) for w in words])
            sym = column(pos, rel.PAD)
            if sym is not None and sym in row and row[sym] != d.sink:
                steps += 1
                push(nend, row[sym], words)
        for q, words in ended.items():
            row = d.rows.get(q, {})
            sym = column(pos, rel.PAD)
            if sym is not None and sym in row and row[sym] != d.sink:
                steps += 1
                push(nend, row[sym], words)
        running, ended = nrun, nend
    record(running)
    record(ended)
    # the output may outrun the inputs by at most the state count
    for _ in range(d.n_states + 1):
        nrun = {}
        for q, words in running.items():
            row = d.rows.get(q, {})
            for ydig in range(conv.radix - 1):
                # inputs exhausted: all-pad columns except the output digit
                sym = conv.index_of(tuple([rel.PAD] * n + [ydig]))
                if sym in row and row[sym] != d.sink:
                    steps += 1
                    push(nrun, row[sym], [w + (ydig,) for w in words])
        running = nrun
        record(running)
        if len(found) > 1:
            break
    if len(found) > 1:
        raise ValueError("relation is not functional on these inputs")
    if not found:
        raise ValueError("no output: inputs outside the relation's domain")
    return Word(r.base, found[0]), steps


def right_multiply(P, u, w, trace=None):
    """Representative of ν(u)·w̄ by applying each letter's edge relation."""
    for name, sign in w:
        r = P.relation(name, sign)
        u, steps = _eval_search(r, [u])
        if trace is not None:
            trace.steps.append(u)
            trace.transitions += steps
    return u


def eval_trace(P, u, w):
    """Right multiplication with a step-by-step record."""
    trace = EvalTrace(word=w)
    result = right_multiply(P, u, w, trace=trace)
    return result, trace


def canonical_rep(P, w):
    """Representative of the element spelled by the group word."""
    return right_multiply(P, P.identity, w)


def words_equal(P, w1, w2):
    """Whether two group words name the same element (ν is bijective, so
    canonical representatives compare literally)."""
    return canonical_rep(P, w1).indices == canonical_rep(P, w2).indices


def is_identity(P, w):
    return canonical_rep(P, w).indices == P.identity.indices


def _right_chain(P, w):
    """Composition of edge relations along a group word."""
    cur = rel.equality_relation(P.domain)
    for name, sign in w:
        cur = rel.compose(cur, P.relation(name, sign))
    return cur


def _left_chain(P, w):
    """Composition of left edge relations: u -> w̄·u."""
    cur = rel.equality_relation(P.domain)
    for name, sign in reversed(list(w)):
        r = P.left[name] if sign == 1 else rel.transpose(P.left[name])
        cur = rel.compose(cur, r)
    return cur


def relator_holds(P, w):
    """Whether the group word is a relator globally: its composed edge
    relation is the identity map on every representative."""
    if not len(w):
        raise ValueError("the word must be nonempty")
    chain = _right_chain(P, w)
    return fa.language_equal(chain.dfa, rel.equality_relation(P.domain).dfa)


def ball(P, radius):
    """Representatives within the given Cayley-graph distance of the
    identity, in breadth-first order, each shell sorted length-lex."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    rels = [P.relation(n, s) for n in P.generators for s in (1, -1)]
    seen = {P.identity.indices}
    out = [P.identity]
    frontier = [P.identity]
    for _ in range(radius):
        shell = []
        for u in frontier:
            for r in rels:
                v, _ = _eval_search(r, [u])
                if v.indices not in seen:
                    seen.add(v.indices)
                    shell.append(v)
        shell.sort(key=lambda w: (len(w), w.indices))
        out.extend(shell)
        frontier = shell
    return out


def growth_constants(P):
    """Per-generator constants C = C₁·C₂ bounding how far one edge step can
    grow a representative (relation states times domain states)."""
    dom = fa.minimize(fa.to_dfa(P.domain)).n_states
    return {
        name: fa.minimize(r.dfa).n_states * dom
        for name, r in P.generators.items()
    }


def growth_profile(P, radius):
    """Ball sizes with the |Σ|^(C·n) bound they must respect."""
    consts = growth_constants(P)
    c = max(max(consts.values(), default=1), len(P.identity)) + 1
    sigma = max(P.base.size, 2)
    rels = [P.relation(n, s) for n in P.generators for s in (1, -1)]
    seen = {P.identity.indices}
    frontier = [P.identity]
    sizes = [1]
    for _ in range(radius):
        new = []
        for u in frontier:
            for r in rels:
                v, _ = _eval_search(r, [u])
                if v.indices not in seen:
                    seen.add(v.indices)
                    new.append(v)
        frontier = new
        sizes.append(sizes[-1] + len(new))
    bounds = [sigma ** (c * n) for n in range(radius + 1)]
    ok = all(s <= b for s, b in zip(sizes, bounds))
    return GrowthReport(sizes=sizes, constants=consts, bounds=bounds, ok=ok)


def check_presentation(P):
    """Diagnostic report: the identity is a representative, every edge
    relation stays within the representatives and is a bijection of them."""
    report = {
        "identity_in_domain": fa.accepts(P.domain, P.identity),
        "relations": {},
        "ok": True,
    }
    consts = growth_constants(P)
    items = [(name, r) for name, r in P.generators.items()]
    if P.left:
        items += [(f"left:{name}", r) for name, r in P.left.items()]
    eq = rel.equality_relation(P.domain)
    for name, r in items:
        struct = fo.AutomaticStructure(P.domain, {"F": r})
        # functional iff {(v,w) : some u maps to both} is within equality,
        # injective iff {(u,v) : both map to some w} is; the inclusions are
        # decided directly, which prunes far better than ∀∀∀ sentences
        entry = {
            "in_domain": rel.relation_in_domain_power(r, P.domain),
            "total": fo.decide(struct, "A u (E v (F(u,v)))"),
            "functional": fa.is_subset(
                rel.compose(rel.transpose(r), r).dfa, eq.dfa
            ),
            "injective": fa.is_subset(
                rel.compose(r, rel.transpose(r)).dfa, eq.dfa
            ),
            "surjective": fo.decide(struct, "A v (E u (F(u,v)))"),
            "growth_constant": consts.get(name.replace("left:", "")),
        }
        entry["ok"] = all(
            entry[k]
            for k in ("in_domain", "total", "functional", "injective", "surjective")
        )
        report["relations"][name] = entry
        report["ok"] = report["ok"] and entry["ok"]
    report["ok"] = report["ok"] and report["identity_in_domain"]
    return report


def monoid_growth_bound_check(struct, elements, n):
    """Multiply n factors through the structure's ternary operation by
    balanced splitting and check the product length against
    max|mᵢ| + C·ceil(log₂ n)."""
    ops = [r for r in struct.relations.values() if r.arity == 3]
    if not ops:
        raise ValueError("the structure has no ternary operation relation")
    op = ops[0]
    if n < 1:
        raise ValueError("need at least one factor")
    factors = list(elements)
    if len(factors) == 1:
        factors = factors * n
    if len(factors) != n:
        raise ValueError("pass one element or exactly n elements")

    def prod(lo, hi):
        if hi - lo == 1:
            return factors[lo]
        mid = (lo + hi) // 2
        return eval_function(op, [prod(lo, mid), prod(mid, hi)])

    value = prod(0, n)
    c = fa.minimize(op.dfa).n_states * struct.domain.n_states
    bound = max(len(m) for m in factors) + c * max(1, math.ceil(math.log2(n)))
    return {
        "value": value,
        "length": len(value),
        "bound": bound,
        "constant": c,
        "ok": len(value) <= bound,
    }


def conjugate(P, p, q):
    """(conjugate?, witness): whether p̄ and q̄ are conjugate, via the regular
    set S = {u : u·p̄ = q̄·u}; the witness is its length-lex-least member."""
    if not P.is_biautomatic():
        raise ValueError("conjugacy needs a presentation with left relations")
    rp = _right_chain(P, p)
    lq = _left_chain(P, q)
    s = rel.project(rel.rel_intersect(rp, lq), 1)
    words = fa.enumerate_words(s.dfa, max_length=s.dfa.n_states + 1, count=1)
    if not words:
        return False, None
    w = words[0]
    track = rel.deconvolve(w)[0] if isinstance(
        w.alphabet, rel.ConvolutionAlphabet
    ) else w
    if track.alphabet.symbols != P.base.symbols:
        track = Word(P.base, track.indices)
    return True, track

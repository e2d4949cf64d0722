"""Closure constructions: products, extensions, subgroups, and generator
changes on graph-automatic presentations."""

from __future__ import annotations

from functools import reduce

from .. import fa, relations as rel
from ..fa import Alphabet, Dfa, Nfa, Word
from .core import GraphAutomaticPresentation, GroupWord


def _retag(word, U, tag):
    """Re-spell a word over a tagged copy of its alphabet inside U."""
    return Word(
        U, tuple(U.index[f"{tag}{word.alphabet.symbols[i]}"] for i in word.indices)
    )


def _tag_maps(P, Q, extra=()):
    syms = [f"1.{s}" for s in P.base.symbols] + [f"2.{s}" for s in Q.base.symbols]
    U = Alphabet(syms + list(extra))
    mp = {i: U.index[f"1.{s}"] for i, s in enumerate(P.base.symbols)}
    mq = {i: U.index[f"2.{s}"] for i, s in enumerate(Q.base.symbols)}
    return U, mp, mq


def _paired_names(P, Q):
    """Generator names for a two-factor construction, disambiguated only
    when the factors collide."""
    if set(P.generators) & set(Q.generators):
        return (
            {x: f"1_{x}" for x in P.generators},
            {y: f"2_{y}" for y in Q.generators},
        )
    return {x: x for x in P.generators}, {y: y for y in Q.generators}


def _word_dfa(word):
    """DFA accepting exactly one word."""
    rows = {i: {word.indices[i]: i + 1} for i in range(len(word))}
    rows[len(word)] = {}
    return Dfa(
        word.alphabet,
        len(word) + 2,
        0,
        frozenset({len(word)}),
        rows,
        len(word) + 1,
    )


def _image_words(p_or_rel, r, u):
    """All v with (u, v) in r."""
    wr = rel.relation_from_tuples(r.base, 1, [(u,)])
    img = rel.project(rel.join([(r, (0, 1)), (wr, (0,))], 2), 0)
    return [t[0] for t in img.tuples(max_length=len(u) + r.dfa.n_states + 2)]


# ---------------------------------------------------------------------------
# direct product


def direct_product(P, Q):
    """P x Q: elements are convolutions of the factor representatives; each
    factor's generators act on their own track."""
    U, mp, mq = _tag_maps(P, Q)
    domP = rel.relabel_base(P.domain, U, mp)
    domQ = rel.relabel_base(Q.domain, U, mq)
    domain = rel.join(
        [(rel.language_relation(domP), (0,)), (rel.language_relation(domQ), (1,))], 2
    ).dfa
    eqP = rel.embed_relation(rel.equality_relation(P.domain), U, mp)
    eqQ = rel.embed_relation(rel.equality_relation(Q.domain), U, mq)
    np_, nq_ = _paired_names(P, Q)

    def pair(a, b):
        return rel.group_tracks(rel.join([(a, (0, 2)), (b, (1, 3))], 4), 2)

    gens = {}
    for x, r in P.generators.items():
        gens[np_[x]] = pair(rel.embed_relation(r, U, mp), eqQ)
    for y, r in Q.generators.items():
        gens[nq_[y]] = pair(eqP, rel.embed_relation(r, U, mq))
    left = None
    if P.is_biautomatic() and Q.is_biautomatic():
        left = {}
        for x, r in P.left.items():
            left[np_[x]] = pair(rel.embed_relation(r, U, mp), eqQ)
        for y, r in Q.left.items():
            left[nq_[y]] = pair(eqP, rel.embed_relation(r, U, mq))
    identity = rel.convolve(
        [_retag(P.identity, U, "1."), _retag(Q.identity, U, "2.")],
        alphabet=rel.conv_alphabet(U, 2),
    )
    meta = {
        "description": f"({P.describe()}) x ({Q.describe()})",
        "builder": "direct_product",
        "names": [dict(np_), dict(nq_)],
    }
    return GraphAutomaticPresentation(
        rel.conv_alphabet(U, 2), domain, identity, gens, left, meta
    )


# ---------------------------------------------------------------------------
# semidirect product


def semidirect(P, Q, action):
    """P semidirect Q: elements s·r with s from Q and r from P; a Q-generator
    y sends (s, r) to (s·y, r^y) where r^y is given by action[y], the graph
    of r -> y^-1 r y on P's domain (the inverse action is its transpose)."""
    if set(action) != set(Q.generators):
        raise ValueError("need exactly one action relation per Q generator")
    eqP_plain = rel.equality_relation(P.domain)
    acts = {}
    for y, a in action.items():
        if a.arity != 2 or a.base != P.base:
            raise ValueError(f"action for {y!r} must be binary over P's alphabet")
        a = rel.restrict_relation_to_domain(a, P.domain)
        fwd = rel.compose(a, rel.transpose(a))
        back = rel.compose(rel.transpose(a), a)
        if not (
            fa.language_equal(fwd.dfa, eqP_plain.dfa)
            and fa.language_equal(back.dfa, eqP_plain.dfa)
        ):
            raise ValueError(f"action for {y!r} is not a bijection of P's domain")
        if not a.contains((P.identity, P.identity)):
            raise ValueError(f"action for {y!r} does not fix the identity")
        acts[y] = a
    U, mp, mq = _tag_maps(P, Q)
    domP = rel.relabel_base(P.domain, U, mp)
    domQ = rel.relabel_base(Q.domain, U, mq)
    domain = rel.join(
        [(rel.language_relation(domQ), (0,)), (rel.language_relation(domP), (1,))], 2
    ).dfa
    eqP = rel.embed_relation(eqP_plain, U, mp)
    eqQ = rel.embed_relation(rel.equality_relation(Q.domain), U, mq)
    np_, nq_ = _paired_names(P, Q)

    def pair(qrel, prel):
        return rel.group_tracks(rel.join([(qrel, (0, 2)), (prel, (1, 3))], 4), 2)

    gens = {}
    for x, r in P.generators.items():
        gens[np_[x]] = pair(eqQ, rel.embed_relation(r, U, mp))
    for y, r in Q.generators.items():
        gens[nq_[y]] = pair(
            rel.embed_relation(r, U, mq), rel.embed_relation(acts[y], U, mp)
        )
    identity = rel.convolve(
        [_retag(Q.identity, U, "2."), _retag(P.identity, U, "1.")],
        alphabet=rel.conv_alphabet(U, 2),
    )
    meta = {
        "description": f"({P.describe()}) semidirect ({Q.describe()})",
        "builder": "semidirect",
        "names": [dict(np_), dict(nq_)],
    }
    return GraphAutomaticPresentation(
        rel.conv_alphabet(U, 2), domain, identity, gens, None, meta
    )


# ---------------------------------------------------------------------------
# free product


def free_product(P, Q):
    """P * Q over alternating-syllable normal forms: nonidentity factor
    representatives joined by a separator symbol, adjacent syllables from
    different factors; the empty word is the identity."""
    U, mp, mq = _tag_maps(P, Q, extra=["."])
    SEP = U.index["."]
    conv2 = rel.conv_alphabet(U, 2)
    DP = fa.minimize(fa.difference(P.domain, _word_dfa(P.identity)))
    DQ = fa.minimize(fa.difference(Q.domain, _word_dfa(Q.identity)))
    for D, which in ((DP, "first"), (DQ, "second")):
        if fa.accepts(D, Word(D.alphabet, ())):
            raise ValueError(
                f"the {which} factor has an empty non-identity representative"
            )
    DPu = rel.relabel_base(DP, U, mp)
    DQu = rel.relabel_base(DQ, U, mq)

    # deterministic automaton for the alternating normal forms, with its
    # state table kept around for building the edge relations
    ids = {}
    rows = {}

    def sid(s):
        if s not in ids:
            ids[s] = len(ids)
            rows[ids[s]] = {}
        return ids[s]

    START, TOP, TOQ = sid("start"), sid("toP"), sid("toQ")
    for D, tag, to_other in ((DPu, "P", TOQ), (DQu, "Q", TOP)):
        for q in range(D.n_states):
            if q == D.sink:
                continue
            me = sid((tag, q))
            for c, t in D.rows.get(q, {}).items():
                rows[me][c] = sid((tag, t))
            if q in D.accepting:
                rows[me][SEP] = to_other
    for D, tag, src in ((DPu, "P", TOP), (DQu, "Q", TOQ)):
        first = {c: sid((tag, t)) for c, t in D.rows.get(D.initial, {}).items()}
        rows[src].update(first)
        rows[START].update(first)
    accepting = {START} | {
        ids[s]
        for s in ids
        if isinstance(s, tuple)
        and s[1] in (DPu if s[0] == "P" else DQu).accepting
    }
    n = len(ids)
    domain = fa.minimize(Dfa(U, n + 1, START, frozenset(accepting), rows, n))

    def edge(fac, other_tag, tag_prefix, mapping, branch_state):
        """Edge relation for one generator of factor `fac`; syllables of the
        other factor pass through by equality."""

        def build(x):
            E = fac.relation(x)
            sx = _image_words(fac, E, fac.identity)
            assert len(sx) == 1
            sx = sx[0]
            if sx.indices == fac.identity.indices:
                return rel.equality_relation(domain)
            nonid = rel.language_relation(DP if tag_prefix == "1." else DQ)
            # both sides stay nonidentity syllables: modify the last syllable
            mod = rel.embed_relation(
                rel.join([(E, (0, 1)), (nonid, (0,)), (nonid, (1,))], 2), U, mapping
            ).dfa
            # words whose syllable cancels to the identity
            lc = rel.relation_language(
                rel.project(
                    rel.join(
                        [
                            (E, (0, 1)),
                            (
                                rel.relation_from_tuples(
                                    fac.base, 1, [(fac.identity,)]
                                ),
                                (1,),
                            ),
                        ],
                        2,
                    ),
                    1,
                )
            )
            lcu = rel.relabel_base(lc, U, mapping)
            sxu = _retag(sx, U, tag_prefix)

            trans = {}

            def add(q, col, t):
                trans.setdefault((q, conv2.index_of(col)), set()).add(t)

            # phase 1: equal prefixes, walking the normal-form automaton
            for q, row in rows.items():
                for c, t in row.items():
                    add(q, (c, c), t)
            oE = n
            oL = oE + mod.n_states
            oC = oL + lcu.n_states
            total = oC + len(sxu) + 1
            accept = set()
            # modify the last syllable in place
            for src in (START, branch_state):
                for sym, t in mod.rows.get(mod.initial, {}).items():
                    if t != mod.sink:
                        add2(trans, src, sym, oE + t)
            for q, row in mod.rows.items():
                for sym, t in row.items():
                    if t != mod.sink:
                        add2(trans, oE + q, sym, oE + t)
            accept.update(oE + q for q in mod.accepting if q != mod.sink)
            # cancel the last syllable entirely
            for c, t in lcu.rows.get(lcu.initial, {}).items():
                if t != lcu.sink:
                    add(START, (c, rel.PAD), oL + t)
            other = "Q" if branch_state == TOP else "P"
            oth_dfa = DQu if other == "Q" else DPu
            for q in range(oth_dfa.n_states):
                if q in oth_dfa.accepting and (other, q) in ids:
                    src = ids[(other, q)]
                    add(src, (SEP, rel.PAD), oL + lcu.initial)
                    # append a fresh syllable after the separator
                    add(src, (rel.PAD, SEP), oC)
            for q, row in lcu.rows.items():
                for c, t in row.items():
                    if t != lcu.sink:
                        add(oL + q, (c, rel.PAD), oL + t)
            accept.update(oL + q for q in lcu.accepting if q != lcu.sink)
            if lcu.initial in lcu.accepting:
                # a syllable never cancels via the empty word
                raise AssertionError("empty cancelling syllable")
            # append the generator's own syllable
            add(START, (rel.PAD, sxu.indices[0]), oC + 1)
            for i, c in enumerate(sxu.indices):
                add(oC + i, (rel.PAD, c), oC + i + 1)
            accept.add(oC + len(sxu))
            nfa = Nfa(conv2, total, {START}, frozenset(accept), trans)
            return rel.restrict_relation_to_domain(
                rel.make_relation(U, 2, nfa), domain
            )

        return build

    def add2(trans, q, sym, t):
        trans.setdefault((q, sym), set()).add(t)

    np_, nq_ = _paired_names(P, Q)
    gens = {}
    buildP = edge(P, "Q", "1.", mp, TOP)
    buildQ = edge(Q, "P", "2.", mq, TOQ)
    for x in P.generators:
        gens[np_[x]] = buildP(x)
    for y in Q.generators:
        gens[nq_[y]] = buildQ(y)
    meta = {
        "description": f"({P.describe()}) * ({Q.describe()})",
        "builder": "free_product",
        "names": [dict(np_), dict(nq_)],
    }
    return GraphAutomaticPresentation(
        U, domain, Word(U, ()), gens, None, meta
    )


# ---------------------------------------------------------------------------
# finite extensions


def finite_extension(data):
    """A group with subgroup H of finite index r, from coset data: elements
    h·k_i are H-representatives convolved with a coset symbol."""
    H = data.base
    r = data.index
    U = Alphabet(list(H.base.symbols) + [f"k{s}" for s in range(r)])
    mh = {i: i for i in range(H.base.size)}
    cosym = [Word.from_names(U, [f"k{s}"]) for s in range(r)]
    hdom = rel.relabel_base(H.domain, U, mh)
    domain = rel.join(
        [
            (rel.language_relation(hdom), (0,)),
            (rel.relation_from_tuples(U, 1, [(w,) for w in cosym]), (1,)),
        ],
        2,
    ).dfa

    def chain(word):
        cur = rel.equality_relation(H.domain)
        for name, sgn in word:
            cur = rel.compose(cur, H.relation(name, sgn))
        return cur

    def assemble(cases):
        joined = [
            rel.join([(c, (0, 2)), (pair, (1, 3))], 4) for c, pair in cases
        ]
        return rel.group_tracks(reduce(rel.rel_union, joined), 2)

    gens = {}
    for x in H.generators:
        cases = []
        for i in range(r):
            w = GroupWord([(x, 1)]) if i == 0 else data.conjugation[(i, x)]
            cases.append(
                (
                    rel.embed_relation(chain(w), U, mh),
                    rel.relation_from_tuples(U, 2, [(cosym[i], cosym[i])]),
                )
            )
        gens[x] = assemble(cases)
    for s in range(1, r):
        cases = []
        for i in range(r):
            cases.append(
                (
                    rel.embed_relation(chain(data.correction[i][s]), U, mh),
                    rel.relation_from_tuples(
                        U, 2, [(cosym[i], cosym[data.mult[i][s]])]
                    ),
                )
            )
        gens[f"k{s}"] = assemble(cases)
    identity = rel.convolve(
        [Word(U, H.identity.indices), cosym[0]], alphabet=rel.conv_alphabet(U, 2)
    )
    meta = {
        "description": f"finite extension of ({H.describe()}) of index {r}",
        "builder": "finite_extension",
        "index": r,
    }
    return GraphAutomaticPresentation(
        rel.conv_alphabet(U, 2), domain, identity, gens, None, meta
    )


# ---------------------------------------------------------------------------
# regular subgroups and generator changes


def restrict_to_regular_subgroup(P, subdomain, names):
    """The subgroup with representatives L(subdomain), generated by the given
    subset of P's generators; every retained edge must map the subgroup
    language into itself."""
    sub = fa.minimize(fa.to_dfa(subdomain))
    if sub.alphabet != P.base:
        raise ValueError("subgroup domain uses a different alphabet")
    if not fa.is_subset(sub, P.domain):
        raise ValueError("subgroup domain is not a subset of the representatives")
    if not fa.accepts(sub, P.identity):
        raise ValueError("subgroup domain must contain the identity word")
    names = list(names)
    sublang = rel.language_relation(sub)

    def closed(r):
        img = rel.relation_language(
            rel.project(rel.join([(r, (0, 1)), (sublang, (0,))], 2), 0)
        )
        return fa.is_subset(img, sub)

    gens = {}
    for x in names:
        if x not in P.generators:
            raise ValueError(f"unknown generator {x!r}")
        r = P.relation(x)
        if not (closed(r) and closed(rel.transpose(r))):
            raise ValueError(f"generator {x!r} does not preserve the subgroup")
        gens[x] = rel.restrict_relation_to_domain(r, sub)
    left = None
    if all(x in P.left for x in names):
        left = {}
        for x in names:
            r = P.left[x]
            if closed(r) and closed(rel.transpose(r)):
                left[x] = rel.restrict_relation_to_domain(r, sub)
            else:
                left = None
                break
    meta = {
        "description": f"regular subgroup of ({P.describe()})",
        "builder": "restrict_to_regular_subgroup",
        "generators": names,
    }
    return GraphAutomaticPresentation(P.base, sub, P.identity, gens, left, meta)


def extend_generator(P, name, w):
    """P with an extra generator equal to the group word w; its edge relation
    is the composition of the existing edges along w."""
    if not len(w):
        raise ValueError("the defining word must be nonempty")
    if name in P.generators:
        raise ValueError(f"generator {name!r} already exists")
    cur = rel.equality_relation(P.domain)
    for n, s in w:
        cur = rel.compose(cur, P.relation(n, s))
    gens = dict(P.generators)
    gens[name] = cur
    left = dict(P.left) if P.left else None
    if P.is_biautomatic():
        lcur = rel.equality_relation(P.domain)
        for n, s in reversed(list(w)):
            lr = P.left[n] if s == 1 else rel.transpose(P.left[n])
            lcur = rel.compose(lcur, lr)
        left[name] = lcur
    meta = dict(P.meta)
    meta["extended"] = meta.get("extended", []) + [[name, str(w)]]
    return GraphAutomaticPresentation(
        P.base, P.domain, P.identity, gens, left, meta
    )

"""Convolution of word tuples and the algebra of regular n-ary relations.

An arity-n relation over Σ* is stored as a DFA over the padded convolution
alphabet: all tuples in (Σ∪{◇})ⁿ except the all-◇ tuple, which is excluded at
the symbol level so malformed words are unrepresentable.  Every operation
returns a relation whose language is a subset of the valid convolutions
(padding persists per track, final column not all-◇), determinized and
minimized.
"""

from __future__ import annotations

from collections import deque

from . import fa
from .fa import PAD, Alphabet, Dfa, Nfa, Word


_SEPARATORS = (",", ";", "|", "/", ":", "!")
_PAD_NAMES = ("#", "~", "^", "%", "@")


class ConvolutionAlphabet(Alphabet):
    """Alphabet of padded columns: tuples over base symbols plus ◇ per track."""

    def __init__(self, base, arity):
        if arity < 1:
            raise ValueError("arity must be at least 1")
        self.base = base
        self.arity = arity
        self.radix = base.size + 1  # pad is the extra digit
        sep = next(s for s in _SEPARATORS if not any(s in n for n in base.symbols))
        pad_name = next(p for p in _PAD_NAMES if p not in base.symbols)
        names = []
        tuples = []
        for i in range(self.radix ** arity - 1):
            t = self._digits(i)
            tuples.append(t)
            names.append(sep.join(pad_name if c == PAD else base.symbols[c] for c in t))
        self._tuples = tuples
        super().__init__(names)

    def _digits(self, i):
        out = []
        for _ in range(self.arity):
            d = i % self.radix
            out.append(PAD if d == self.radix - 1 else d)
            i //= self.radix
        return tuple(out)

    def tuple_of(self, sym):
        """Component indices of a column symbol; PAD for padded tracks."""
        return self._tuples[sym]

    def index_of(self, components):
        """Symbol index of a column; the all-◇ column does not exist."""
        i = 0
        for c in reversed(components):
            d = self.radix - 1 if c == PAD else c
            if not (0 <= d < self.radix):
                raise ValueError("component out of range")
            i = i * self.radix + d
        if i == self.radix ** self.arity - 1:
            raise ValueError("the all-pad column is not a symbol")
        return i


_conv_cache = {}


def conv_alphabet(base, arity):
    """Cached column alphabet for a base alphabet and arity."""
    key = (base.symbols, arity)
    if key not in _conv_cache:
        _conv_cache[key] = ConvolutionAlphabet(base, arity)
    return _conv_cache[key]


class RegularRelation:
    """An arity-n regular relation stored as a DFA over the column alphabet."""

    def __init__(self, base, arity, dfa):
        self.base = base
        self.arity = arity
        self.dfa = dfa
        self.conv = dfa.alphabet
        if not isinstance(self.conv, ConvolutionAlphabet):
            raise ValueError("relation automaton must use a convolution alphabet")
        if self.conv.arity != arity or self.conv.base != base:
            raise ValueError("alphabet does not match declared base/arity")
        if dfa.sink is not None and dfa.sink in dfa.accepting:
            raise ValueError("valid relations cannot have an accepting sink")

    def contains(self, words):
        return fa.accepts(self.dfa, convolve(words, alphabet=self.conv))

    def tuples(self, max_length):
        """All member tuples whose convolution has at most max_length columns."""
        out = []
        for w in fa.enumerate_words(self.dfa, max_length=max_length):
            out.append(deconvolve(w))
        return out

    def __repr__(self):
        return f"RegularRelation(arity={self.arity}, states={self.dfa.n_states})"


def convolve(words, alphabet=None):
    """⊗: align a tuple of words into one word over the column alphabet."""
    words = tuple(words)
    if not words:
        raise ValueError("need at least one word")
    base = words[0].alphabet
    if any(w.alphabet != base for w in words):
        raise ValueError("alphabet mismatch")
    conv = alphabet if alphabet is not None else conv_alphabet(base, len(words))
    if conv.arity != len(words):
        raise ValueError("arity mismatch")
    length = max(len(w) for w in words)
    cols = []
    for k in range(length):
        col = tuple(w.indices[k] if k < len(w) else PAD for w in words)
        cols.append(conv.index_of(col))
    return Word(conv, tuple(cols))


def deconvolve(w):
    """Inverse of ⊗; raises on malformed padding."""
    conv = w.alphabet
    if not isinstance(conv, ConvolutionAlphabet):
        raise ValueError("not a convolution word")
    n = conv.arity
    tracks = [[] for _ in range(n)]
    ended = [False] * n
    for sym in w.indices:
        t = conv.tuple_of(sym)
        for i, c in enumerate(t):
            if c == PAD:
                ended[i] = True
            elif ended[i]:
                raise ValueError("invalid convolution: track resumed after padding")
            else:
                tracks[i].append(c)
    return tuple(Word(conv.base, tuple(tr)) for tr in tracks)


def _valid_step(conv, mask, sym):
    """Pad-persistence automaton step over end-of-track bitmasks; None = dead."""
    cache = getattr(conv, "_valid_cache", None)
    if cache is None:
        cache = conv._valid_cache = {}
    key = (mask, sym)
    if key in cache:
        return cache[key]
    out = mask
    for i, c in enumerate(conv.tuple_of(sym)):
        if c == PAD:
            out |= 1 << i
        elif mask & (1 << i):
            out = None
            break
    cache[key] = out
    return out


def valid_convolution(base, arity):
    """Total DFA for the language of well-formed convolutions."""
    conv = conv_alphabet(base, arity)
    ids = {0: 0}
    rows = {}
    queue = deque([0])
    order = [0]
    while queue:
        mask = queue.popleft()
        row = {}
        for sym in range(conv.size):
            m2 = _valid_step(conv, mask, sym)
            if m2 is None:
                continue
            if m2 not in ids:
                ids[m2] = len(order)
                order.append(m2)
                queue.append(m2)
            row[sym] = ids[m2]
        rows[ids[mask]] = row
    sink = len(order)
    return Dfa(conv, len(order) + 1, 0, frozenset(range(len(order))), rows, sink)


def _restrict_valid(d, conv):
    """Intersect a DFA over the column alphabet with the valid convolutions,
    computing the pad-persistence side on the fly (never enumerating the full
    alphabet)."""
    d = fa._ensure_sink(fa.to_dfa(d))
    dense = d.sink in d.accepting  # implicit default edges can still accept
    start = (d.initial, 0)
    ids = {start: 0}
    order = [start]
    rows = {}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        q, mask = pair
        row = {}
        drow = d.rows.get(q, {})
        if dense:
            edges = ((sym, drow.get(sym, d.sink)) for sym in range(conv.size))
        else:
            edges = drow.items()
        for sym, t in edges:
            if t == d.sink and not dense:
                continue
            m2 = _valid_step(conv, mask, sym)
            if m2 is None:
                continue
            tgt = (t, m2)
            if tgt not in ids:
                ids[tgt] = len(order)
                order.append(tgt)
                queue.append(tgt)
            row[sym] = ids[tgt]
        rows[ids[pair]] = row
    sink = len(order)
    accepting = frozenset(ids[p] for p in order if p[0] in d.accepting)
    return fa.minimize(Dfa(conv, len(order) + 1, 0, accepting, rows, sink))


def make_relation(base, arity, automaton):
    """Canonicalize an automaton over the column alphabet into a relation."""
    conv = (
        automaton.alphabet
        if isinstance(automaton.alphabet, ConvolutionAlphabet)
        else conv_alphabet(base, arity)
    )
    if automaton.alphabet.symbols != conv.symbols:
        raise ValueError("automaton alphabet does not match the column alphabet")
    d = fa.to_dfa(automaton)
    if d.alphabet is not conv and not isinstance(d.alphabet, ConvolutionAlphabet):
        d = Dfa(conv, d.n_states, d.initial, d.accepting, d.rows, d.sink)
    return RegularRelation(base, arity, _restrict_valid(d, conv))


def _check_compatible(r, s):
    if r.base != s.base or r.arity != s.arity:
        raise ValueError("base alphabet / arity mismatch")


def rel_intersect(r, s):
    _check_compatible(r, s)
    return RegularRelation(r.base, r.arity, fa.dfa_intersect(r.dfa, s.dfa))


def rel_union(r, s):
    _check_compatible(r, s)
    return RegularRelation(r.base, r.arity, fa.dfa_union(r.dfa, s.dfa))


def rel_difference(r, s):
    _check_compatible(r, s)
    return RegularRelation(r.base, r.arity, fa.dfa_difference(r.dfa, s.dfa))


def rel_complement(r):
    """Complement relative to the valid convolutions of Σ*ⁿ."""
    comp = fa.complement(r.dfa)
    return RegularRelation(r.base, r.arity, _restrict_valid(comp, r.conv))


def cylindrify(r, position, domain=None):
    """Insert a new track at the given position, ranging over Σ* or, when a
    domain automaton is supplied, over L(domain)."""
    if not (0 <= position <= r.arity):
        raise ValueError("position out of range")
    conv_out = conv_alphabet(r.base, r.arity + 1)
    d = r.dfa
    dom = None
    if domain is not None:
        dom = fa._ensure_sink(fa.minimize(fa.to_dfa(domain)))
    ENDED = -1

    def dom_steps(ds):
        """(new value, next dom state) options for one column of the track."""
        if dom is None:
            yield PAD, ENDED
            for v in range(r.base.size):
                yield v, ENDED
            return
        if ds == ENDED or ds in dom.accepting:
            yield PAD, ENDED
        if ds != ENDED:
            for v, t in dom.rows.get(ds, {}).items():
                if t != dom.sink:
                    yield v, t
    start_ds = ENDED if dom is None else dom.initial
    start = (d.initial, start_ds)
    ids = {start: 0}
    order = [start]
    trans = {}
    queue = deque([start])
    EXT = -1  # original tuple finished, the new track keeps running
    # inserting a digit at `position` in the mixed-radix symbol index
    radix = conv_out.radix
    low_mod = radix ** position
    high_mul = low_mod * radix
    tail_sym = radix ** r.arity - 1  # all old tracks ◇
    step_cache = {}
    while queue:
        state = queue.popleft()
        q, ds = state
        src = ids[state]
        if q == EXT:
            edges = [(tail_sym, EXT)]
        else:
            edges = [
                (sym, t) for sym, t in d.rows.get(q, {}).items() if t != d.sink
            ]
            if q in d.accepting:
                edges.append((tail_sym, EXT))
        if ds not in step_cache:
            step_cache[ds] = list(dom_steps(ds))
        steps = step_cache[ds]
        for sym, t in edges:
            low = sym % low_mod
            rest = low + (sym - low) * radix
            for v, ds2 in steps:
                if t == EXT and v == PAD:
                    continue  # the column would be all-◇
                digit = radix - 1 if v == PAD else v
                tgt = (t, ds2)
                if tgt not in ids:
                    ids[tgt] = len(order)
                    order.append(tgt)
                    queue.append(tgt)
                trans.setdefault((src, rest + digit * low_mod), set()).add(ids[tgt])
    accepting = set()
    for state in order:
        q, ds = state
        if q == EXT or q in d.accepting:
            if ds == ENDED or (dom is not None and ds in dom.accepting):
                accepting.add(ids[state])
    nfa = Nfa(conv_out, len(order), {0}, accepting, trans, validate=False)
    return make_relation(r.base, r.arity + 1, fa.determinize(nfa))


def permute_tracks(r, perm):
    """Result tuple (w₀..w_{n−1}) is a member iff (w_{perm[0]}, ..) ∈ r."""
    if sorted(perm) != list(range(r.arity)):
        raise ValueError("not a permutation")
    d = r.dfa
    rows = {}
    for q, row in d.rows.items():
        out = {}
        for sym, t in row.items():
            tup = r.conv.tuple_of(sym)
            big = [None] * r.arity
            for i, c in enumerate(tup):
                big[perm[i]] = c
            out[r.conv.index_of(tuple(big))] = t
        rows[q] = out
    d2 = Dfa(r.conv, d.n_states, d.initial, d.accepting, rows, d.sink)
    return RegularRelation(r.base, r.arity, fa.minimize(d2))


def transpose(r):
    if r.arity != 2:
        raise ValueError("transpose needs a binary relation")
    return permute_tracks(r, [1, 0])


def project(r, track):
    """Existentially quantify one track, with padding saturation for the case
    where the removed track runs longer than all remaining ones."""
    if r.arity < 2:
        raise ValueError("cannot project an arity-1 relation")
    if not (0 <= track < r.arity):
        raise ValueError("track out of range")
    d = r.dfa
    conv_out = conv_alphabet(r.base, r.arity - 1)
    # states from which acceptance is reachable via columns that are ◇ on
    # every remaining track
    tail_edges = {}
    for q, row in d.rows.items():
        for sym, t in row.items():
            if t == d.sink:
                continue
            tup = r.conv.tuple_of(sym)
            if all(c == PAD for i, c in enumerate(tup) if i != track):
                tail_edges.setdefault(t, set()).add(q)
    saturated = set(d.accepting)
    queue = deque(saturated)
    while queue:
        q = queue.popleft()
        for p in tail_edges.get(q, ()):
            if p not in saturated:
                saturated.add(p)
                queue.append(p)
    trans = {}
    for q, row in d.rows.items():
        for sym, t in row.items():
            if t == d.sink:
                continue
            tup = r.conv.tuple_of(sym)
            small = tup[:track] + tup[track + 1:]
            if all(c == PAD for c in small):
                continue  # this column disappears entirely
            trans.setdefault((q, conv_out.index_of(small)), set()).add(t)
    nfa = Nfa(conv_out, d.n_states, {d.initial}, saturated, trans)
    return make_relation(r.base, r.arity - 1, fa.determinize(nfa))


def compose(r, s):
    """(u,w) ∈ result iff ∃v: (u,v) ∈ r and (v,w) ∈ s.

    Built as a synchronized product that guesses the middle track column by
    column (with end-of-run flags and an acceptance closure for middle tails
    that outlast both outer tracks); extensionally equal to
    project(intersect(cylindrify(r,2), cylindrify(s,0)), 1).
    """
    if r.arity != 2 or s.arity != 2:
        raise ValueError("compose needs binary relations")
    if r.base != s.base:
        raise ValueError("base alphabet mismatch")
    A = fa._ensure_sink(r.dfa)
    B = fa._ensure_sink(s.dfa)
    conv = r.conv
    base_n = r.base.size
    # index A rows by middle component, B rows by first component
    a_by_mid = {}
    for q, row in A.rows.items():
        bucket = a_by_mid.setdefault(q, {})
        for sym, t in row.items():
            if t == A.sink:
                continue
            a, b = conv.tuple_of(sym)
            bucket.setdefault(b, []).append((a, t))
    b_by_first = {}
    for q, row in B.rows.items():
        bucket = b_by_first.setdefault(q, {})
        for sym, t in row.items():
            if t == B.sink:
                continue
            b, c = conv.tuple_of(sym)
            bucket.setdefault(b, []).append((c, t))
    # acceptance closure over middle-only tail columns (◇,b)/(b,◇),
    # computed lazily on the pairs the product construction reaches
    def tail_succ(qa, qb):
        succ = []
        for b, alist in a_by_mid.get(qa, {}).items():
            if b == PAD:
                continue
            blist = b_by_first.get(qb, {}).get(b, [])
            for a, ta in alist:
                if a != PAD:
                    continue
                for c, tb in blist:
                    if c == PAD:
                        succ.append((ta, tb))
        return succ

    def tail_closure(needed):
        graph = {}
        stack = list(needed)
        while stack:
            pair = stack.pop()
            if pair in graph:
                continue
            graph[pair] = tail_succ(*pair)
            stack.extend(graph[pair])
        tail = {
            p for p in graph
            if p[0] in A.accepting and p[1] in B.accepting
        }
        changed = True
        while changed:
            changed = False
            for p, succ in graph.items():
                if p not in tail and any(q in tail for q in succ):
                    tail.add(p)
                    changed = True
        return tail

    DONE = -1

    def r_ok(qa):
        return qa == DONE or qa in A.accepting

    def s_ok(qb):
        return qb == DONE or qb in B.accepting

    start = (A.initial, B.initial, False)
    ids = {start: 0}
    order = [start]
    trans = {}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        qa, qb, vdone = state
        src = ids[state]
        mids = [PAD] if vdone else [PAD] + list(range(base_n))
        for b in mids:
            # r side options for this middle symbol: (a, next state)
            if qa == DONE:
                a_opts = [(PAD, DONE)] if b == PAD else []
            else:
                a_opts = list(a_by_mid.get(qa, {}).get(b, []))
                if b == PAD and qa in A.accepting:
                    a_opts.append((PAD, DONE))  # r's word ends here
            if qb == DONE:
                c_opts = [(PAD, DONE)] if b == PAD else []
            else:
                c_opts = list(b_by_first.get(qb, {}).get(b, []))
                if b == PAD and qb in B.accepting:
                    c_opts.append((PAD, DONE))
            if not a_opts or not c_opts:
                continue
            v2 = vdone or b == PAD
            for a, ta in a_opts:
                for c, tb in c_opts:
                    if a == PAD and c == PAD:
                        continue  # all-◇ output column does not exist
                    tgt = (ta, tb, v2)
                    if tgt not in ids:
                        ids[tgt] = len(order)
                        order.append(tgt)
                        queue.append(tgt)
                    trans.setdefault((src, conv.index_of((a, c))), set()).add(ids[tgt])
    tail = tail_closure(
        {
            (qa, qb)
            for qa, qb, vdone in order
            if not vdone and qa != DONE and qb != DONE
        }
    )
    accepting = set()
    for state in order:
        qa, qb, vdone = state
        if vdone or qa == DONE or qb == DONE:
            if r_ok(qa) and s_ok(qb):
                accepting.add(ids[state])
        elif (qa, qb) in tail:
            accepting.add(ids[state])
    nfa = Nfa(conv, len(order), {0}, accepting, trans)
    return make_relation(r.base, 2, fa.determinize(nfa))


# ---------------------------------------------------------------------------
# canonical relations


def _column_dfa(base, states, initial, accepting, step, sink_name=None):
    """Build a small DFA over the 2-track column alphabet from a step function
    mapping (state, a, b) -> state or None (dead)."""
    conv = conv_alphabet(base, 2)
    ids = {s: i for i, s in enumerate(states)}
    rows = {i: {} for i in ids.values()}
    values = list(range(base.size)) + [PAD]
    for st in states:
        for a in values:
            for b in values:
                if a == PAD and b == PAD:
                    continue
                t = step(st, a, b)
                if t is None:
                    continue
                rows[ids[st]][conv.index_of((a, b))] = ids[t]
    sink = len(states)
    d = Dfa(conv, len(states) + 1, ids[initial], {ids[s] for s in accepting}, rows, sink)
    return make_relation(base, 2, d)


def equality_relation(domain):
    """{(w,w) : w ∈ L(domain)} as a binary relation."""
    d = fa.minimize(fa.to_dfa(domain))
    conv = conv_alphabet(d.alphabet, 2)
    rows = {}
    for q, row in d.rows.items():
        out = {}
        for s, t in row.items():
            if t == d.sink:
                continue
            out[conv.index_of((s, s))] = t
        rows[q] = out
    sink = d.n_states
    d2 = Dfa(conv, d.n_states + 1, d.initial, d.accepting, rows, sink)
    return RegularRelation(d.alphabet, 2, fa.minimize(d2))


def prefix_order(base):
    """x ⪯ y: x is a prefix of y."""

    def step(st, a, b):
        if st == "eq":
            if a == b and a != PAD:
                return "eq"
            if a == PAD:
                return "short"
            return None
        # short: x already exhausted
        return "short" if a == PAD else None

    return _column_dfa(base, ["eq", "short"], "eq", {"eq", "short"}, step)


def lex_order(base):
    """x ≤_lex y: first difference decides; a proper prefix is smaller."""

    def step(st, a, b):
        if st == "less":
            return "less"
        if a == PAD:
            return "less"
        if b == PAD:
            return None
        if a == b:
            return "eq"
        return "less" if a < b else None

    return _column_dfa(base, ["eq", "less"], "eq", {"eq", "less"}, step)


def llex_order(base):
    """x ≤_llex y: shorter first, ties broken lexicographically."""

    def step(st, a, b):
        if st == "short":
            return "short" if a == PAD else None
        if a == PAD:
            return "short"
        if b == PAD:
            return None
        if st != "eq" or a == b:
            return st
        return "lt" if a < b else "gt"

    return _column_dfa(base, ["eq", "lt", "gt", "short"], "eq", {"eq", "lt", "short"}, step)


def equal_length(base):
    """el(x,y): |x| = |y|."""

    def step(st, a, b):
        return "eq" if (a != PAD and b != PAD) else None

    return _column_dfa(base, ["eq"], "eq", {"eq"}, step)


# ---------------------------------------------------------------------------
# track grouping (vector alphabets)


def group_tracks(r, chunk):
    """Reinterpret an arity-(k·chunk) relation over Σ as an arity-k relation
    over the column alphabet of Σ-chunks (vector words)."""
    if r.arity % chunk != 0:
        raise ValueError("arity not divisible by chunk size")
    k = r.arity // chunk
    inner = conv_alphabet(r.base, chunk)
    outer = conv_alphabet(inner, k)
    d = r.dfa
    rows = {}
    for q, row in d.rows.items():
        out = {}
        for sym, t in row.items():
            if t == d.sink:
                continue
            tup = r.conv.tuple_of(sym)
            comps = []
            for j in range(k):
                part = tup[j * chunk:(j + 1) * chunk]
                if all(c == PAD for c in part):
                    comps.append(PAD)
                else:
                    comps.append(inner.index_of(part))
            out[outer.index_of(tuple(comps))] = t
        rows[q] = out
    sink = d.n_states if d.sink is None else d.sink
    n = d.n_states if d.sink is not None else d.n_states + 1
    d2 = Dfa(outer, n, d.initial, d.accepting, rows, sink)
    return RegularRelation(inner, k, fa.minimize(d2))


def relation_in_domain_power(r, domain):
    """Check every member tuple has all components in L(domain), without
    materializing the product domain automaton."""
    dom = fa._ensure_sink(fa.minimize(fa.to_dfa(domain)))
    d = fa._ensure_sink(r.dfa)
    n = r.arity
    BAD = -2  # this track's word is already known to be outside the domain
    # track states: domain state, None once the track ended acceptably, or BAD
    start = (d.initial, (dom.initial,) * n)
    seen = {start}
    queue = deque([start])
    while queue:
        q, tracks = queue.popleft()
        if q in d.accepting:
            if any(t is not None and (t == BAD or t not in dom.accepting) for t in tracks):
                return False
        for sym, t in d.rows.get(q, {}).items():
            if t == d.sink and d.sink not in d.accepting:
                continue
            tup = r.conv.tuple_of(sym)
            nxt = []
            for i, c in enumerate(tup):
                cur = tracks[i]
                if c == PAD:
                    nxt.append(None if (cur is None or cur in dom.accepting) else BAD)
                elif cur is None or cur == BAD:
                    nxt.append(BAD)
                else:
                    nxt.append(dom.rows.get(cur, {}).get(c, dom.sink))
            state = (t, tuple(nxt))
            if state not in seen:
                seen.add(state)
                queue.append(state)
    return True


def join(parts, arity):
    """Conjunction of relations over shared tracks of an arity-`arity` tuple.

    parts is a list of (relation, tracks) where tracks names the positions of
    the relation's components in the result tuple; every result track must be
    covered by at least one part.  Built as one synchronized product, with a
    component considered finished once its tracks are all ◇.  Column choices
    are enumerated sparsely: each component's transitions are indexed by the
    digits on the tracks it shares with earlier components, so the full result
    alphabet is never scanned.
    """
    if not parts:
        raise ValueError("need at least one relation")
    base = parts[0][0].base
    covered = set()
    for r, tracks in parts:
        if r.base != base:
            raise ValueError("base alphabet mismatch")
        if r.arity != len(tracks):
            raise ValueError("track count does not match relation arity")
        covered.update(tracks)
    if covered != set(range(arity)):
        raise ValueError("every result track must belong to some relation")
    conv = conv_alphabet(base, arity)
    DONE = -1
    # per component: automaton, positions of already-constrained vs fresh
    # tracks within its own tuple, and the result tracks the fresh ones fill
    comps = []
    assigned = []
    for r, tracks in parts:
        d = fa._ensure_sink(r.dfa)
        sub = r.conv
        old_pos = [k for k, t in enumerate(tracks) if t in assigned]
        new_pos = [k for k, t in enumerate(tracks) if t not in assigned]
        old_res = [assigned.index(tracks[k]) for k in old_pos]
        new_res = []
        for k in new_pos:
            new_res.append(len(assigned))
            assigned.append(tracks[k])
        new_trk = tuple(tracks[k] for k in new_pos)
        comps.append((d, sub, tuple(old_pos), tuple(new_pos),
                      tuple(old_res), tuple(new_res), new_trk))
    radix = conv.radix
    all_pad_total = radix ** arity - 1
    option_cache = {}

    def options(i, q):
        """Transitions of component i at state q, keyed by the digits on its
        already-constrained tracks: key -> list of (fresh digits, the option's
        additive contribution to the result symbol index, target)."""
        ckey = (i, q)
        if ckey in option_cache:
            return option_cache[ckey]
        d, sub, old_pos, new_pos, _, new_res, new_trk = comps[i]
        weights = [radix ** t for t in new_trk]
        pad_part = (radix - 1) * sum(weights)
        out = {}
        if q == DONE:
            out[(PAD,) * len(old_pos)] = [((PAD,) * len(new_pos), pad_part, DONE)]
        else:
            for sym, t in d.rows.get(q, {}).items():
                if t == d.sink:
                    continue
                tup = sub.tuple_of(sym)
                key = tuple(tup[p] for p in old_pos)
                fresh = tuple(tup[p] for p in new_pos)
                contrib = sum(
                    (radix - 1 if c == PAD else c) * w
                    for c, w in zip(fresh, weights)
                )
                out.setdefault(key, []).append((fresh, contrib, t))
            if q in d.accepting:
                fin = (PAD,) * len(old_pos)
                out.setdefault(fin, []).append(((PAD,) * len(new_pos), pad_part, DONE))
        option_cache[ckey] = out
        return out

    start = tuple(d.initial for d, *_ in comps)
    ids = {start: 0}
    order = [start]
    rows = {}
    queue = deque([start])
    digits = [PAD] * arity
    targets = [None] * len(comps)
    n_comps = len(comps)

    def assemble(state, i, acc, row):
        """Recursively pick one option per component; digits[k] holds the
        column digit for the k-th assigned track and is always written by an
        earlier component than any that reads it."""
        if i == n_comps:
            if acc == all_pad_total:
                return  # every component finished: no column emitted
            nxt = tuple(targets)
            tgt = ids.get(nxt)
            if tgt is None:
                tgt = ids[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            row[acc] = tgt
            return
        old_res = comps[i][4]
        new_res = comps[i][5]
        opts = options(i, state[i]).get(tuple(digits[k] for k in old_res))
        if not opts:
            return
        i1 = i + 1
        for fresh, contrib, t in opts:
            for k, c in zip(new_res, fresh):
                digits[k] = c
            targets[i] = t
            assemble(state, i1, acc + contrib, row)

    while queue:
        state = queue.popleft()
        row = {}
        assemble(state, 0, 0, row)
        rows[ids[state]] = row
    accepting = frozenset(
        ids[s]
        for s in order
        if all(q == DONE or q in c[0].accepting for c, q in zip(comps, s))
    )
    sink = len(order)
    # components only accept valid convolutions of their own tracks and every
    # result track is covered, so the product is already pad-consistent
    out = Dfa(conv, len(order) + 1, 0, accepting, rows, sink)
    return RegularRelation(base, arity, fa.minimize(out))


def restrict_relation_to_domain(r, domain):
    """Intersect a relation with domainⁿ without materializing the product
    domain automaton: the per-track domain states are computed on the fly and
    only the relation's own transitions are walked."""
    dom = fa._ensure_sink(fa.minimize(fa.to_dfa(domain)))
    d = fa._ensure_sink(r.dfa)
    start = (d.initial, (dom.initial,) * r.arity)
    ids = {start: 0}
    order = [start]
    rows = {}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        q, tracks = state
        row = {}
        for sym, t in d.rows.get(q, {}).items():
            if t == d.sink and d.sink not in d.accepting:
                continue
            tup = r.conv.tuple_of(sym)
            nxt = []
            dead = False
            for i, c in enumerate(tup):
                cur = tracks[i]
                if c == PAD:
                    if cur is not None and cur not in dom.accepting:
                        dead = True
                        break
                    nxt.append(None)
                else:
                    if cur is None:
                        dead = True
                        break
                    t2 = dom.rows.get(cur, {}).get(c, dom.sink)
                    if t2 == dom.sink:
                        dead = True
                        break
                    nxt.append(t2)
            if dead:
                continue
            tgt = (t, tuple(nxt))
            if tgt not in ids:
                ids[tgt] = len(order)
                order.append(tgt)
                queue.append(tgt)
            row[sym] = ids[tgt]
        rows[ids[state]] = row
    accepting = frozenset(
        ids[s]
        for s in order
        if s[0] in d.accepting
        and all(t is None or t in dom.accepting for t in s[1])
    )
    sink = len(order)
    out = Dfa(r.conv, len(order) + 1, 0, accepting, rows, sink)
    return RegularRelation(r.base, r.arity, fa.minimize(out))


def domain_power(domain, n):
    """DFA over the arity-n column alphabet accepting tuples with every
    component in L(domain).  Intended for small alphabets."""
    dom = fa._ensure_sink(fa.minimize(fa.to_dfa(domain)))
    conv = conv_alphabet(dom.alphabet, n)
    start = (dom.initial,) * n
    ids = {start: 0}
    order = [start]
    rows = {}
    queue = deque([start])
    while queue:
        tracks = queue.popleft()
        row = {}
        for sym in range(conv.size):
            tup = conv.tuple_of(sym)
            nxt = []
            dead = False
            for i, c in enumerate(tup):
                cur = tracks[i]
                if c == PAD:
                    if cur is not None and cur not in dom.accepting:
                        dead = True
                        break
                    nxt.append(None)
                else:
                    if cur is None:
                        dead = True
                        break
                    t = dom.rows.get(cur, {}).get(c, dom.sink)
                    if t == dom.sink:
                        dead = True
                        break
                    nxt.append(t)
            if dead:
                continue
            state = tuple(nxt)
            if state not in ids:
                ids[state] = len(order)
                order.append(state)
                queue.append(state)
            row[sym] = ids[state]
        rows[ids[tracks]] = row
    sink = len(order)
    accepting = frozenset(
        ids[tr]
        for tr in order
        if all(t is None or t in dom.accepting for t in tr)
    )
    return Dfa(conv, len(order) + 1, 0, accepting, rows, sink)


def language_relation(d):
    """An automaton's language as an arity-1 relation."""
    d = fa.minimize(fa.to_dfa(d))
    conv = conv_alphabet(d.alphabet, 1)
    mapping = {s: conv.index_of((s,)) for s in range(d.alphabet.size)}
    return RegularRelation(
        d.alphabet, 1, fa.minimize(relabel_base(d, conv, mapping))
    )


def relation_language(r):
    """The words of an arity-1 relation as a DFA over the base alphabet."""
    if r.arity != 1:
        raise ValueError("needs an arity-1 relation")
    mapping = {r.conv.index_of((s,)): s for s in range(r.base.size)}
    return fa.minimize(relabel_base(r.dfa, r.base, mapping))


def relation_from_tuples(base, arity, tuples):
    """The finite relation holding exactly the given word tuples."""
    conv = conv_alphabet(base, arity)
    rows = {0: {}}
    accepting = set()
    n = 1
    for t in tuples:
        w = convolve(list(t), alphabet=conv)
        q = 0
        for sym in w.indices:
            if sym not in rows[q]:
                rows[q][sym] = n
                rows[n] = {}
                n += 1
            q = rows[q][sym]
        accepting.add(q)
    d = Dfa(conv, n + 1, 0, frozenset(accepting), rows, n)
    return RegularRelation(base, arity, fa.minimize(d))


def embed_relation(r, new_base, symbol_map):
    """Reinterpret a relation over a larger base alphabet via an injective
    mapping of base symbol indices."""
    new_conv = conv_alphabet(new_base, r.arity)

    def col(sym):
        t = r.conv.tuple_of(sym)
        return new_conv.index_of(tuple(c if c == PAD else symbol_map[c] for c in t))

    mapping = {}
    for q, row in r.dfa.rows.items():
        for sym in row:
            if sym not in mapping:
                mapping[sym] = col(sym)
    d = relabel_base(r.dfa, new_conv, mapping)
    return RegularRelation(new_base, r.arity, fa.minimize(d))


def relabel_base(r_or_dfa, new_base, mapping):
    """Reinterpret an automaton over a new base alphabet via an injective
    symbol-index mapping (old index -> new index)."""
    d = fa.to_dfa(r_or_dfa)
    rows = {}
    for q, row in d.rows.items():
        out = {}
        for s, t in row.items():
            if d.sink is not None and t == d.sink:
                continue
            out[mapping[s]] = t
        rows[q] = out
    sink = d.sink if d.sink is not None else d.n_states
    n = d.n_states if d.sink is not None else d.n_states + 1
    return Dfa(new_base, n, d.initial, d.accepting, rows, sink)


# ---------------------------------------------------------------------------
# serialization


def rel_to_text(r):
    head = f"relation {r.arity} over {' '.join(r.base.symbols)}\n"
    return head + fa.to_text(r.dfa)


def rel_from_text(text):
    lines = text.splitlines()
    head = lines[0].split()
    if head[0] != "relation" or head[2] != "over":
        raise ValueError("bad relation header")
    arity = int(head[1])
    base = Alphabet(head[3:])
    conv = conv_alphabet(base, arity)
    nfa = fa.from_text("\n".join(lines[1:]), alphabet=conv)
    return RegularRelation(base, arity, fa.minimize(fa.determinize(nfa)))

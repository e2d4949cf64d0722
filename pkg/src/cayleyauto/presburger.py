"""Integer arithmetic as an automatic structure.

Integers are written least-significant-digit first in two's complement over
{0,1}: the word d₀..d_{k−1} has value Σ_{i<k−1} dᵢ2ⁱ − d_{k−1}2^{k−1}.  The
canonical (shortest) form has length 1 or its last two digits differing.
On top of the addition automaton, affine maps y = Ax + c are obtained by
compiling their defining first-order formulas (scalar multiples built by
repeated doubling).
"""

from __future__ import annotations

from . import fa, fo, relations as rel
from .fa import Alphabet, Dfa, Word

BITS = Alphabet(["0", "1"])

MAX_AFFINE_ENTRY = 64


def encode_int(x):
    """Canonical word for an integer."""
    digits = []
    while x != 0 and x != -1:
        digits.append(x & 1)
        x >>= 1
    digits.append(0 if x == 0 else 1)
    return Word(BITS, tuple(digits))


def decode_int(w):
    """Integer value of a canonical word."""
    if w.alphabet != BITS:
        raise ValueError("not a word over {0,1}")
    k = len(w)
    if k == 0:
        raise ValueError("the empty word encodes nothing")
    if k >= 2 and w.indices[-1] == w.indices[-2]:
        raise ValueError("non-canonical encoding: last two digits equal")
    value = sum(d << i for i, d in enumerate(w.indices[:-1]))
    return value - (w.indices[-1] << (k - 1))


def int_domain():
    """DFA for the canonical integer words."""
    # states: 0 start; 1/2 one digit seen (0/1); 3/4 last two digits equal
    # (00/11); 5/6 last two digits differ ending in 0/1
    rows = {
        0: {0: 1, 1: 2},
        1: {0: 3, 1: 6},
        2: {0: 5, 1: 4},
        3: {0: 3, 1: 6},
        4: {0: 5, 1: 4},
        5: {0: 3, 1: 6},
        6: {0: 5, 1: 4},
    }
    return fa.minimize(Dfa(BITS, 8, 0, frozenset({1, 2, 5, 6}), rows, 7))


def _value_for(track, last):
    """Digit contributed by a track at a column: its own digit, or its sign
    digit once exhausted."""
    return last if track == rel.PAD else track


_addition_cache = None


def addition_relation():
    """Ternary relation {(u,v,w) : decode(u)+decode(v)=decode(w)}."""
    global _addition_cache
    if _addition_cache is not None:
        return _addition_cache
    conv = rel.conv_alphabet(BITS, 3)
    # state: (carry, last digit seen per track); None = no digit yet
    start = (0, None, None, None)
    ids = {start: 0}
    order = [start]
    rows = {}
    from collections import deque

    queue = deque([start])
    while queue:
        state = queue.popleft()
        carry, lx, ly, lz = state
        row = {}
        for sym in range(conv.size):
            a, b, c = conv.tuple_of(sym)
            if (a == rel.PAD and lx is None) or (b == rel.PAD and ly is None) or (
                c == rel.PAD and lz is None
            ):
                continue  # a track may not start with padding
            da = _value_for(a, lx)
            db = _value_for(b, ly)
            dc = _value_for(c, lz)
            s = da + db + carry
            if (s & 1) != dc:
                continue
            nxt = (
                s >> 1,
                lx if a == rel.PAD else a,
                ly if b == rel.PAD else b,
                lz if c == rel.PAD else c,
            )
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            row[sym] = ids[nxt]
        rows[ids[state]] = row

    def sign_consistent(state):
        carry, lx, ly, lz = state
        if lx is None or ly is None or lz is None:
            return False
        # all further columns carry the sign digits; the carry settles within
        # two steps, so checking three suffices
        for _ in range(3):
            s = lx + ly + carry
            if (s & 1) != lz:
                return False
            carry = s >> 1
        return True

    accepting = frozenset(ids[s] for s in order if sign_consistent(s))
    sink = len(order)
    d = Dfa(conv, len(order) + 1, 0, accepting, rows, sink)
    r = rel.make_relation(BITS, 3, d)
    # keep only canonical encodings on every track
    canon = rel.domain_power(int_domain(), 3)
    _addition_cache = rel.RegularRelation(BITS, 3, fa.dfa_intersect(r.dfa, canon))
    return _addition_cache


_congruence_cache = {}


def congruence_relation(omega):
    """Binary relation {(x,y) : x ≡ y (mod omega)} on canonical encodings."""
    if omega < 1:
        raise ValueError("modulus must be positive")
    if omega in _congruence_cache:
        return _congruence_cache[omega]
    conv = rel.conv_alphabet(BITS, 2)
    # state: (Σ x-digits·2^i, Σ y-digits·2^i, 2^k, last x digit, last y digit)
    # all mod omega; a track's value is its digit sum minus twice its last
    # digit's weighted contribution (two's complement sign digit)
    from collections import deque

    start = (0, 0, 1 % omega, None, None)
    ids = {start: 0}
    order = [start]
    rows = {}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        sx, sy, p, lx, ly = state
        row = {}
        for sym in range(conv.size):
            a, b = conv.tuple_of(sym)
            if (a == rel.PAD and lx is None) or (b == rel.PAD and ly is None):
                continue
            nsx = sx if a == rel.PAD else (sx + a * p) % omega
            nsy = sy if b == rel.PAD else (sy + b * p) % omega
            nxt = (
                nsx,
                nsy,
                (p * 2) % omega,
                lx if a == rel.PAD else (a * p) % omega,
                ly if b == rel.PAD else (b * p) % omega,
            )
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            row[sym] = ids[nxt]
        rows[ids[state]] = row
    accepting = frozenset(
        ids[s]
        for s in order
        if s[3] is not None and s[4] is not None
        and (s[0] - 2 * s[3]) % omega == (s[1] - 2 * s[4]) % omega
    )
    sink = len(order)
    d = Dfa(conv, len(order) + 1, 0, accepting, rows, sink)
    r = rel.make_relation(BITS, 2, d)
    canon = rel.domain_power(int_domain(), 2)
    out = rel.RegularRelation(BITS, 2, fa.dfa_intersect(r.dfa, canon))
    _congruence_cache[omega] = out
    return out


def presburger_structure():
    """The structure (ℤ; Add) over canonical integer words."""
    return fo.AutomaticStructure(int_domain(), {"Add": addition_relation()})


def constant_relation(value):
    """Arity-1 relation containing exactly encode(value)."""
    conv = rel.conv_alphabet(BITS, 1)
    w = encode_int(value)
    rows = {}
    for i, d in enumerate(w.indices):
        rows[i] = {conv.index_of((d,)): i + 1}
    rows[len(w)] = {}
    d = Dfa(conv, len(w) + 2, 0, frozenset({len(w)}), rows, len(w) + 1)
    return rel.RegularRelation(BITS, 1, fa.minimize(d))


class _AffineCompiler:
    """Builds scalar-multiplication and affine-row relations by first-order
    definitions over the addition structure."""

    def __init__(self):
        self.struct = fo.AutomaticStructure(int_domain(), {"Add": addition_relation()})
        self.rels = self.struct.relations
        self.scalars = {}
        self.row_cache = {}

    def _compile(self, text, order):
        return fo.compile(self.struct, text, order)[1]

    def scalar(self, k):
        """Name of the installed relation {(x,y) : y = k·x}."""
        if k in self.scalars:
            return self.scalars[k]
        name = f"Mul{k}".replace("-", "m")
        if k == 0:
            r = self._compile("Add(y,y,y) & x = x", ("x", "y"))
        elif k == 1:
            r = self._compile("x = y", ("x", "y"))
        elif k < 0:
            pos = self.scalar(-k)
            r = self._compile(
                f"E t ({pos}(x,t) & E z (Add(t,y,z) & Add(z,z,z)))", ("x", "y")
            )
        elif k % 2 == 0:
            half = self.scalar(k // 2)
            r = self._compile(f"E t ({half}(x,t) & Add(t,t,y))", ("x", "y"))
        else:
            even = self.scalar(k - 1)
            r = self._compile(f"E t ({even}(x,t) & Add(t,x,y))", ("x", "y"))
        self.rels[name] = r
        self.scalars[k] = name
        return name

    def row(self, coeffs, const):
        """Relation {(x for nonzero coeffs..., y) : y = Σ coeffs·x + const};
        tracks are the nonzero-coefficient inputs in order, then y."""
        key = (tuple(k for k in coeffs if k != 0), const)
        if key in self.row_cache:
            return self.row_cache[key]
        r = self._row(key[0], const)
        self.row_cache[key] = r
        return r

    def _row(self, coeffs, const):
        d = len(coeffs)
        xs = [f"x{i:02d}" for i in range(d)]
        if not coeffs:
            return constant_relation(const)
        self.rels["Konst"] = constant_relation(const)
        # sum left to right: s₀ = const, sᵢ = sᵢ₋₁ + kᵢ·xᵢ, y = s_last
        parts = []
        prev = "s00"
        opened = 1
        parts.append(f"E {prev} (Konst({prev})")
        for i, (v, k) in enumerate(zip(xs, coeffs)):
            mul = self.scalar(k)
            p = f"p{i:02d}"
            parts.append(f"& E {p} ({mul}({v},{p})")
            opened += 1
            if i + 1 < d:
                s = f"s{i + 1:02d}"
                parts.append(f"& E {s} (Add({prev},{p},{s})")
                opened += 1
                prev = s
            else:
                parts.append(f"& Add({prev},{p},y)")
        body = " ".join(parts) + ")" * opened
        r = self._compile(body, tuple(xs) + ("y",))
        del self.rels["Konst"]
        return r


_affine_compiler = None
_affine_cache = {}


def affine_relation(matrix, const):
    """Relation of arity d+d' accepting ⊗(x₁..x_d, y₁..y_{d'}) iff y = Ax+c."""
    dd = len(matrix)
    if dd == 0:
        raise ValueError("empty matrix")
    d = len(matrix[0])
    if any(len(row) != d for row in matrix) or len(const) != dd:
        raise ValueError("dimension mismatch")
    if any(abs(e) > MAX_AFFINE_ENTRY for row in matrix for e in row) or any(
        abs(e) > MAX_AFFINE_ENTRY for e in const
    ):
        raise ValueError(f"matrix entries limited to |e| <= {MAX_AFFINE_ENTRY}")
    key = (tuple(tuple(row) for row in matrix), tuple(const))
    if key in _affine_cache:
        return _affine_cache[key]
    global _affine_compiler
    if _affine_compiler is None:
        _affine_compiler = _AffineCompiler()
    comp = _affine_compiler
    parts = []
    used = set()
    for j in range(dd):
        inputs = tuple(i for i in range(d) if matrix[j][i] != 0)
        used.update(inputs)
        parts.append((comp.row(matrix[j], const[j]), inputs + (d + j,)))
    ints = rel.language_relation(int_domain())
    for i in range(d):
        if i not in used:
            parts.append((ints, (i,)))
    out = rel.join(parts, d + dd)
    _affine_cache[key] = out
    return out

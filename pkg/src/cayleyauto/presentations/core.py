"""Cayley-graph presentations: a regular set of representative words together
with one binary edge relation per generator (and optionally per-generator left
edge relations, which make conjugacy decidable).
"""

from __future__ import annotations

import json

from .. import fa, relations as rel
from ..fa import Alphabet, Word


class GroupWord:
    """A word over a presentation's generators and their inverses, stored as
    a sequence of (generator name, ±1) letters."""

    def __init__(self, letters):
        letters = tuple((str(n), int(s)) for n, s in letters)
        if any(s not in (1, -1) for _, s in letters):
            raise ValueError("exponent signs must be +1 or -1")
        self.letters = letters

    @classmethod
    def parse(cls, text):
        """Parse the CLI syntax: whitespace-separated generator names with an
        optional ^<exponent> suffix, e.g. "A C A^-1 C^-1 B^-1" or "b^-2"."""
        letters = []
        for tok in text.split():
            name, _, exp = tok.partition("^")
            if not name:
                raise ValueError(f"bad group-word token {tok!r}")
            power = 1
            if exp:
                try:
                    power = int(exp)
                except ValueError:
                    raise ValueError(f"bad exponent in {tok!r}") from None
            sign = 1 if power > 0 else -1
            letters.extend((name, sign) for _ in range(abs(power)))
        return cls(letters)

    def inverse(self):
        return GroupWord([(n, -s) for n, s in reversed(self.letters)])

    def __mul__(self, other):
        return GroupWord(self.letters + other.letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other):
        return isinstance(other, GroupWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __str__(self):
        if not self.letters:
            return "(empty)"
        return " ".join(n if s == 1 else f"{n}^-1" for n, s in self.letters)

    def __repr__(self):
        return f"GroupWord({self.letters!r})"


class GraphAutomaticPresentation:
    """A group given by representatives and right-multiplication relations.

    base: alphabet of the representative words; domain: DFA for the regular
    set of representatives; identity: the representative of the group
    identity; generators: name -> binary relation {(u, u·x)}; left: optional
    name -> binary relation {(u, x·u)}; meta: free-form description data.
    """

    def __init__(self, base, domain, identity, generators, left=None, meta=None):
        self.base = base
        self.domain = fa.minimize(fa.to_dfa(domain))
        self.identity = identity
        self.generators = dict(generators)
        self.left = dict(left or {})
        self.meta = dict(meta or {})
        self._inverses = {}
        if identity.alphabet != base:
            raise ValueError("identity word uses a different alphabet")
        if not fa.accepts(self.domain, identity):
            raise ValueError("identity word is not a representative")
        for name, r in self.generators.items():
            if r.arity != 2 or r.base != base:
                raise ValueError(f"edge relation {name!r} must be binary over the base")
        for name, r in self.left.items():
            if name not in self.generators:
                raise ValueError(f"left relation {name!r} has no right counterpart")
            if r.arity != 2 or r.base != base:
                raise ValueError(f"left relation {name!r} must be binary over the base")

    @property
    def generator_names(self):
        return list(self.generators)

    def relation(self, name, sign=1):
        """Edge relation for a generator or (via transpose) its inverse."""
        if name not in self.generators:
            raise KeyError(f"unknown generator {name!r}")
        if sign == 1:
            return self.generators[name]
        if name not in self._inverses:
            self._inverses[name] = rel.transpose(self.generators[name])
        return self._inverses[name]

    def is_biautomatic(self):
        return set(self.left) == set(self.generators) and bool(self.generators)

    def describe(self):
        return self.meta.get("description", "presentation")

    def __repr__(self):
        return (
            f"GraphAutomaticPresentation({self.describe()!r}, "
            f"{len(self.generators)} generators)"
        )

    # -- serialization ------------------------------------------------------

    def to_json(self):
        gens = {}
        for name, r in self.generators.items():
            entry = {"relation": rel.rel_to_text(r)}
            if name in self.left:
                entry["left"] = rel.rel_to_text(self.left[name])
            gens[name] = entry
        return {
            "alphabet": list(self.base.symbols),
            "domain": fa.to_text(self.domain),
            "identity": list(self.identity.names()),
            "generators": gens,
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, doc):
        base = Alphabet(doc["alphabet"])
        domain = fa.to_dfa(fa.from_text(doc["domain"], alphabet=base))
        identity = Word.from_names(base, doc["identity"])
        generators = {}
        left = {}
        for name, entry in doc["generators"].items():
            generators[name] = rel.rel_from_text(entry["relation"])
            if "left" in entry:
                left[name] = rel.rel_from_text(entry["left"])
        return cls(base, domain, identity, generators, left, doc.get("meta", {}))

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_json(), f, indent=1, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_json(json.load(f))


class FiniteGroupTable:
    """A finite group given by its multiplication table."""

    def __init__(self, names, table):
        self.names = tuple(names)
        n = len(self.names)
        if len(set(self.names)) != n or n == 0:
            raise ValueError("element names must be nonempty and unique")
        self.table = tuple(tuple(row) for row in table)
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise ValueError("table must be square over the elements")
        if any(not (0 <= v < n) for row in self.table for v in row):
            raise ValueError("table entry out of range")
        identity = None
        for e in range(n):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(n)):
                identity = e
                break
        if identity is None:
            raise ValueError("table has no identity element")
        self.identity = identity
        inverse = [None] * n
        for x in range(n):
            for y in range(n):
                if self.table[x][y] == identity and self.table[y][x] == identity:
                    inverse[x] = y
        if any(v is None for v in inverse):
            raise ValueError("table has a non-invertible element")
        self.inverse = tuple(inverse)
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        raise ValueError("table is not associative")

    @property
    def size(self):
        return len(self.names)

    def mult(self, x, y):
        return self.table[x][y]

    @classmethod
    def cyclic(cls, n):
        if n < 1:
            raise ValueError("order must be positive")
        return cls([str(i) for i in range(n)],
                   [[(i + j) % n for j in range(n)] for i in range(n)])


class FiniteExtensionData:
    """Input data for building a finite extension of a presented group.

    base: presentation of the subgroup H; coset multiplication table
    mult[i][s] = index of the coset holding k_i·k_s; correction[i][s] = word
    over H's generators with k_i·k_s = correction·k_{mult[i][s]};
    conjugation[(i, x)] = word with k_i·x = word·k_i for each H-generator x.
    Coset 0 is the identity coset (k_0 = 1).
    """

    def __init__(self, base, mult, correction, conjugation):
        self.base = base
        self.mult = tuple(tuple(row) for row in mult)
        r = len(self.mult)
        if r < 1 or any(len(row) != r for row in self.mult):
            raise ValueError("coset multiplication table must be square")
        if any(not (0 <= v < r) for row in self.mult for v in row):
            raise ValueError("coset index out of range")
        self.correction = tuple(tuple(row) for row in correction)
        if len(self.correction) != r or any(len(row) != r for row in self.correction):
            raise ValueError("correction words must form an r x r table")
        self.conjugation = dict(conjugation)
        for s in range(r):
            if self.mult[0][s] != s or self.mult[s][0] != s:
                raise ValueError("coset 0 must behave as the identity")
            if len(self.correction[0][s]) or len(self.correction[s][0]):
                raise ValueError("identity-coset corrections must be empty")
        for (i, x), w in self.conjugation.items():
            if not (0 <= i < r) or x not in base.generators:
                raise ValueError(f"bad conjugation key ({i}, {x!r})")
            for name, _ in w:
                if name not in base.generators:
                    raise ValueError(f"unknown generator {name!r} in conjugation word")
        for i in range(1, r):
            for x in base.generators:
                if (i, x) not in self.conjugation:
                    raise ValueError(f"missing conjugation word for ({i}, {x!r})")
        for row in self.correction:
            for w in row:
                for name, _ in w:
                    if name not in base.generators:
                        raise ValueError(f"unknown generator {name!r} in correction word")

    @property
    def index(self):
        return len(self.mult)


class Nilpotent2Spec:
    """Coordinates for a finitely generated group of nilpotency class <= 2.

    n generators a_0..a_{n-1}; the first `split` map onto the abelianization
    and the rest generate the commutator subgroup; orders[i] is the order of
    a_i in the polycyclic series (None for infinite); commutators[(i, j)] for
    i < j < split is the coordinate vector of [a_j, a_i], supported on the
    tail positions split..n-1.
    """

    def __init__(self, n, split, orders, commutators):
        if not (1 <= split <= n):
            raise ValueError("need 1 <= split <= n")
        self.n = n
        self.split = split
        self.orders = tuple(orders)
        if len(self.orders) != n:
            raise ValueError("need one order per generator")
        if any(o is not None and o < 2 for o in self.orders):
            raise ValueError("finite orders must be at least 2")
        self.commutators = {}
        for (i, j), coords in dict(commutators).items():
            if not (0 <= i < j < split):
                raise ValueError(f"commutator key {(i, j)} out of range")
            coords = tuple(coords)
            if len(coords) != n:
                raise ValueError("commutator coordinates must have length n")
            if any(c and k < split for k, c in enumerate(coords)):
                raise ValueError("commutators must lie in the tail coordinates")
            coords = tuple(
                c % self.orders[k] if self.orders[k] is not None else c
                for k, c in enumerate(coords)
            )
            if any(coords):
                self.commutators[(i, j)] = coords

    def commutator(self, i, j):
        """Coordinates of [a_j, a_i] for i < j (zero vector when central)."""
        return self.commutators.get((i, j), (0,) * self.n)

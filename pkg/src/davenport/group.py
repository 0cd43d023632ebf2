"""Finite abelian groups in invariant-factor form, sequences over them,
and the reachable-sum machinery every search is built on.

Elements are plain tuples of reduced residues. The group fixes a total
order on its elements: the mixed-radix rank, which coincides with the
lexicographic order of the coordinate tuples. Sets of elements are Python
ints used as bitsets indexed by rank.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Iterable, Iterator, Optional, Sequence

GroupElement = tuple  # tuple[int, ...], coords[i] in [0, n_i - 1]
ZSequence = list  # list[GroupElement]; order is presentation only

# above this order ReachState keeps Python sets instead of bitsets
DENSE_LIMIT = 1 << 22


class InvalidInput(ValueError):
    """Raised for malformed groups, elements, sequences or windows."""


def iter_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def canonicalize(moduli: Iterable[int]) -> "GroupDescriptor":
    """Invariant-factor form of the direct sum of cyclic groups C_m.

    >>> canonicalize([6, 4]).factors
    (2, 12)
    """
    ms = []
    for m in moduli:
        m = int(m)
        if m <= 0:
            raise InvalidInput(f"cyclic order must be positive, got {m}")
        if m > 1:
            ms.append(m)
    # pairwise (a, b) -> (gcd, lcm) until the chain divides
    changed = True
    while changed:
        changed = False
        for i in range(len(ms)):
            for j in range(i + 1, len(ms)):
                a, b = ms[i], ms[j]
                if b % a:
                    g = math.gcd(a, b)
                    ms[i], ms[j] = g, a // g * b
                    changed = True
        ms = sorted(m for m in ms if m > 1)
    return GroupDescriptor(tuple(ms))


def parse_group(literal: str) -> "GroupDescriptor":
    """Parse "n1,n2,...,nr" (any cyclic orders) and canonicalize."""
    text = literal.strip().replace(" ", "")
    if not text:
        raise InvalidInput("empty group literal")
    try:
        moduli = [int(tok) for tok in text.split(",")]
    except ValueError:
        raise InvalidInput(f"bad group literal {literal!r}") from None
    return canonicalize(moduli)


@dataclass(frozen=True)
class GroupDescriptor:
    factors: tuple = ()

    def __post_init__(self):
        fs = tuple(int(n) for n in self.factors)
        object.__setattr__(self, "factors", fs)
        for n in fs:
            if n < 2:
                raise InvalidInput(f"invariant factors must be >= 2, got {fs}")
        for a, b in zip(fs, fs[1:]):
            if b % a:
                raise InvalidInput(f"invariant factors must form a divisor chain, got {fs}")

    # basic invariants

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        return reduce(lambda a, b: a * b, self.factors, 1)

    @property
    def exponent(self) -> int:
        return self.factors[-1] if self.factors else 1

    @property
    def literal(self) -> str:
        return ",".join(map(str, self.factors)) if self.factors else "1"

    def __str__(self) -> str:
        if not self.factors:
            return "C1"
        return "+".join(f"C{n}" for n in self.factors)

    # elements

    @cached_property
    def strides(self) -> tuple:
        out = []
        s = 1
        for n in reversed(self.factors):
            out.append(s)
            s *= n
        return tuple(reversed(out))

    @property
    def zero(self) -> GroupElement:
        return (0,) * self.rank

    def element(self, coords: Sequence[int]) -> GroupElement:
        coords = tuple(coords)
        if len(coords) != self.rank:
            raise InvalidInput(f"element {coords} has arity {len(coords)}, group {self} has rank {self.rank}")
        return tuple(int(c) % n for c, n in zip(coords, self.factors))

    def sequence(self, items: Iterable[Sequence[int]]) -> ZSequence:
        return [self.element(g) for g in items]

    def elements(self) -> Iterator[GroupElement]:
        for i in range(self.order):
            yield self.unrank(i)

    def rank_of(self, g: GroupElement) -> int:
        return sum(c * s for c, s in zip(g, self.strides))

    def unrank(self, i: int) -> GroupElement:
        return tuple((i // s) % n for s, n in zip(self.strides, self.factors))

    def add(self, g: GroupElement, h: GroupElement) -> GroupElement:
        return tuple((a + b) % n for a, b, n in zip(g, h, self.factors))

    def neg(self, g: GroupElement) -> GroupElement:
        return tuple((-a) % n for a, n in zip(g, self.factors))

    def scale(self, k: int, g: GroupElement) -> GroupElement:
        return tuple((k * a) % n for a, n in zip(g, self.factors))

    def order_of(self, g: GroupElement) -> int:
        o = 1
        for a, n in zip(g, self.factors):
            o = math.lcm(o, n // math.gcd(a, n))
        return o

    def is_subgroup_type(self, other: "GroupDescriptor") -> bool:
        """True if ``other`` embeds in this group (factor-wise divisibility
        after right-aligning the invariant factor chains)."""
        if other.rank > self.rank:
            return False
        mine = self.factors[self.rank - other.rank:]
        return all(n % m == 0 for m, n in zip(other.factors, mine))

    # bitset translation

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.order) - 1

    @cached_property
    def _below_masks(self) -> dict:
        return {}

    def _below(self, i: int, t: int) -> int:
        """Bitset of elements whose i-th coordinate is < t."""
        key = (i, t)
        m = self._below_masks.get(key)
        if m is None:
            s, n = self.strides[i], self.factors[i]
            period = s * n
            reps = self.order // period
            rep = ((1 << (period * reps)) - 1) // ((1 << period) - 1)
            m = ((1 << (t * s)) - 1) * rep
            self._below_masks[key] = m
        return m

    def translation_plan(self, g: GroupElement) -> tuple:
        plan = []
        for i, (c, n) in enumerate(zip(g, self.factors)):
            if c:
                lo = self._below(i, n - c)
                plan.append((lo, c * self.strides[i], self.full_mask ^ lo, (n - c) * self.strides[i]))
        return tuple(plan)

    @cached_property
    def translation_plans(self) -> tuple:
        """Per-rank translation plans; only built for search-sized groups."""
        return tuple(self.translation_plan(g) for g in self.elements())

    def translate(self, bits: int, g: GroupElement) -> int:
        """The bitset ``bits + g``."""
        for lo, up, hi, down in self.translation_plan(g):
            bits = ((bits & lo) << up) | ((bits & hi) >> down)
        return bits

    def bits_of(self, elements: Iterable[GroupElement]) -> int:
        x = 0
        for g in elements:
            x |= 1 << self.rank_of(g)
        return x


def translate_with(plan: tuple, bits: int) -> int:
    for lo, up, hi, down in plan:
        bits = ((bits & lo) << up) | ((bits & hi) >> down)
    return bits


def sigma(S: Sequence[GroupElement], G: GroupDescriptor) -> GroupElement:
    total = [0] * G.rank
    for g in S:
        if len(g) != G.rank:
            raise InvalidInput(f"element {tuple(g)} does not belong to {G}")
        for i, c in enumerate(g):
            total[i] += c
    return tuple(t % n for t, n in zip(total, G.factors))


def multiplicities(S: Sequence[GroupElement]) -> dict:
    counts: dict = {}
    for g in S:
        counts[g] = counts.get(g, 0) + 1
    return counts


def parse_sequence(text: str, G: GroupDescriptor) -> ZSequence:
    """One element per line, coordinates comma-separated, '#' starts a comment."""
    seq = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            coords = [int(tok) for tok in line.split(",")]
        except ValueError:
            raise InvalidInput(f"line {lineno}: cannot parse {raw!r}") from None
        seq.append(G.element(coords))
    return seq


def format_sequence(S: Sequence[GroupElement]) -> str:
    return "\n".join(",".join(map(str, g)) for g in S) + ("\n" if S else "")


def automorphism_orbit_reps(G: GroupDescriptor) -> list:
    """Ranks of orbit representatives (least element of each orbit) under the
    automorphisms generated by unit scalings of single coordinates and the
    transvections e_j -> e_j + c*e_i with n_i | c*n_j.

    These generate a subgroup of Aut(G), so using the orbits for symmetry
    breaking is always sound even where they are finer than the true ones.
    """
    fs = G.factors
    moves = []
    for i, n in enumerate(fs):
        for u in range(2, n):
            if math.gcd(u, n) == 1:
                moves.append((i, None, u))
    for i, ni in enumerate(fs):
        for j, nj in enumerate(fs):
            if i != j:
                for c in range(1, ni):
                    if (c * nj) % ni == 0:
                        moves.append((i, j, c))

    def act(move, g):
        i, j, c = move
        g = list(g)
        if j is None:
            g[i] = (g[i] * c) % fs[i]
        else:
            g[i] = (g[i] + c * g[j]) % fs[i]
        return tuple(g)

    seen: set = set()
    reps = []
    for g in G.elements():
        if g in seen:
            continue
        reps.append(G.rank_of(g))
        seen.add(g)
        stack = [g]
        while stack:
            x = stack.pop()
            for mv in moves:
                y = act(mv, x)
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return reps


@dataclass
class ReachState:
    """Subsequence sums of the elements pushed so far.

    Stratified (``max_layer`` given): ``layers[l]`` holds the sums of
    subsequences of exactly ``l`` elements, l in [0, max_layer]; layer 0 is
    the identity alone. Unstratified: a single layer holding the sums of all
    non-empty subsequences.

    Every (layer, sum) pair records the index of the element that first
    reached it and the predecessor sum, which is enough to rebuild one
    witness subsequence.
    """

    G: GroupDescriptor
    max_layer: Optional[int] = None
    count: int = 0
    layers: list = field(default_factory=list)
    witness: list = field(default_factory=list)

    def __post_init__(self):
        self.dense = self.G.order <= DENSE_LIMIT
        n_layers = 1 if self.max_layer is None else self.max_layer + 1
        empty = 0 if self.dense else frozenset()
        self.layers = [empty] * n_layers
        self.witness = [dict() for _ in range(n_layers)]
        if self.max_layer is not None:
            self.layers[0] = 1 if self.dense else frozenset([0])

    @property
    def stratified(self) -> bool:
        return self.max_layer is not None

    def _pred(self, r: int, g: GroupElement) -> int:
        G = self.G
        return G.rank_of(G.add(G.unrank(r), G.neg(g)))

    def push(self, g: GroupElement) -> None:
        G = self.G
        if len(g) != G.rank:
            raise InvalidInput(f"element {tuple(g)} does not belong to {G}")
        idx = self.count
        self.count += 1
        rg = G.rank_of(g)
        if self.stratified:
            top = min(self.max_layer, self.count)
            for l in range(top, 0, -1):
                self._merge(l, self.layers[l - 1], g, idx)
        else:
            self._merge(0, self.layers[0], g, idx, single=rg)

    def _merge(self, l, source, g, idx, single=None):
        wit = self.witness[l]
        if self.dense:
            shifted = self.G.translate(source, g)
            if single is not None:
                shifted |= 1 << single
            new = shifted & ~self.layers[l]
            self.layers[l] |= shifted
            fresh = iter_bits(new)
        else:
            G = self.G
            shifted = {G.rank_of(G.add(G.unrank(r), g)) for r in source}
            if single is not None:
                shifted.add(single)
            fresh = shifted - self.layers[l]
            self.layers[l] = self.layers[l] | fresh
        for r in fresh:
            if single is not None and r == single:
                wit[r] = (idx, None)
            else:
                wit[r] = (idx, self._pred(r, g))

    def contains(self, layer: int, g: GroupElement) -> bool:
        r = self.G.rank_of(g)
        L = self.layers[layer]
        return bool((L >> r) & 1) if self.dense else r in L

    def reconstruct(self, layer: int, g: GroupElement) -> list:
        """Indices (ascending) of a subsequence reaching ``g`` in ``layer``."""
        r = self.G.rank_of(g)
        if self.stratified and layer == 0:
            return []
        out = []
        l = layer
        while True:
            idx, pred = self.witness[l][r]
            out.append(idx)
            if self.stratified:
                l -= 1
                if l == 0:
                    break
            elif pred is None:
                break
            r = pred
        out.reverse()
        return out


def find_zero_sum(S: Sequence[GroupElement], G: GroupDescriptor,
                  lo: int = 1, hi: Optional[int] = None, minimal: bool = False):
    """Indices of a non-empty zero-sum subsequence with length in [lo, hi],
    or None when no such subsequence exists.

    With ``minimal`` the witness has the least possible length.
    """
    n = len(S)
    if hi is None:
        hi = n
    if not 1 <= lo <= hi <= n:
        raise InvalidInput(f"window [{lo}, {hi}] invalid for a sequence of length {n}")
    zero = G.zero
    if lo == 1 and hi == n and not minimal:
        reach = ReachState(G)
        for i, g in enumerate(S):
            reach.push(g)
            if reach.contains(0, zero):
                return reach.reconstruct(0, zero)
        return None
    reach = ReachState(G, max_layer=hi)
    for g in S:
        reach.push(g)
    for l in range(lo, hi + 1):
        if reach.contains(l, zero):
            return reach.reconstruct(l, zero)
    return None


def is_zero_sum_free(S: Sequence[GroupElement], G: GroupDescriptor) -> bool:
    return not S or find_zero_sum(S, G) is None

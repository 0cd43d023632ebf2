"""Exact zero-sum invariants of small groups by exhaustive search.

D(G) is computed by a memoized recursion over subsum sets: whether a
zero-sum-free sequence extends by g depends only on the set of its
non-empty subsums, so the maximal extension length is a function of that
set alone.

eta(G) and s(G) use branch and bound over multisets, enumerated with
non-increasing multiplicities (ties broken by element rank). That order
makes "remaining length <= cap * admissible elements" a usable bound. Two
symmetries are broken at the top of the tree:

* s is translation invariant (every candidate zero-sum has exp(G) terms),
  so the most frequent element is moved to 0;
* the next free element is taken from automorphism orbit representatives.

The reported certificate is always the lexicographically least extremal
sequence (non-decreasing in rank order), found by a second, ordered search
once the value is known.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

from .group import (GroupDescriptor, InvalidInput, automorphism_orbit_reps,
                    find_zero_sum, multiplicities, sigma)

KINDS = ("D", "eta", "s", "Dm")


@dataclass
class Budget:
    max_nodes: int = 10**8
    max_seconds: float = 60.0

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_seconds <= 0:
            raise InvalidInput("budget must be positive")


class BudgetExhausted(RuntimeError):
    """Search stopped early; ``lower_bound`` is a proven lower bound for the
    invariant (1 + length of the best certificate found)."""

    def __init__(self, group, kind, lower_bound, certificate, nodes, elapsed, m=1):
        self.group = group
        self.kind = kind
        self.m = m
        self.lower_bound = lower_bound
        self.certificate = certificate
        self.nodes = nodes
        self.elapsed = elapsed
        super().__init__(f"budget exhausted computing {kind} of {group}: "
                         f"value >= {lower_bound} after {nodes} nodes")


@dataclass
class InvariantResult:
    group: GroupDescriptor
    kind: str
    value: int
    certificate: list
    nodes: int
    elapsed: float
    m: int = 1

    @property
    def label(self) -> str:
        return f"D_{self.m}" if self.kind == "Dm" else self.kind

    def as_record(self) -> dict:
        rec = {"group": self.group.literal, "invariant": self.kind}
        if self.kind == "Dm":
            rec["m"] = self.m
        rec.update(value=self.value,
                   certificate=[list(g) for g in self.certificate],
                   nodes=self.nodes,
                   millis=round(self.elapsed * 1000, 3))
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "InvariantResult":
        from .group import parse_group
        G = parse_group(rec["group"])
        return cls(group=G, kind=rec["invariant"], value=int(rec["value"]),
                   certificate=[tuple(g) for g in rec["certificate"]],
                   nodes=int(rec["nodes"]), elapsed=float(rec["millis"]) / 1000,
                   m=int(rec.get("m", 1)))


class _Clock:
    def __init__(self, budget: Optional[Budget]):
        self.budget = budget or Budget()
        self.start = time.perf_counter()
        self.nodes = 0
        self.best_len = 0
        self.best_seq: list = []

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.max_nodes or (
                not self.nodes & 15 and self.elapsed > self.budget.max_seconds):
            raise _OutOfBudget

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def improve(self, length: int, seq) -> None:
        if length > self.best_len:
            self.best_len = length
            self.best_seq = list(seq)


class _OutOfBudget(Exception):
    pass


def _trivial(G, kind, m=1):
    # every sequence over the trivial group is all zeros
    return InvariantResult(G, kind, m if kind == "Dm" else 1, [], 0, 0.0, m)


def _exhausted(G, kind, clock, m=1):
    cert = [G.unrank(r) for r in clock.best_seq]
    return BudgetExhausted(G, kind, clock.best_len + 1, cert, clock.nodes, clock.elapsed, m)


# ---------------------------------------------------------------- D(G)

def exact_davenport(G: GroupDescriptor, budget: Optional[Budget] = None) -> InvariantResult:
    if G.order == 1:
        return _trivial(G, "D")
    clock = _Clock(budget)
    N = G.order
    plans = G.translation_plans
    neg = [G.rank_of(G.neg(g)) for g in G.elements()]
    memo: dict = {}
    path: list = []

    def extend(sums: int) -> int:
        hit = memo.get(sums)
        if hit is not None:
            return hit
        clock.tick()
        clock.improve(len(path), path)
        best = 0
        for g in range(1, N):
            if (sums >> neg[g]) & 1:
                continue
            x = sums
            for lo, up, hi, down in plans[g]:
                x = ((x & lo) << up) | ((x & hi) >> down)
            path.append(g)
            v = 1 + extend(sums | x | (1 << g))
            path.pop()
            if v > best:
                best = v
        memo[sums] = best
        return best

    try:
        length = extend(0)
    except _OutOfBudget:
        raise _exhausted(G, "D", clock) from None

    # greedy walk through the memo yields the lexicographically least witness
    cert = []
    sums = 0
    for remaining in range(length, 0, -1):
        for g in range(1, N):
            if (sums >> neg[g]) & 1:
                continue
            nxt = sums | G.translate(sums, G.unrank(g)) | (1 << g)
            if memo.get(nxt, -1) == remaining - 1:
                cert.append(G.unrank(g))
                sums = nxt
                break
    return InvariantResult(G, "D", length + 1, cert, clock.nodes, clock.elapsed)


# ---------------------------------------------------------------- eta(G), s(G)

class _LayerSearch:
    """Shared machinery for the length-aware invariants.

    The state is a list of e = exp(G) bitsets indexed by subsequence length
    k in [0, e-1]. For s they are exact layers (sums of exactly k terms);
    for eta they are cumulative (sums of at most k terms, empty sum
    included). Both obey new[k] = old[k] | (old[k-1] + g), and j copies of h
    may be appended without creating a forbidden zero-sum iff
    -i*h is not in state[e-i] for every i in [1, j].
    """

    def __init__(self, G: GroupDescriptor, kind: str, clock: _Clock):
        self.G = G
        self.kind = kind
        self.clock = clock
        self.e = e = G.exponent
        self.N = G.order
        self.plans = G.translation_plans
        elems = list(G.elements())
        self.negmul = [[G.rank_of(G.neg(G.scale(j, g))) for j in range(e + 1)] for g in elems]
        self.pool = list(range(self.N)) if kind == "s" else list(range(1, self.N))

    def initial(self) -> list:
        if self.kind == "s":
            return [1] + [0] * (self.e - 1)
        return [1] * self.e

    def push(self, state: list, h: int) -> list:
        plan = self.plans[h]
        new = [state[0]]
        prev = state[0]
        for k in range(1, self.e):
            x = prev
            if x:
                for lo, up, hi, down in plan:
                    x = ((x & lo) << up) | ((x & hi) >> down)
            prev = state[k]
            new.append(prev | x)
        return new

    def maxmult(self, state: list, h: int, cap: int) -> int:
        nm = self.negmul[h]
        e = self.e
        for j in range(1, cap + 1):
            if (state[e - j] >> nm[j]) & 1:
                return j - 1
        return cap

    # -- value by branch and bound

    def maximize(self) -> int:
        clock = self.clock
        used = [False] * self.N
        path: list = []
        reps = set(automorphism_orbit_reps(self.G))

        def dfs(state, length, cap, last, restrict):
            clock.tick()
            cands = []
            total = 0
            for h in self.pool:
                if used[h]:
                    continue
                c = self.maxmult(state, h, cap if h > last else cap - 1)
                if c:
                    total += c
                    if restrict is None or h in restrict:
                        cands.append((h, c))
            if length + total <= clock.best_len:
                return
            for h, c in cands:
                states = [state]
                for _ in range(c):
                    states.append(self.push(states[-1], h))
                used[h] = True
                for m in range(c, 0, -1):
                    path.extend([h] * m)
                    clock.improve(length + m, path)
                    # orbit level: later ties need not follow h in rank order
                    dfs(states[m], length + m, m, h if restrict is None else -1, None)
                    del path[-m:]
                used[h] = False

        state = self.initial()
        if self.kind == "s":
            # translate so that 0 is a most frequent element
            used[0] = True
            states = [state]
            for _ in range(self.e - 1):
                states.append(self.push(states[-1], 0))
            for m0 in range(self.e - 1, 0, -1):
                path[:] = [0] * m0
                clock.improve(m0, path)
                dfs(states[m0], m0, m0, -1, reps)
            path.clear()
        else:
            dfs(state, 0, self.e - 1, -1, reps)
        return clock.best_len

    # -- lexicographically least sequence of a given length

    def lex_least(self, target: int) -> list:
        clock = self.clock
        N = self.N
        path: list = []

        def dfs(state, length, start, run):
            if length == target:
                return True
            clock.tick()
            total = 0
            for h in range(start, N):
                if h in self._pool_set:
                    cap = self.e - 1 - (run if h == start else 0)
                    if cap > 0:
                        total += self.maxmult(state, h, cap)
                        if length + total >= target:
                            break
            if length + total < target:
                return False
            for h in range(start, N):
                if h not in self._pool_set:
                    continue
                if h == start and run >= self.e - 1:
                    continue
                if self.maxmult(state, h, 1) == 0:
                    continue
                path.append(h)
                if dfs(self.push(state, h), length + 1, h, run + 1 if h == start else 1):
                    return True
                path.pop()
            return False

        self._pool_set = set(self.pool)
        if not dfs(self.initial(), 0, 0, 0):
            raise AssertionError(f"no {self.kind}-free sequence of length {target}")
        return path


def _layer_invariant(G: GroupDescriptor, kind: str, budget: Optional[Budget]) -> InvariantResult:
    if G.order == 1:
        return _trivial(G, kind)
    clock = _Clock(budget)
    engine = _LayerSearch(G, kind, clock)
    try:
        length = engine.maximize()
        cert = engine.lex_least(length)
    except _OutOfBudget:
        raise _exhausted(G, kind, clock) from None
    return InvariantResult(G, kind, length + 1, [G.unrank(r) for r in cert],
                           clock.nodes, clock.elapsed)


def exact_eta(G: GroupDescriptor, budget: Optional[Budget] = None) -> InvariantResult:
    return _layer_invariant(G, "eta", budget)


def exact_s(G: GroupDescriptor, budget: Optional[Budget] = None) -> InvariantResult:
    return _layer_invariant(G, "s", budget)


# ---------------------------------------------------------------- D_m(G)

class _Disjoint:
    """Decides whether a multiset (given as multiplicities over element
    ranks) splits off m pairwise disjoint non-empty zero-sum subsequences."""

    def __init__(self, G: GroupDescriptor):
        self.G = G
        self.N = G.order
        self.elems = list(G.elements())
        self.find = lru_cache(maxsize=None)(self._find)

    def _zero_sums_through(self, counts: tuple, first: int):
        """Sub-multisets containing one copy of ``first`` and summing to 0."""
        G = self.G
        support = [r for r in range(first, self.N) if counts[r]]
        taken = [0] * self.N

        def rec(pos, total):
            if pos == len(support):
                if total == G.zero:
                    yield tuple(taken)
                return
            r = support[pos]
            g = self.elems[r]
            for k in range(1 if r == first else 0, counts[r] + 1):
                taken[r] = k
                yield from rec(pos + 1, G.add(total, G.scale(k, g)))
            taken[r] = 0

        yield from rec(0, G.zero)

    def _find(self, counts: tuple, m: int):
        """A list of m disjoint zero-sum multiplicity vectors, or None."""
        if m == 0:
            return []
        if sum(counts) == 0:
            return None
        first = next(r for r, c in enumerate(counts) if c)
        less = list(counts)
        less[first] -= 1
        rest = self.find(tuple(less), m)
        if rest is not None:
            return rest
        for part in self._zero_sums_through(counts, first):
            remaining = tuple(c - t for c, t in zip(counts, part))
            rest = self.find(remaining, m - 1)
            if rest is not None:
                return [part] + rest
        return None

    def counts_of(self, S) -> tuple:
        counts = [0] * self.N
        for g in S:
            counts[self.G.rank_of(g)] += 1
        return tuple(counts)


def has_m_disjoint_zero_sums(S: Sequence, G: GroupDescriptor, m: int):
    """(True, [index lists]) if S holds m disjoint non-empty zero-sum
    subsequences, else (False, None)."""
    if m < 1:
        raise InvalidInput("m must be >= 1")
    for g in S:
        if len(g) != G.rank:
            raise InvalidInput(f"element {tuple(g)} does not belong to {G}")
    S = [G.element(g) for g in S]
    solver = _Disjoint(G)
    parts = solver.find(solver.counts_of(S), m)
    if parts is None:
        return False, None
    # map multiplicity vectors back onto positions in S
    free: dict = {}
    for i, g in enumerate(S):
        free.setdefault(G.rank_of(g), []).append(i)
    witness = []
    for part in parts:
        idx = []
        for r, k in enumerate(part):
            for _ in range(k):
                idx.append(free[r].pop(0))
        witness.append(sorted(idx))
    return True, witness


def exact_dm(G: GroupDescriptor, m: int, budget: Optional[Budget] = None) -> InvariantResult:
    if m < 1:
        raise InvalidInput("m must be >= 1")
    if m == 1:
        r = exact_davenport(G, budget)
        return InvariantResult(G, "Dm", r.value, r.certificate, r.nodes, r.elapsed, 1)
    if G.order == 1:
        return _trivial(G, "Dm", m)
    clock = _Clock(budget)
    solver = _Disjoint(G)
    N = G.order
    counts = [0] * N
    path: list = []

    def dfs(start):
        clock.tick()
        clock.improve(len(path), path)
        for r in range(start, N):
            counts[r] += 1
            if solver.find(tuple(counts), m) is None:
                path.append(r)
                dfs(r)
                path.pop()
            counts[r] -= 1

    try:
        dfs(0)
    except _OutOfBudget:
        raise _exhausted(G, "Dm", clock, m) from None
    cert = [G.unrank(r) for r in clock.best_seq]
    return InvariantResult(G, "Dm", clock.best_len + 1, cert, clock.nodes, clock.elapsed, m)


def compute(G: GroupDescriptor, kind: str, m: int = 1, budget: Optional[Budget] = None) -> InvariantResult:
    if kind == "D":
        return exact_davenport(G, budget)
    if kind == "eta":
        return exact_eta(G, budget)
    if kind == "s":
        return exact_s(G, budget)
    if kind == "Dm":
        return exact_dm(G, m, budget)
    raise InvalidInput(f"unknown invariant {kind!r}; expected one of {KINDS}")


# ---------------------------------------------------------------- checks

def violates(kind: str, S: Sequence, G: GroupDescriptor, m: int = 1) -> bool:
    """True if S avoids the structure defining the invariant, i.e. S is a
    valid extremality certificate shape for it."""
    if not S:
        return True
    e = G.exponent
    if kind == "D":
        return find_zero_sum(S, G) is None
    if kind == "eta":
        return find_zero_sum(S, G, 1, min(e, len(S))) is None
    if kind == "s":
        return len(S) < e or find_zero_sum(S, G, e, e) is None
    if kind == "Dm":
        return not has_m_disjoint_zero_sums(S, G, m)[0]
    raise InvalidInput(f"unknown invariant {kind!r}")


def check_certificate(result: InvariantResult) -> bool:
    G = result.group
    return (len(result.certificate) == result.value - 1
            and violates(result.kind, result.certificate, G, result.m))

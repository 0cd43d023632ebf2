"""Products of smooth integers that are perfect n-th powers.

An F-smooth integer x = prod p_i^e_i maps to the residue vector
(e_i mod n) in C_n^r, and a sub-product is an n-th power exactly when the
corresponding residues sum to zero. So finding such a product is a
zero-sum search, and D(C_n^r) terms always suffice.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from sympy import integer_nthroot, isprime

from .bounds import A3_PROVEN, BoundReport, corollary_bound, log_upper_bound
from .group import GroupDescriptor, InvalidInput, find_zero_sum


class NotSmooth(InvalidInput):
    """An input integer has a prime factor outside the factor base."""

    def __init__(self, value: int, cofactor: int, index: Optional[int] = None):
        self.value = value
        self.cofactor = cofactor
        self.index = index
        where = "" if index is None else f" at index {index}"
        super().__init__(f"{value}{where} is not smooth over the base (cofactor {cofactor})")


@dataclass(frozen=True)
class FactorBase:
    primes: tuple

    def __post_init__(self):
        ps = tuple(int(p) for p in self.primes)
        object.__setattr__(self, "primes", ps)
        for p in ps:
            if not isprime(p):
                raise InvalidInput(f"{p} is not prime")
        if any(a >= b for a, b in zip(ps, ps[1:])):
            raise InvalidInput("factor base must be strictly increasing")

    @property
    def r(self) -> int:
        return len(self.primes)

    @classmethod
    def parse(cls, text: str) -> "FactorBase":
        try:
            return cls(tuple(int(t) for t in text.replace(" ", "").split(",") if t))
        except ValueError:
            raise InvalidInput(f"bad factor base {text!r}") from None

    def lift(self, residues: Sequence[int]) -> int:
        """The integer prod p_i^residues[i]."""
        return math.prod(p**e for p, e in zip(self.primes, residues))


@dataclass(frozen=True)
class SmoothRelation:
    value: int
    exponents: tuple
    residues: tuple


def factor_over_base(x: int, F: FactorBase) -> tuple:
    """Exponent vector of x over F; raises NotSmooth if a cofactor remains."""
    if x < 1:
        raise InvalidInput(f"need a positive integer, got {x}")
    exps = []
    rest = x
    for p in F.primes:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        exps.append(e)
    if rest != 1:
        raise NotSmooth(x, rest)
    return tuple(exps)


def relation(x: int, F: FactorBase, n: int) -> SmoothRelation:
    exps = factor_over_base(x, F)
    return SmoothRelation(x, exps, tuple(e % n for e in exps))


def _relations(xs: Sequence[int], F: FactorBase, n: int) -> list:
    out = []
    for i, x in enumerate(xs):
        try:
            out.append(relation(x, F, n))
        except NotSmooth as err:
            raise NotSmooth(err.value, err.cofactor, i) from None
    return out


def find_power_product(xs: Sequence[int], F: FactorBase, n: int,
                       minimal: bool = False) -> Optional[dict]:
    """A non-empty set of indices whose values multiply to a perfect n-th
    power, as {indices, product, root}; None when no subset works."""
    if n < 2:
        raise InvalidInput(f"need n >= 2, got {n}")
    if not xs:
        return None
    rels = _relations(xs, F, n)
    if F.r == 0:
        # every term is 1
        idx = [0]
    else:
        G = GroupDescriptor((n,) * F.r)
        idx = find_zero_sum([r.residues for r in rels], G, minimal=minimal)
        if idx is None:
            return None
    # root from the summed exponents divided by n, then checked exactly
    total = [sum(rels[i].exponents[k] for i in idx) for k in range(F.r)]
    if any(t % n for t in total):
        raise AssertionError("zero-sum witness does not give an n-th power")
    product = math.prod(xs[i] for i in idx)
    root = math.prod(p ** (t // n) for p, t in zip(F.primes, total))
    check, exact = integer_nthroot(product, n)
    if not exact or check != root:
        raise AssertionError(f"{product} is not the {n}-th power of {root}")
    return {"indices": list(idx), "product": product, "root": root}


def guarantee_length(n: int, r: int, a3: int = A3_PROVEN) -> BoundReport:
    """A length t such that any t integers smooth over r primes contain a
    product that is a perfect n-th power."""
    if n < 2:
        raise InvalidInput(f"need n >= 2, got {n}")
    if r < 1:
        raise InvalidInput(f"need r >= 1, got {r}")
    inputs = {"n": n, "r": r}
    if r == 1:
        return BoundReport("c(n,r)", n, inputs, "D(C_n) = n")
    if r == 2:
        return BoundReport("c(n,r)", 2 * n - 1, inputs, "D(C_n^2) = 2n - 1")
    if r == 3:
        inputs["a3"] = a3
        return BoundReport("c(n,r)", corollary_bound(n, a3), inputs,
                           "c(n,3) <= min(a3, 3^omega(n))(n - 1) + 1",
                           conjectural=a3 < A3_PROVEN)
    bound = log_upper_bound(GroupDescriptor((n,) * r))
    return BoundReport("c(n,r)", math.floor(bound), inputs,
                       "D(C_n^r) <= n(1 + ln(n^(r-1))), floored", exact=False,
                       details={"real_bound": bound})


def read_values(lines: Iterable[str]) -> list:
    """Integers from text lines ("x" or a JSON object with "value");
    blank lines and '#' comments are skipped."""
    out = []
    for lineno, line in enumerate(lines, 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            if text.startswith("{"):
                out.append(int(json.loads(text)["value"]))
            else:
                out.append(int(text))
        except (ValueError, KeyError, TypeError):
            raise InvalidInput(f"line {lineno}: cannot read an integer from {line.strip()!r}") from None
    return out

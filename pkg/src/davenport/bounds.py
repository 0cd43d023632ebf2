"""Closed-form bounds for zero-sum invariants and the derivation of the
rank-three constants.

Integer-valued bounds are exact. Real-valued ones (anything with a
logarithm) are evaluated in double precision with every inexact step
rounded upward, so they remain valid upper bounds;
``alon_dubiner_c_enclosure`` gives a high-precision interval for checking
strict inequalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Optional, Sequence, Union

import mpmath
from sympy import nextprime

from .group import GroupDescriptor, InvalidInput

A3_PROVEN = 20369
# value suggested if the Gao-Thangadurai conjecture holds; not proven
A3_CONJECTURAL = 8
CONJECTURE_SLACK = 5
DERIVATION_PRIME_CAP = 10**7

Number = Union[int, Fraction, float]


@dataclass
class BoundReport:
    name: str
    value: Number
    inputs: dict
    formula_ref: str
    exact: bool = True
    conjectural: bool = False
    details: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        value = self.value
        if isinstance(value, Fraction):
            value = str(value)
        rec = {"name": self.name, "inputs": self.inputs, "value": value,
               "exact": self.exact, "formula_ref": self.formula_ref}
        if self.conjectural:
            rec["conjectural"] = True
        if self.details:
            rec["details"] = self.details
        return rec


# Directed rounding: each helper returns the float nearest the exact result
# on the requested side (exact results are left alone).

def _mul_up(a: float, b: float) -> float:
    r = a * b
    return math.nextafter(r, math.inf) if Fraction(r) < Fraction(a) * Fraction(b) else r


def _add_up(a: float, b: float) -> float:
    r = a + b
    return math.nextafter(r, math.inf) if Fraction(r) < Fraction(a) + Fraction(b) else r


def _div_up(a: float, b: float) -> float:
    r = a / b
    return math.nextafter(r, math.inf) if Fraction(r) < Fraction(a) / Fraction(b) else r


def _log_up(x: int) -> float:
    return 0.0 if x == 1 else math.nextafter(math.log(x), math.inf)


def _log_down(x: int) -> float:
    return 0.0 if x == 1 else math.nextafter(math.log(x), -math.inf)


def _log2_up(k: int) -> float:
    if k & (k - 1) == 0:
        return float(k.bit_length() - 1)
    return math.nextafter(math.log2(k), math.inf)


def _check_chain(*ns: int) -> None:
    if ns[0] <= 1:
        raise InvalidInput(f"need n1 > 1, got {ns[0]}")
    for a, b in zip(ns, ns[1:]):
        if b % a:
            raise InvalidInput(f"need a divisor chain, {a} does not divide {b}")


def to_fraction(x) -> Fraction:
    """Exact rational from int/str/Decimal/Fraction; floats go through their
    shortest repr, so 20233.005 means 20233005/1000."""
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, (int, Fraction, Decimal)):
        return Fraction(x)
    return Fraction(str(x))


# ---------------------------------------------------------------- basics

def d_star(G: GroupDescriptor) -> int:
    return 1 + sum(n - 1 for n in G.factors)


def log_upper_bound(G: GroupDescriptor) -> float:
    """exp(G) * (1 + ln(|G| / exp(G))), rounded up."""
    if G.order == 1:
        raise InvalidInput("the trivial group has no exponent bound")
    e = G.exponent
    return _mul_up(float(e), _add_up(1.0, _log_up(G.order // e)))


def gao_yang_s_bound(G: GroupDescriptor) -> int:
    return G.order + G.exponent - 1


def rank2_closed_forms(n1: int, n2: int) -> dict:
    """D, eta, s of C_{n1} + C_{n2} for 1 <= n1 | n2.

    D is n1 + n2 - 1 (= D* when n1 > 1); the "- 2" form is off by one.
    """
    if n1 < 1 or n2 % n1:
        raise InvalidInput(f"need 1 <= n1 | n2, got ({n1}, {n2})")
    return {"D": n1 + n2 - 1, "eta": 2 * n1 + n2 - 2, "s": 2 * n1 + 2 * n2 - 3}


def trivial_a_r_lower(r: int) -> int:
    """The elementary lower bound 2^r - 1 for a_r."""
    if r < 1:
        raise InvalidInput("r must be >= 1")
    return 2**r - 1


# ---------------------------------------------------------------- Alon-Dubiner recursion

def _check_overrides(r: int, overrides: Optional[dict]) -> dict:
    if r < 1:
        raise InvalidInput("r must be >= 1")
    overrides = dict(overrides or {})
    for k in overrides:
        if not 1 <= k <= r:
            raise InvalidInput(f"override index {k} outside [1, {r}]")
    return overrides


def alon_dubiner_c(r: int, overrides: Optional[dict] = None) -> float:
    """c(r) = 256 r (log2 r + 5) c(r-1) + (r + 1), c(1) = 2, with any c(k)
    pinned by ``overrides``; each step rounded up."""
    overrides = _check_overrides(r, overrides)
    c = float(overrides.get(1, 2))
    for k in range(2, r + 1):
        if k in overrides:
            c = float(overrides[k])
            continue
        c = _mul_up(_mul_up(float(256 * k), _add_up(_log2_up(k), 5.0)), c)
        c = _add_up(c, float(k + 1))
    return c


def alon_dubiner_c_enclosure(r: int, overrides: Optional[dict] = None, dps: int = 50):
    """Interval (mpmath.iv.mpf) containing the exact c(r)."""
    overrides = _check_overrides(r, overrides)
    iv = mpmath.iv
    with mpmath.workdps(dps):
        old = iv.dps
        iv.dps = dps
        try:
            c = iv.mpf(str(overrides.get(1, 2)))
            for k in range(2, r + 1):
                if k in overrides:
                    c = iv.mpf(str(overrides[k]))
                    continue
                if k & (k - 1) == 0:
                    log2k = iv.mpf(k.bit_length() - 1)
                else:
                    log2k = iv.log(k) / iv.log(2)
                c = 256 * k * (log2k + 5) * c + (k + 1)
        finally:
            iv.dps = old
    return c


def alon_dubiner_c_endpoints(r: int, overrides: Optional[dict] = None, dps: int = 50) -> tuple:
    """The enclosure's endpoints as exact Fractions (lo, hi)."""
    enc = alon_dubiner_c_enclosure(r, overrides, dps)
    out = []
    # enough working precision that converting an endpoint does not round
    with mpmath.workdps(dps + 20):
        for end in (enc.a, enc.b):
            man, exp = mpmath.mpf(end).man_exp
            out.append(Fraction(man) * Fraction(2) ** exp)
    return tuple(out)


# ---------------------------------------------------------------- EGZ composition

def eegkr_s_bound(G: GroupDescriptor, b: Sequence[int]) -> BoundReport:
    """sum_{i=1..r} (b_{r+1-i} - b_{r-i}) n_i - b_r + 1 with b_0 = 0.

    Valid whenever s(C_p^i) <= b_i (p - 1) + 1 for every prime p | exp(G)
    and i <= r; that hypothesis is the caller's responsibility.
    """
    b = [int(x) for x in b]
    r = G.rank
    if len(b) != r:
        raise InvalidInput(f"need {r} coefficients for {G}, got {len(b)}")
    bb = [0] + b
    value = sum((bb[r + 1 - i] - bb[r - i]) * G.factors[i - 1] for i in range(1, r + 1)) - bb[r] + 1
    return BoundReport("s_composed", value, {"group": G.literal, "b": b},
                       "EGZ composition: s(G) <= sum (b_{r+1-i} - b_{r-i}) n_i - b_r + 1",
                       details={"hypothesis": "s(C_p^i) <= b_i (p-1) + 1 for all primes p | exp(G)"})


@dataclass
class A3Derivation:
    c3: Fraction
    s_coeff: int
    eta_coeff: int
    split_prime: int
    last_small_prime: Optional[int]
    small_requirement: int
    large_requirement: int

    @property
    def b(self) -> tuple:
        # s(C_p) = 2(p-1)+1, s(C_p^2) = 4(p-1)+1
        return (2, 4, self.s_coeff)

    def as_record(self) -> dict:
        return {"c3": str(self.c3), "s_coeff": self.s_coeff, "eta_coeff": self.eta_coeff,
                "split_prime": self.split_prime, "last_small_prime": self.last_small_prime,
                "small_requirement": self.small_requirement,
                "large_requirement": self.large_requirement}


class DerivationFailed(RuntimeError):
    pass


def _large_requirement(c3: Fraction, p: int) -> int:
    """Least integer b with c3 * p < b (p - 1) + 1."""
    return math.floor((c3 * p - 1) / (p - 1)) + 1


def derive_a3(c3, split_at: Optional[int] = None) -> A3Derivation:
    """Least b with s(C_p^3) <= b (p - 1) + 1 for every prime p, given
    s(C_p^3) <= |G| + exp(G) - 1 = p^3 + p - 1 and s(C_p^3) <= c3 * p.

    Primes below the split use the first bound (exactly b >= p^2 + p + 2),
    primes from the split on use the second, whose worst case is the split
    prime itself. ``split_at`` forces a particular split prime.
    """
    c3 = to_fraction(c3)
    if c3 <= 3:
        raise InvalidInput("c3 must exceed 3")
    if split_at is not None and not (split_at >= 2 and nextprime(split_at - 1) == split_at):
        raise InvalidInput(f"split prime {split_at} is not prime")
    best = None
    small_req, last_small = 0, None
    p = 2
    while p <= DERIVATION_PRIME_CAP:
        large_req = _large_requirement(c3, p)
        b = max(small_req, large_req)
        if split_at is None or p == split_at:
            if best is None or b < best.s_coeff:
                best = A3Derivation(c3, b, b - 1, p, last_small, small_req, large_req)
            if split_at is not None:
                break
        # p moves to the small side
        small_req = max(small_req, p * p + p + 2)
        last_small = p
        if split_at is None and best is not None and small_req >= best.s_coeff:
            break
        p = nextprime(p)
    if best is None:
        raise DerivationFailed(f"no feasible split below {DERIVATION_PRIME_CAP}")
    return best


def primes_upto(n: int) -> list:
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytes(len(range(p * p, n + 1, p)))
    return [i for i in range(n + 1) if sieve[i]]


def verify_a3_derivation(d: A3Derivation, limit: int = 10**6) -> list:
    """Primes p <= limit at which the derived coefficient fails either
    defining inequality (empty list when the derivation holds)."""
    b = d.s_coeff
    num, den = d.c3.numerator, d.c3.denominator
    bad = []
    for p in primes_upto(limit):
        if p < d.split_prime:
            ok = p**3 + p - 1 <= b * (p - 1) + 1
        else:
            ok = num * p < den * (b * (p - 1) + 1)
        if not ok:
            bad.append(p)
    return bad


# ---------------------------------------------------------------- rank three

def main_bound(n1: int, n2: int, n3: int, a3: int = A3_PROVEN) -> BoundReport:
    """D(C_n1 + C_n2 + C_n3) <= D*(G) + (a3 - 3)(n1 - 1) via the subgroup
    H = C_{n2/n1} + C_{n3/n1} with G/H = C_n1^3."""
    _check_chain(n1, n2, n3)
    k = n2 // n1 + n3 // n1 - 1  # D(H), rank <= 2 closed form
    pipeline = n1 * (k - 1) + a3 * (n1 - 1) + 1
    closed = (n1 - 1) + (n2 - 1) + (n3 - 1) + 1 + (a3 - 3) * (n1 - 1)
    assert pipeline == closed, (pipeline, closed)
    return BoundReport("main_bound", closed, {"n1": n1, "n2": n2, "n3": n3, "a3": a3},
                       "D(G) <= (n1-1)+(n2-1)+(n3-1)+1+(a3-3)(n1-1)",
                       conjectural=a3 < A3_PROVEN,
                       details={"D_H": k, "quotient": f"{n1},{n1},{n1}",
                                "eta_quotient_bound": a3 * (n1 - 1) + 1,
                                "pipeline_value": pipeline})


def expanded_main_bound(n1: int, n2: int, n3: int, a3: int = A3_PROVEN) -> int:
    """The main bound written as (a3-2)(n1-1) + (n2-1) + (n3-1) + 1."""
    return (a3 - 2) * (n1 - 1) + (n2 - 1) + (n3 - 1) + 1


def crossover_threshold(n1: int, n2: int, a3: int = A3_PROVEN) -> float:
    """n3 above which the main bound beats exp(G)(1 + ln(|G|/exp(G)))."""
    if n1 <= 1:
        raise InvalidInput(f"need n1 > 1, got {n1}")
    _check_chain(n1, n2)
    num = float((a3 - 2) * (n1 - 1) + n2 - 1)
    den = math.nextafter(_log_down(n1) + _log_down(n2), -math.inf)
    return _div_up(num, den)


def crossover_compare(n1: int, n2: int, n3: int, a3: int = A3_PROVEN) -> dict:
    _check_chain(n1, n2, n3)
    new = expanded_main_bound(n1, n2, n3, a3)
    old = log_upper_bound(GroupDescriptor((n1, n2, n3)))
    return {"main_bound": new, "log_bound": old, "main_is_smaller": new < old,
            "threshold": crossover_threshold(n1, n2, a3)}


def omega(n: int) -> int:
    if n < 1:
        raise InvalidInput("omega needs n >= 1")
    count = 0
    p = 2
    while p * p <= n:
        if n % p == 0:
            count += 1
            while n % p == 0:
                n //= p
        p += 1
    return count + (n > 1)


def corollary_bound(n: int, a3: int = A3_PROVEN) -> int:
    """D(C_n^3) <= min(a3, 3^omega(n)) (n - 1) + 1."""
    if n < 2:
        raise InvalidInput("need n >= 2")
    return min(a3, 3 ** omega(n)) * (n - 1) + 1


def conjecture_window(n1: int, n2: int, n3: int) -> tuple:
    _check_chain(n1, n2, n3)
    lo = n1 + n2 + n3 - 2
    return lo, lo + CONJECTURE_SLACK * (n1 - 1)


# ---------------------------------------------------------------- reporting

def bounds_table(G: GroupDescriptor, a3: int = A3_PROVEN) -> list:
    """Every applicable bound for G as a list of BoundReports."""
    rows = [BoundReport("D_star", d_star(G), {"group": G.literal},
                        "D*(G) = 1 + sum (n_i - 1); lower bound for D(G)")]
    if G.order > 1:
        rows.append(BoundReport("D_log_upper", log_upper_bound(G), {"group": G.literal},
                                "D(G) <= exp(G)(1 + ln(|G|/exp(G)))", exact=False,
                                details={"log": "natural"}))
        rows.append(BoundReport("s_gao_yang", gao_yang_s_bound(G), {"group": G.literal},
                                "s(G) <= |G| + exp(G) - 1"))
    if 1 <= G.rank <= 2:
        n1, n2 = (1, G.factors[0]) if G.rank == 1 else G.factors
        for name, v in rank2_closed_forms(n1, n2).items():
            rows.append(BoundReport(f"{name}_rank2_exact", v, {"n1": n1, "n2": n2},
                                    "rank <= 2 closed forms"))
    if G.rank == 3:
        n1, n2, n3 = G.factors
        rows.append(main_bound(n1, n2, n3, a3))
        lo, hi = conjecture_window(n1, n2, n3)
        rows.append(BoundReport("conjecture_window", hi, {"n1": n1, "n2": n2, "n3": n3},
                                "D*(G) <= D(G) <= D*(G) + 5(n1 - 1)", conjectural=True,
                                details={"lo": lo, "hi": hi}))
        if n1 == n3:
            rows.append(BoundReport("corollary", corollary_bound(n1, a3), {"n": n1, "a3": a3},
                                    "D(C_n^3) <= min(a3, 3^omega(n))(n-1) + 1",
                                    conjectural=a3 < A3_PROVEN))
    return rows

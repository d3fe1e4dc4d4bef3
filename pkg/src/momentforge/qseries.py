"""Exact q-series arithmetic: q-Pochhammer products, Gaussian binomials,
and the alternating inversion coefficients used to recover the mass at the
trivial group from surjection moments.

Everything here is exact: integers are arbitrary precision and the
coefficients are `fractions.Fraction`. Floating point never enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError

Rational = Fraction

ABELIAN = "abelian"
NONABELIAN = "nonabelian"


def is_prime_power(n: int) -> bool:
    """True iff n = p**r for a prime p and r >= 1."""
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            while n % d == 0:
                n //= d
            return n == 1
        d += 1
    return True  # n itself is prime


@dataclass(frozen=True)
class SimpleType:
    """An isomorphism class of simple building block.

    Abelian blocks carry the size h of their endomorphism field; h must be
    a prime power. Non-abelian blocks carry their automorphism count.
    """

    kind: str
    h: int | None = None
    aut: int | None = None

    def __post_init__(self) -> None:
        if self.kind == ABELIAN:
            if self.aut is not None:
                raise InputError("abelian type takes h, not aut")
            if self.h is None or self.h < 2 or not is_prime_power(self.h):
                raise InputError(
                    f"abelian type needs a prime-power field size h >= 2, got {self.h}"
                )
        elif self.kind == NONABELIAN:
            if self.h is not None:
                raise InputError("nonabelian type takes aut, not h")
            if self.aut is None or self.aut < 1:
                raise InputError(f"nonabelian type needs aut >= 1, got {self.aut}")
        else:
            raise InputError(f"unknown simple type kind {self.kind!r}")

    @classmethod
    def abelian(cls, h: int) -> "SimpleType":
        return cls(kind=ABELIAN, h=h)

    @classmethod
    def nonabelian(cls, aut: int) -> "SimpleType":
        return cls(kind=NONABELIAN, aut=aut)

    @property
    def is_abelian(self) -> bool:
        return self.kind == ABELIAN

    def to_json_obj(self) -> dict:
        if self.is_abelian:
            return {"kind": ABELIAN, "h": self.h}
        return {"kind": NONABELIAN, "aut": self.aut}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SimpleType":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise InputError(f"bad simple-type JSON: {obj!r}")
        if obj["kind"] == ABELIAN:
            return cls.abelian(int(obj["h"]))
        if obj["kind"] == NONABELIAN:
            return cls.nonabelian(int(obj["aut"]))
        raise InputError(f"bad simple-type kind in JSON: {obj['kind']!r}")


def q_pochhammer(h: int, k: int) -> int:
    """prod_{j=1..k} (h**j - 1); the empty product for k = 0."""
    if h < 2:
        raise InputError(f"q_pochhammer needs h >= 2, got {h}")
    if k < 0:
        raise InputError(f"q_pochhammer needs k >= 0, got {k}")
    out = 1
    power = 1
    for _ in range(k):
        power *= h
        out *= power - 1
    return out


def q_binomial(e: int, k: int, h: int) -> int:
    """Gaussian binomial coefficient (e choose k) with base h.

    Counts k-dimensional subspaces of an e-dimensional space over the
    h-element field; 0 when k > e.
    """
    if h < 2:
        raise InputError(f"q_binomial needs h >= 2, got {h}")
    if e < 0 or k < 0:
        raise InputError(f"q_binomial needs e, k >= 0, got e={e}, k={k}")
    if k > e:
        return 0
    k = min(k, e - k)
    num = 1
    for j in range(e - k + 1, e + 1):
        num *= h**j - 1
    den = q_pochhammer(h, k)
    assert num % den == 0, "Gaussian binomial must be integral"
    return num // den


def inversion_coefficient(t: SimpleType, k: int) -> Rational:
    """k-th coefficient of the alternating inversion sum for type t.

    Abelian: (-1)**k / ((h-1)(h**2-1)...(h**k-1)).
    Non-abelian: (-1)**k / (k! * aut**k).
    Always 1 at k = 0. Signs alternate and magnitudes decay
    superexponentially, which is what makes truncations two-sided bounds.
    """
    if k < 0:
        raise InputError(f"inversion_coefficient needs k >= 0, got {k}")
    sign = -1 if k % 2 else 1
    if t.is_abelian:
        return Fraction(sign, q_pochhammer(t.h, k))
    return Fraction(sign, math.factorial(k) * t.aut**k)

"""Truncated moment inversion with certified two-sided brackets.

The alternating sums sum_{k<=r} c_k * moment(k) bound the mass at the
trivial index from above at every even r and from below at every odd r,
for any nonnegative mass function with the given moments. Taking the best
truncation on each side produces an exact-rational interval that is sound
unconditionally; it shrinks to a point as soon as the moments vanish
beyond the truncation.

Several types are eliminated one at a time: each stage brackets the inner
sum over one exponent, and later stages consume those intervals with
monotone (sign-directed) interval arithmetic, so soundness survives the
induction.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InfeasibleMomentsError, InputError
from .qseries import SimpleType, inversion_coefficient
from .rationals import format_rational, parse_rational
from .surjcount import MultiIndex, TypeBasis, check_index


@dataclass(frozen=True)
class Bracket:
    """Certified exact-rational interval [lower, upper]."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise InfeasibleMomentsError(
                f"bracket lower bound {self.lower} exceeds upper bound {self.upper}; "
                "the inputs are not moments of any nonnegative measure"
            )

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def contains(self, value: Fraction | int) -> bool:
        return self.lower <= value <= self.upper

    def scale(self, factor: Fraction) -> "Bracket":
        if factor < 0:
            raise InputError("bracket scaling factor must be nonnegative")
        return Bracket(self.lower * factor, self.upper * factor)

    def to_json_obj(self) -> dict:
        return {"lower": format_rational(self.lower), "upper": format_rational(self.upper)}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "Bracket":
        try:
            return cls(parse_rational(obj["lower"]), parse_rational(obj["upper"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad bracket JSON {obj!r}: {exc}") from exc

    def __str__(self) -> str:
        return f"[{self.lower}, {self.upper}]"


class MomentTable:
    """Complete grid of moments over a type basis.

    values[k] holds the k-th joint moment (the integral of the surjection
    count onto the k-th product power) for every multi-index k with
    k_i <= bound_i. All values must be nonnegative exact rationals.
    """

    def __init__(
        self,
        basis: TypeBasis,
        bound: Sequence[int],
        values: Mapping[MultiIndex, Fraction | int],
    ):
        self.basis = basis
        self.bound = check_index(basis, bound, "bound")
        table: dict[MultiIndex, Fraction] = {}
        for k, v in values.items():
            k = check_index(basis, k, "moment index")
            v = Fraction(v)
            if v < 0:
                raise InputError(f"moment at {k} is negative: {v}")
            table[k] = v
        for k in itertools.product(*(range(b + 1) for b in self.bound)):
            if k not in table:
                raise InputError(f"moment table is missing index {k}")
        self.values = table

    @classmethod
    def one_type(
        cls, t: SimpleType, values: Sequence[Fraction | int]
    ) -> "MomentTable":
        """Table over a single type from the list of moments at k = 0, 1, ..."""
        return cls(
            TypeBasis([t]),
            (len(values) - 1,),
            {(k,): v for k, v in enumerate(values)},
        )

    def __call__(self, k: Sequence[int]) -> Fraction:
        k = check_index(self.basis, k, "moment index")
        for i, (v, b) in enumerate(zip(k, self.bound)):
            if v > b:
                raise InputError(
                    f"moment index {k} exceeds the table bound {self.bound} at type {i}"
                )
        return self.values[k]

    def reorder(self, perm: Sequence[int]) -> "MomentTable":
        """Table with the basis types permuted; entry i comes from perm[i]."""
        perm = tuple(perm)
        if sorted(perm) != list(range(len(self.basis))):
            raise InputError(f"not a permutation of 0..{len(self.basis) - 1}: {perm}")
        basis = TypeBasis(self.basis[i] for i in perm)
        bound = tuple(self.bound[i] for i in perm)
        values = {
            tuple(k[i] for i in perm): v for k, v in self.values.items()
        }
        return MomentTable(basis, bound, values)

    def to_json_obj(self) -> dict:
        return {
            "basis": self.basis.to_json_obj(),
            "bound": list(self.bound),
            "moments": [
                {"k": list(k), "value": format_rational(v)}
                for k, v in sorted(self.values.items())
            ],
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "MomentTable":
        try:
            basis = TypeBasis.from_json_obj(obj["basis"])
            bound = obj["bound"]
            values = {
                tuple(rec["k"]): parse_rational(rec["value"]) for rec in obj["moments"]
            }
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad moment-table JSON: {exc}") from exc
        return cls(basis, bound, values)

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj())


def _point(v: Fraction) -> tuple[Fraction, Fraction]:
    return (v, v)


def _bracket_from_intervals(
    t: SimpleType, intervals: Sequence[tuple[Fraction, Fraction]], r_max: int
) -> tuple[Fraction, Fraction]:
    """Best even-truncation upper bound and odd-truncation lower bound of
    sum_k c_k * interval_k, evaluated endpoint-wise by the sign of c_k."""
    lo_sum = Fraction(0)
    hi_sum = Fraction(0)
    best_upper = None
    best_lower = Fraction(0)  # masses are nonnegative
    for r in range(r_max + 1):
        c = inversion_coefficient(t, r)
        lo_k, hi_k = intervals[r]
        if c > 0:
            lo_sum += c * lo_k
            hi_sum += c * hi_k
        else:
            lo_sum += c * hi_k
            hi_sum += c * lo_k
        if r % 2 == 0:
            best_upper = hi_sum if best_upper is None else min(best_upper, hi_sum)
        else:
            best_lower = max(best_lower, lo_sum)
    if best_upper is None:  # r_max < 0 cannot happen; guard for clarity
        raise InputError("r_max must be >= 0")
    if best_lower > best_upper:
        raise InfeasibleMomentsError(
            "odd-truncation lower bound exceeds even-truncation upper bound; "
            "the inputs are not moments of any nonnegative measure"
        )
    return best_lower, best_upper


def partial_sum(moments: MomentTable, t: SimpleType, r: int) -> Fraction:
    """sum_{k=0..r} c_k * moment(k) for a one-type table, exactly."""
    _check_one_type(moments, t)
    if r < 0:
        raise InputError(f"r must be >= 0, got {r}")
    if r > moments.bound[0]:
        raise InputError(f"r={r} exceeds the available moments (bound {moments.bound[0]})")
    return sum(
        (inversion_coefficient(t, k) * moments((k,)) for k in range(r + 1)),
        Fraction(0),
    )


def invert_zero(moments: MomentTable, t: SimpleType, r_max: int) -> Bracket:
    """Certified bracket for the mass at exponent 0 of any nonnegative mass
    function with the given one-type moments.

    Upper bound: the least even-truncation sum. Lower bound: the greatest
    odd-truncation sum, floored at 0.
    """
    _check_one_type(moments, t)
    if r_max < 0:
        raise InputError(f"r_max must be >= 0, got {r_max}")
    if r_max > moments.bound[0]:
        raise InputError(
            f"r_max={r_max} exceeds the available moments (bound {moments.bound[0]})"
        )
    intervals = [_point(moments((k,))) for k in range(r_max + 1)]
    lo, hi = _bracket_from_intervals(t, intervals, r_max)
    return Bracket(lo, hi)


def _check_one_type(moments: MomentTable, t: SimpleType) -> None:
    if len(moments.basis) != 1:
        raise InputError(
            f"expected a one-type moment table, got {len(moments.basis)} types"
        )
    if moments.basis[0] != t:
        raise InputError(
            f"type mismatch: table is over {moments.basis[0]}, asked about {t}"
        )


def multi_invert_zero(moments: MomentTable, r_max: Sequence[int]) -> Bracket:
    """Certified bracket for the mass at the all-zero multi-index.

    Types are eliminated in basis order. Stage j turns, for each remaining
    index, the family of (interval-valued) moments over k_j into one
    interval via the even/odd truncation bounds; stage-one inputs are exact
    points. The result contains the mass at (0,...,0) of any nonnegative
    mass function with the given joint moments.
    """
    r_max = check_index(moments.basis, r_max, "r_max")
    for i, (r, b) in enumerate(zip(r_max, moments.bound)):
        if r > b:
            raise InputError(
                f"r_max={r_max} exceeds the table bound {moments.bound} at type {i}"
            )
    m = len(moments.basis)
    if m == 0:
        v = moments(())
        return Bracket(v, v)

    # current[idx] for idx over the remaining types j..m-1
    current: dict[MultiIndex, tuple[Fraction, Fraction]] = {
        idx: _point(moments.values[idx])
        for idx in itertools.product(*(range(r + 1) for r in r_max))
    }
    for j in range(m):
        t = moments.basis[j]
        rest = [range(r + 1) for r in r_max[j + 1 :]]
        nxt: dict[MultiIndex, tuple[Fraction, Fraction]] = {}
        for tail in itertools.product(*rest):
            intervals = [current[(k,) + tail] for k in range(r_max[j] + 1)]
            nxt[tail] = _bracket_from_intervals(t, intervals, r_max[j])
        current = nxt
    lo, hi = current[()]
    return Bracket(lo, hi)

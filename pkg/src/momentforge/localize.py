"""From moments of a measure on finite abelian groups to the mass of a
single group.

The route: moments of the localized measure at M are extension-class sums
of plain moments; inverting those localized moments brackets the localized
mass at 0, which is |Aut(M)| times the mass of M itself. The pipeline
consumes moment tables only; measures appear in the brute-force oracle
mu_local_direct used to cross-check it.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .budget import Budget
from .errors import InputError
from .finab import (
    FinAbGroup,
    Measure,
    aut_count,
    candidate_middles,
    enumerate_groups,
    extension_class_count,
    hom_count,
    surjection_kernel_profile,
)
from .inversion import Bracket, MomentTable, multi_invert_zero
from .rationals import format_rational, parse_rational
from .surjcount import MultiIndex, TypeBasis, check_index


class ModuleMomentTable:
    """Moments of a measure at finite abelian targets: group -> integral of
    the surjection count onto it.

    The table is complete for every group on `primes` with order up to
    order_bound; extra entries beyond that bound are allowed and used when
    present.
    """

    def __init__(
        self,
        primes: Iterable[int],
        order_bound: int,
        values: Mapping[FinAbGroup, Fraction | int],
    ):
        self.primes = tuple(sorted(set(int(p) for p in primes)))
        self.order_bound = int(order_bound)
        if self.order_bound < 1:
            raise InputError(f"order_bound must be >= 1, got {order_bound}")
        table: dict[FinAbGroup, Fraction] = {}
        for g, v in values.items():
            if not isinstance(g, FinAbGroup):
                raise InputError(f"moment keys must be groups, got {g!r}")
            if any(p not in self.primes for p in g.primes):
                raise InputError(f"group {g} is not supported on primes {self.primes}")
            v = Fraction(v)
            if v < 0:
                raise InputError(f"moment at {g} is negative: {v}")
            table[g] = v
        missing = [
            g for g in enumerate_groups(self.primes, self.order_bound) if g not in table
        ]
        if missing:
            raise InputError(
                f"moment table is not complete up to order {self.order_bound}; "
                f"missing {', '.join(str(g) for g in missing[:8])}"
                + ("..." if len(missing) > 8 else "")
            )
        self.values = table

    def __contains__(self, g: FinAbGroup) -> bool:
        return g in self.values

    def __call__(self, g: FinAbGroup) -> Fraction:
        try:
            return self.values[g]
        except KeyError:
            raise InputError(f"moment table has no entry for {g}") from None

    def to_json_obj(self) -> dict:
        return {
            "primes": list(self.primes),
            "order_bound": self.order_bound,
            "moments": [
                {"group": g.to_json_obj(), "value": format_rational(v)}
                for g, v in sorted(self.values.items(), key=lambda kv: kv[0].sort_key())
            ],
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "ModuleMomentTable":
        try:
            primes = obj["primes"]
            order_bound = obj["order_bound"]
            values = {
                FinAbGroup.from_json_obj(rec["group"]): parse_rational(rec["value"])
                for rec in obj["moments"]
            }
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad module moment-table JSON: {exc}") from exc
        return cls(primes, order_bound, values)

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj())


def complete_order_bound(primes: Sequence[int], keys: set[FinAbGroup]) -> int:
    """Largest B such that every group on `primes` of order <= B is a key."""
    if FinAbGroup.trivial() not in keys:
        return 0
    max_order = max(g.order for g in keys)
    for g in enumerate_groups(primes, max_order):
        if g not in keys:
            return g.order - 1
    return max_order


def _basis_primes(basis: TypeBasis) -> tuple[int, ...]:
    from .finab import is_prime

    ps = []
    for i, t in enumerate(basis):
        if not t.is_abelian or not is_prime(t.h):
            raise InputError(
                f"localization needs prime-field abelian basis entries, got {t} at {i}"
            )
        if t.h in ps:
            raise InputError(f"duplicate prime {t.h} in basis")
        ps.append(t.h)
    return tuple(ps)


def _semisimple_target(primes: Sequence[int], k: MultiIndex) -> FinAbGroup:
    return FinAbGroup.from_dict({p: [1] * ki for p, ki in zip(primes, k) if ki})


def localized_moments(
    table: ModuleMomentTable,
    M: FinAbGroup,
    basis: TypeBasis,
    k_bound: Sequence[int],
    budget: Budget | None = None,
) -> MomentTable:
    """Moments of the localized measure at M, one per multi-index k <= k_bound.

    The k-th localized moment is the extension-class sum
    sum_{M'} classCount(N_k, M', M) * table(M') / |Hom(M, N_k)| over middles
    of exact sequences 0 -> N_k -> M' -> M -> 0. Completeness is checked
    eagerly: a missing candidate middle is a hard error naming it.
    """
    ps = _basis_primes(basis)
    k_bound = check_index(basis, k_bound, "k_bound")
    if any(p not in table.primes for p in ps):
        raise InputError(
            f"basis primes {ps} are not all covered by the table primes {table.primes}"
        )
    if any(p not in table.primes for p in M.primes):
        raise InputError(f"{M} is not supported on the table primes {table.primes}")

    values: dict[MultiIndex, Fraction] = {}
    for k in itertools.product(*(range(b + 1) for b in k_bound)):
        target = _semisimple_target(ps, k)
        middles = candidate_middles(target, M)
        missing = [mid for mid in middles if mid not in table]
        if missing:
            raise InputError(
                f"moment table lacks middles for N={target}, M={M} "
                f"(order {target.order * M.order}): "
                + ", ".join(str(g) for g in missing[:8])
                + ("..." if len(missing) > 8 else "")
            )
        denom = hom_count(M, target)
        total = Fraction(0)
        for mid in middles:
            v = table(mid)
            if v:
                total += extension_class_count(target, M, mid, budget) * v
        values[k] = total / denom
    return MomentTable(basis, k_bound, values)


def mu_local_direct(
    mu: Measure, M: FinAbGroup, N: FinAbGroup, budget: Budget | None = None
) -> Fraction:
    """Mass the localized measure at M puts on N, by brute force.

    Integrates, over the support of mu, the number of surjections
    pi: X ->> M whose kernel semisimplifies to N. Oracle for the pipeline.
    """
    if not N.is_semisimple:
        raise InputError(f"N must be semisimple, got {N}")
    out = Fraction(0)
    for X, mass in mu.items():
        profile = surjection_kernel_profile(X, M, budget)
        count = profile.get(N, 0)
        if count:
            out += mass * count
    return out


def reconstruct_probability(
    table: ModuleMomentTable,
    M: FinAbGroup,
    basis: TypeBasis,
    r_max: Sequence[int],
    budget: Budget | None = None,
) -> Bracket:
    """Certified bracket for the mass at M of any nonnegative measure with
    the given moments: invert the localized moments, then divide by |Aut(M)|."""
    moments = localized_moments(table, M, basis, r_max, budget)
    bracket = multi_invert_zero(moments, r_max)
    return bracket.scale(Fraction(1, aut_count(M)))

"""Closed-form surjection counts between powers and products of simple types.

For an abelian type with endomorphism field of size h,
Sur(G**e, G**k) = (h**e - 1)(h**e - h)...(h**e - h**(k-1)), the number of
surjective k x e matrices over the field. For a non-abelian simple type,
Sur(G**e, G**k) = e(e-1)...(e+1-k) * aut**k. Counts across a basis of
pairwise non-isomorphic types multiply coordinatewise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError
from .qseries import SimpleType

MultiIndex = tuple[int, ...]


@dataclass(frozen=True)
class TypeBasis:
    """Ordered list of simple types, treated as pairwise non-isomorphic.

    Distinctness is positional: the constructor does not compare entries
    for abstract isomorphism.
    """

    types: tuple[SimpleType, ...]

    def __init__(self, types: Iterable[SimpleType]):
        object.__setattr__(self, "types", tuple(types))

    def __len__(self) -> int:
        return len(self.types)

    def __iter__(self):
        return iter(self.types)

    def __getitem__(self, i: int) -> SimpleType:
        return self.types[i]

    @classmethod
    def abelian_primes(cls, primes: Sequence[int]) -> "TypeBasis":
        """Basis of prime-field types F_p, one per prime, in the given order."""
        return cls(SimpleType.abelian(p) for p in primes)

    def to_json_obj(self) -> list:
        return [t.to_json_obj() for t in self.types]

    @classmethod
    def from_json_obj(cls, obj: list) -> "TypeBasis":
        return cls(SimpleType.from_json_obj(entry) for entry in obj)


def check_index(basis: TypeBasis, idx: Sequence[int], name: str) -> MultiIndex:
    idx = tuple(int(v) for v in idx)
    if len(idx) != len(basis):
        raise InputError(
            f"{name} has length {len(idx)} but the basis has {len(basis)} types"
        )
    if any(v < 0 for v in idx):
        raise InputError(f"{name} must be coordinatewise nonnegative, got {idx}")
    return idx


def sur_single(t: SimpleType, e: int, k: int) -> int:
    """Number of surjections from the e-th power of t onto the k-th power.

    Returns 0 whenever k > e and 1 when k = 0.
    """
    if e < 0 or k < 0:
        raise InputError(f"sur_single needs e, k >= 0, got e={e}, k={k}")
    if k > e:
        return 0
    if t.is_abelian:
        he = t.h**e
        out = 1
        power = 1
        for _ in range(k):
            out *= he - power
            power *= t.h
        return out
    out = t.aut**k
    for j in range(k):
        out *= e - j
    return out


def sur_product(basis: TypeBasis, e: Sequence[int], k: Sequence[int]) -> int:
    """Surjection count between products prod t_i**e_i -> prod t_i**k_i."""
    e = check_index(basis, e, "e")
    k = check_index(basis, k, "k")
    out = 1
    for t, ei, ki in zip(basis, e, k):
        out *= sur_single(t, ei, ki)
        if out == 0:
            return 0
    return out

"""Finite abelian groups in canonical form, plus every brute-force oracle.

A group is stored per prime as a weakly decreasing partition of cyclic
exponents, so Z/4 x Z/2 x Z/3 is {2: (2, 1), 3: (1,)}. The canonical form
is unique per isomorphism class, which lets groups serve as dict keys for
measures and moment tables.

Oracles here enumerate homomorphisms as generator-image tuples (an image
is any element killed by the generator order) and decide surjectivity by
image size |A| / |kernel|. They are deliberately dumb; the closed-form
counts elsewhere in the package are validated against them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import prod
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .budget import Budget, resolve
from .errors import ConsistencyError, InputError
from .qseries import SimpleType
from .surjcount import MultiIndex, TypeBasis, sur_single

_CHUNK_ENTRIES = 4_000_000  # target size for vectorized evaluation chunks


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def partitions(n: int) -> Iterator[tuple[int, ...]]:
    """All partitions of n as weakly decreasing tuples; () for n = 0."""
    if n == 0:
        yield ()
        return

    def rec(remaining: int, largest: int):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, largest), 0, -1):
            for rest in rec(remaining - first, first):
                yield (first,) + rest

    yield from rec(n, n)


@dataclass(frozen=True)
class FinAbGroup:
    """Canonical form of a finite abelian group.

    components maps each prime (in increasing order) to its weakly
    decreasing exponent partition. No prime appears with an empty
    partition, so the trivial group is the empty tuple.
    """

    components: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self) -> None:
        last_p = 0
        for p, parts in self.components:
            if p <= last_p:
                raise InputError(f"primes must be strictly increasing, got {self}")
            if not is_prime(p):
                raise InputError(f"{p} is not prime")
            if not parts:
                raise InputError(f"empty partition for prime {p}")
            if any(a < 1 for a in parts) or any(
                parts[i] < parts[i + 1] for i in range(len(parts) - 1)
            ):
                raise InputError(f"partition for prime {p} must be weakly decreasing >= 1")
            last_p = p

    @classmethod
    def from_dict(cls, comps: Mapping[int, Sequence[int]]) -> "FinAbGroup":
        items = []
        for p in sorted(comps):
            parts = tuple(sorted((int(a) for a in comps[p]), reverse=True))
            if parts:
                items.append((int(p), parts))
        return cls(tuple(items))

    @classmethod
    def trivial(cls) -> "FinAbGroup":
        return cls(())

    @classmethod
    def elementary(cls, p: int, rank: int) -> "FinAbGroup":
        if rank == 0:
            return cls.trivial()
        return cls(((p, (1,) * rank),))

    @classmethod
    def from_orders(cls, *orders: int) -> "FinAbGroup":
        """Group from cyclic factor orders, e.g. from_orders(12, 2) = Z/12 x Z/2."""
        comps: dict[int, list[int]] = {}
        for n in orders:
            if n < 1:
                raise InputError(f"cyclic order must be >= 1, got {n}")
            m, d = n, 2
            while d * d <= m:
                if m % d == 0:
                    a = 0
                    while m % d == 0:
                        m //= d
                        a += 1
                    comps.setdefault(d, []).append(a)
                d += 1
            if m > 1:
                comps.setdefault(m, []).append(1)
        return cls.from_dict(comps)

    @property
    def order(self) -> int:
        return prod(p ** sum(parts) for p, parts in self.components)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.components)

    def partition(self, p: int) -> tuple[int, ...]:
        for q, parts in self.components:
            if q == p:
                return parts
        return ()

    def rank(self, p: int) -> int:
        return len(self.partition(p))

    def conjugate(self, p: int) -> tuple[int, ...]:
        """Conjugate partition at p: entry j counts parts >= j+1."""
        parts = self.partition(p)
        if not parts:
            return ()
        return tuple(sum(1 for a in parts if a > j) for j in range(parts[0]))

    @property
    def is_trivial(self) -> bool:
        return not self.components

    @property
    def is_semisimple(self) -> bool:
        """True when every cyclic factor is of prime order."""
        return all(all(a == 1 for a in parts) for _, parts in self.components)

    @property
    def cyclic_moduli(self) -> tuple[int, ...]:
        """Orders of the canonical cyclic factors, primes ascending."""
        return tuple(p**a for p, parts in self.components for a in parts)

    def direct_sum(self, other: "FinAbGroup") -> "FinAbGroup":
        comps: dict[int, list[int]] = {p: list(parts) for p, parts in self.components}
        for p, parts in other.components:
            comps.setdefault(p, []).extend(parts)
        return FinAbGroup.from_dict(comps)

    def to_json_obj(self) -> dict:
        return {str(p): list(parts) for p, parts in self.components}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "FinAbGroup":
        if not isinstance(obj, Mapping):
            raise InputError(f"group JSON must be an object, got {obj!r}")
        try:
            return cls.from_dict({int(p): parts for p, parts in obj.items()})
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad group JSON {obj!r}: {exc}") from exc

    def __str__(self) -> str:
        if self.is_trivial:
            return "0"
        return " x ".join(f"Z/{d}" for d in self.cyclic_moduli)

    def sort_key(self):
        return (self.order, self.components)


def enumerate_groups(primes: Iterable[int], order_bound: int) -> list[FinAbGroup]:
    """All groups supported on `primes` of order <= order_bound, each once,
    sorted by (order, partition data)."""
    ps = tuple(sorted(set(int(p) for p in primes)))
    for p in ps:
        if not is_prime(p):
            raise InputError(f"{p} is not prime")
    if order_bound < 1:
        raise InputError(f"order_bound must be >= 1, got {order_bound}")
    return list(_enumerate_cached(ps, order_bound))


@lru_cache(maxsize=1024)
def _enumerate_cached(ps: tuple[int, ...], order_bound: int) -> tuple[FinAbGroup, ...]:
    out: list[FinAbGroup] = []

    def rec(i: int, bound: int, chosen: list[tuple[int, tuple[int, ...]]]):
        if i == len(ps):
            out.append(FinAbGroup(tuple(chosen)))
            return
        p = ps[i]
        a, pa = 0, 1
        while pa <= bound:
            if a == 0:
                rec(i + 1, bound, chosen)
            else:
                for parts in partitions(a):
                    rec(i + 1, bound // pa, chosen + [(p, parts)])
            a += 1
            pa *= p

    rec(0, order_bound, [])
    out.sort(key=FinAbGroup.sort_key)
    return tuple(out)


# --------------------------------------------------------------------------
# Element tables and homomorphism enumeration
# --------------------------------------------------------------------------


class _Table:
    """Element table of a group: mixed-radix coordinates per cyclic factor."""

    __slots__ = ("group", "moduli", "coords", "_torsion")

    def __init__(self, group: FinAbGroup):
        self.group = group
        self.moduli = np.array(group.cyclic_moduli, dtype=np.int64)
        n = group.order
        if len(self.moduli):
            self.coords = np.array(
                np.unravel_index(np.arange(n), tuple(self.moduli)), dtype=np.int64
            ).T
        else:
            self.coords = np.zeros((1, 0), dtype=np.int64)
        self._torsion: dict[int, np.ndarray] = {}

    def torsion_mask(self, d: int) -> np.ndarray:
        """Boolean mask of elements y with d*y = 0."""
        mask = self._torsion.get(d)
        if mask is None:
            if len(self.moduli):
                mask = ((self.coords * d) % self.moduli == 0).all(axis=1)
            else:
                mask = np.ones(1, dtype=bool)
            self._torsion[d] = mask
        return mask


@lru_cache(maxsize=256)
def _table(group: FinAbGroup) -> _Table:
    return _Table(group)


def _tables_for(A: FinAbGroup, B: FinAbGroup, budget: Budget, what: str):
    budget.check_order(A.order, what)
    budget.check_order(B.order, what)
    return _table(A), _table(B)


def _hom_image_choices(ta: _Table, tb: _Table) -> list[np.ndarray]:
    """Allowed image indices in B per generator of A (elements killed by the
    generator order). Every choice tuple defines a homomorphism."""
    return [np.flatnonzero(tb.torsion_mask(int(d))) for d in ta.moduli]


def _candidate_block(choices: list[np.ndarray], start: int, stop: int) -> np.ndarray:
    """(stop-start, rank_A) slice of the lexicographic candidate enumeration."""
    idx = np.arange(start, stop, dtype=np.int64)
    if not choices:
        return np.zeros((len(idx), 0), dtype=np.int64)
    dims = tuple(len(ch) for ch in choices)
    digits = np.unravel_index(idx, dims)
    return np.stack([ch[d] for ch, d in zip(choices, digits)], axis=1)


def _iter_hom_chunks(ta: _Table, tb: _Table, choices: list[np.ndarray], total: int):
    """Yield kernel_bool blocks, kernel_bool[t, x] marking elements of A sent
    to 0 by candidate hom t of the block. Candidates are generated lazily."""
    n_a = ta.coords.shape[0]
    ncomp_b = len(tb.moduli)
    rows = max(1, _CHUNK_ENTRIES // max(1, n_a * max(1, ncomp_b)))
    for start in range(0, total, rows):
        block = _candidate_block(choices, start, min(start + rows, total))
        img = tb.coords[block]  # (c, rA, ncompB)
        if ncomp_b == 0:
            yield np.ones((block.shape[0], n_a), dtype=bool)
            continue
        vals = np.einsum("xi,tic->txc", ta.coords, img) % tb.moduli
        yield (vals == 0).all(axis=2)


def hom_count(A: FinAbGroup, B: FinAbGroup) -> int:
    """|Hom(A, B)| = prod_p prod_{i,j} p**min(lambda_i(A), lambda_j(B))."""
    out = 1
    for p, parts_a in A.components:
        parts_b = B.partition(p)
        for i in parts_a:
            for j in parts_b:
                out *= p ** min(i, j)
    return out


def hom_count_bruteforce(A: FinAbGroup, B: FinAbGroup, budget: Budget | None = None) -> int:
    """|Hom(A, B)| by scanning B's elements for each generator order of A."""
    budget = resolve(budget)
    ta, tb = _tables_for(A, B, budget, f"hom enumeration {A} -> {B}")
    return prod(int(tb.torsion_mask(int(d)).sum()) for d in ta.moduli)


def aut_count(A: FinAbGroup) -> int:
    """|Aut(A)| via the per-prime closed form for abelian p-groups.

    Agrees with aut_bruteforce wherever the latter is affordable; the
    extension-class machinery relies on this for middles whose endomorphism
    sets are far too large to enumerate.
    """
    out = 1
    for p, parts in A.components:
        out *= _aut_count_p(p, parts)
    return out


def _aut_count_p(p: int, parts: tuple[int, ...]) -> int:
    e = sorted(parts)  # nondecreasing exponents e_1 <= ... <= e_n
    n = len(e)
    d = [max(l for l in range(n) if e[l] == e[k]) + 1 for k in range(n)]
    c = [min(l for l in range(n) if e[l] == e[k]) + 1 for k in range(n)]
    out = 1
    for k in range(n):
        out *= p ** d[k] - p**k
    for j in range(n):
        out *= (p ** e[j]) ** (n - d[j])
    for i in range(n):
        out *= (p ** (e[i] - 1)) ** (n - c[i] + 1)
    return out


def aut_bruteforce(A: FinAbGroup, budget: Budget | None = None) -> int:
    """|Aut(A)| by enumerating endomorphisms and keeping the bijective ones."""
    budget = resolve(budget)
    ta, tb = _tables_for(A, A, budget, f"aut enumeration {A}")
    choices = _hom_image_choices(ta, tb)
    total = prod(len(ch) for ch in choices)
    budget.check_candidates(total, f"aut enumeration {A}")
    count = 0
    for kernel in _iter_hom_chunks(ta, tb, choices, total):
        count += int((kernel.sum(axis=1) == 1).sum())
    return count


def sur_bruteforce(A: FinAbGroup, B: FinAbGroup, budget: Budget | None = None) -> int:
    """Exact |Sur(A, B)| by exhausting generator-image tuples.

    Surjectivity test: a hom is onto iff |A| / |kernel| = |B|.
    """
    return _sur_bruteforce_cached(A, B, resolve(budget))


@lru_cache(maxsize=65536)
def _sur_bruteforce_cached(A: FinAbGroup, B: FinAbGroup, budget: Budget) -> int:
    ta, tb = _tables_for(A, B, budget, f"surjection enumeration {A} -> {B}")
    choices = _hom_image_choices(ta, tb)
    total = prod(len(ch) for ch in choices)
    budget.check_candidates(total, f"surjection enumeration {A} -> {B}")
    n_a, n_b = A.order, B.order
    count = 0
    for kernel in _iter_hom_chunks(ta, tb, choices, total):
        count += int((kernel.sum(axis=1) * n_b == n_a).sum())
    return count


def sur_count(A: FinAbGroup, B: FinAbGroup, budget: Budget | None = None) -> int:
    """|Sur(A, B)| with cheap certified short cuts.

    Quotients of A can only shrink conjugate partitions, so a failed
    domination check forces 0 without enumeration. Semisimple targets see
    only A modulo its radical, so the matrix formula applies to the ranks.
    Everything else falls through to sur_bruteforce. Equality with the
    brute-force count on the full desk-scale range is part of the test
    suite.
    """
    if B.is_trivial:
        return 1
    if A.order % B.order:
        return 0
    for p in B.primes:
        ca, cb = A.conjugate(p), B.conjugate(p)
        if len(cb) > len(ca) or any(b > a for a, b in zip(ca, cb)):
            return 0
    if B.is_semisimple:
        out = 1
        for p in B.primes:
            out *= sur_single(SimpleType.abelian(p), A.rank(p), B.rank(p))
        return out
    return sur_bruteforce(A, B, budget)


# --------------------------------------------------------------------------
# Semisimplification and kernel bookkeeping
# --------------------------------------------------------------------------


def semisimplify(A: FinAbGroup, basis: TypeBasis) -> MultiIndex:
    """Exponent vector of A modulo its radical, against a prime-field basis.

    Entry i is the number of cyclic p_i-factors of A, realizing
    A / (rad) = prod F_{p_i}**e_i. Primes of A outside the basis are a hard
    input error.
    """
    prime_to_slot: dict[int, int] = {}
    for i, t in enumerate(basis):
        if not t.is_abelian or not is_prime(t.h):
            raise InputError(
                "semisimplify needs a basis of prime-field abelian types, "
                f"got {t} at position {i}"
            )
        if t.h in prime_to_slot:
            raise InputError(f"duplicate prime {t.h} in basis")
        prime_to_slot[t.h] = i
    e = [0] * len(basis)
    for p, parts in A.components:
        if p not in prime_to_slot:
            raise InputError(f"prime {p} of {A} is not covered by the basis")
        e[prime_to_slot[p]] = len(parts)
    return tuple(e)


@lru_cache(maxsize=4096)
def _kernel_profile(X: FinAbGroup, M: FinAbGroup, budget: Budget) -> tuple:
    """For each surjection X ->> M, the semisimplification of its kernel.

    Returns ((elementary_group, multiplicity), ...): how many surjections
    have a kernel whose quotient mod the radical is that group.
    """
    ta, tb = _tables_for(X, M, budget, f"kernel enumeration {X} -> {M}")
    choices = _hom_image_choices(ta, tb)
    total = prod(len(ch) for ch in choices)
    budget.check_candidates(total, f"kernel enumeration {X} -> {M}")
    n_x, n_m = X.order, M.order
    ps = X.primes
    kill = [ta.torsion_mask(p).astype(np.int64) for p in ps]
    counts: dict[FinAbGroup, int] = {}
    for kernel in _iter_hom_chunks(ta, tb, choices, total):
        sizes = kernel.sum(axis=1)
        surj = sizes * n_m == n_x
        if not surj.any():
            continue
        ker = kernel[surj]
        if not ps:
            key = FinAbGroup.trivial()
            counts[key] = counts.get(key, 0) + len(ker)
            continue
        # p-torsion count of the kernel is p**rank of its p-part
        ranks = []
        for p, mask in zip(ps, kill):
            tor = ker @ mask
            r = np.zeros(len(tor), dtype=np.int64)
            t = tor.copy()
            while (t > 1).any():
                big = t > 1
                t[big] //= p
                r[big] += 1
            if (p**r != tor).any():
                raise ConsistencyError(
                    f"kernel torsion count not a power of {p} in {X} -> {M}"
                )
            ranks.append(r)
        for row in np.stack(ranks, axis=1):
            key = FinAbGroup.from_dict({p: [1] * int(r) for p, r in zip(ps, row) if r})
            counts[key] = counts.get(key, 0) + 1
    return tuple(sorted(counts.items(), key=lambda kv: kv[0].sort_key()))


def surjection_kernel_profile(
    X: FinAbGroup, M: FinAbGroup, budget: Budget | None = None
) -> dict[FinAbGroup, int]:
    """Multiset of semisimplified kernels over all surjections X ->> M."""
    return dict(_kernel_profile(X, M, resolve(budget)))


def kernel_pair_count(
    X: FinAbGroup, M: FinAbGroup, N: FinAbGroup, budget: Budget | None = None
) -> int:
    """Number of pairs (pi: X ->> M, f: (ker pi)/rad ->> N), by enumeration."""
    if not N.is_semisimple:
        raise InputError(f"N must be semisimple, got {N}")
    budget = resolve(budget)
    out = 0
    for ker_ss, mult in _kernel_profile(X, M, budget):
        out += mult * sur_bruteforce(ker_ss, N, budget)
    return out


# --------------------------------------------------------------------------
# Extension classes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtensionTable:
    """Counts of isomorphism classes of exact sequences 0 -> N -> M' -> M -> 0,
    keyed by the middle group. Only middles with a positive count appear."""

    sub: FinAbGroup
    quot: FinAbGroup
    entries: Mapping[FinAbGroup, Fraction]

    def __getitem__(self, middle: FinAbGroup) -> Fraction:
        return self.entries.get(middle, Fraction(0))

    def items(self):
        return sorted(self.entries.items(), key=lambda kv: kv[0].sort_key())


class _SpanTables:
    """Subgroup lattice of a small group with a tabulated join operation.

    join[s, x] is the id of the subgroup generated by subgroup s and
    element x; size[s] is its order. Lets surjection searches out of very
    large sources track only the span of generator images in the small
    target.
    """

    __slots__ = ("group", "join", "size", "_coords", "_moduli", "_strides")

    def __init__(self, group: FinAbGroup, budget: Budget):
        n = group.order
        budget.check_candidates(n * n, f"subgroup lattice for {group}")
        t = _table(group)
        self.group = group
        self._coords = t.coords
        self._moduli = t.moduli
        if len(t.moduli):
            strides = np.ones(len(t.moduli), dtype=np.int64)
            for c in range(len(t.moduli) - 2, -1, -1):
                strides[c] = strides[c + 1] * t.moduli[c + 1]
            self._strides = strides
            diff = (t.coords[:, None, :] - t.coords[None, :, :]) % t.moduli
            sub_idx = diff @ strides  # sub_idx[z, y] = index of z - y
            add_idx = ((t.coords[:, None, :] + t.coords[None, :, :]) % t.moduli) @ strides
        else:
            self._strides = np.zeros(0, dtype=np.int64)
            sub_idx = np.zeros((1, 1), dtype=np.int64)
            add_idx = np.zeros((1, 1), dtype=np.int64)

        masks: list[np.ndarray] = []
        ids: dict[bytes, int] = {}

        def register(mask: np.ndarray) -> int:
            key = mask.tobytes()
            got = ids.get(key)
            if got is None:
                got = ids[key] = len(masks)
                masks.append(mask)
            return got

        zero = np.zeros(n, dtype=bool)
        zero[0] = True
        register(zero)
        join_rows: list[np.ndarray] = []
        s = 0
        while s < len(masks):
            mask = masks[s]
            row = np.empty(n, dtype=np.int64)
            for x in range(n):
                joined = mask.copy()
                y = x
                while y:  # <S, x> = union of the cosets S + k*x
                    joined |= mask[sub_idx[:, y]]
                    y = int(add_idx[y, x])
                row[x] = register(joined)
            join_rows.append(row)
            s += 1
        self.join = np.stack(join_rows)
        self.size = np.array([int(m.sum()) for m in masks], dtype=np.int64)

    def scale_idx(self, c: int) -> np.ndarray:
        """Index map y -> c*y."""
        if not len(self._moduli):
            return np.zeros(1, dtype=np.int64)
        return ((self._coords * c) % self._moduli) @ self._strides


@lru_cache(maxsize=128)
def _span_tables(group: FinAbGroup, budget: Budget) -> _SpanTables:
    return _SpanTables(group, budget)


@lru_cache(maxsize=16384)
def _embedded_kernel_surjections(
    Mp: FinAbGroup, M: FinAbGroup, N: FinAbGroup, budget: Budget
) -> int:
    """#{pi: M' ->> M with ker pi isomorphic to N}, for semisimple N with
    |M'| = |N||M|.

    Works prime by prime and never builds an element table of M': a
    candidate map is described by its generator images in the small target,
    and both conditions are span sizes there. With |M'| = |N||M| fixed,
    surjectivity already forces |ker| = |N|; the kernel is then elementary
    iff the p-torsion of M' covers it, i.e. the image of the p-torsion is
    small enough.
    """
    count = 1
    for p in Mp.primes:
        lam = Mp.partition(p)
        M_p = FinAbGroup.from_dict({p: M.partition(p)}) if M.rank(p) else FinAbGroup.trivial()
        a = N.rank(p)
        count *= _local_kernel_surjections(p, lam, M_p, a, budget)
        if count == 0:
            return 0
    return count


def _local_kernel_surjections(
    p: int, lam: tuple[int, ...], M_p: FinAbGroup, a: int, budget: Budget
) -> int:
    r = len(lam)
    n_m = M_p.order
    mid_order = p ** sum(lam)
    if mid_order != p**a * n_m:
        return 0
    tm = _table(M_p)
    spans = _span_tables(M_p, budget)
    choices = [np.flatnonzero(tm.torsion_mask(p ** l)) for l in lam]
    total = prod(len(ch) for ch in choices)
    budget.check_candidates(total, f"extension span search onto {M_p} at p={p}")
    # p-torsion of M' is generated by p**(l-1) times the generators
    scaled_choices = [spans.scale_idx(p ** (l - 1))[ch] for l, ch in zip(lam, choices)]
    tor_order = p**r
    target = p**a
    local = 0
    rows = max(1, _CHUNK_ENTRIES // max(1, 2 * max(1, r)))
    for start in range(0, total, rows):
        stop = min(start + rows, total)
        idx = np.arange(start, stop, dtype=np.int64)
        digits = np.unravel_index(idx, tuple(len(ch) for ch in choices)) if r else ()
        ids = np.zeros(stop - start, dtype=np.int64)
        tor_ids = np.zeros(stop - start, dtype=np.int64)
        for i in range(r):
            ids = spans.join[ids, choices[i][digits[i]]]
            tor_ids = spans.join[tor_ids, scaled_choices[i][digits[i]]]
        surjective = spans.size[ids] == n_m
        elementary = spans.size[tor_ids] * target == tor_order
        local += int((surjective & elementary).sum())
    return local


def extension_pair_count(
    N: FinAbGroup, middle: FinAbGroup, M: FinAbGroup, budget: Budget | None = None
) -> int:
    """Number of pairs (iota: N into M', pi: M' ->> M) with im iota = ker pi.

    For each surjection whose kernel is isomorphic to N, the embeddings
    hitting exactly that kernel are the |Aut(N)| isomorphisms onto it.
    """
    if not N.is_semisimple:
        raise InputError(f"N must be semisimple, got {N}")
    if middle.order != N.order * M.order:
        return 0
    if N.is_trivial:
        # a surjection with zero kernel is an isomorphism
        return aut_count(M) if middle == M else 0
    budget = resolve(budget)
    return aut_count(N) * _embedded_kernel_surjections(middle, M, N, budget)


def extension_pair_count_direct(
    N: FinAbGroup, middle: FinAbGroup, M: FinAbGroup, budget: Budget | None = None
) -> int:
    """Same count as extension_pair_count by the dumbest route: enumerate
    embeddings and surjections separately and join on the image/kernel set.
    Cross-check only; cost grows with |M'|**rank(N)."""
    budget = resolve(budget)
    tn, tmid = _tables_for(N, middle, budget, f"embedding enumeration {N} -> {middle}")
    tmid2, tm = _tables_for(middle, M, budget, f"surjection enumeration {middle} -> {M}")

    choices = _hom_image_choices(tn, tmid)
    total = prod(len(ch) for ch in choices)
    budget.check_candidates(total, f"embedding enumeration {N} -> {middle}")
    n_n, n_mid, n_m = N.order, middle.order, M.order
    images: dict[bytes, int] = {}
    rows = max(1, _CHUNK_ENTRIES // max(1, n_n * max(1, len(tmid.moduli))))
    for start in range(0, total, rows):
        block = _candidate_block(choices, start, min(start + rows, total))
        img = tmid.coords[block]
        if len(tn.moduli) and len(tmid.moduli):
            vals = np.einsum("xi,tic->txc", tn.coords, img) % tmid.moduli
            idx = np.zeros(vals.shape[:2], dtype=np.int64)
            stride = 1
            for c in range(len(tmid.moduli) - 1, -1, -1):
                idx += vals[:, :, c] * stride
                stride *= int(tmid.moduli[c])
        else:
            idx = np.zeros((block.shape[0], n_n), dtype=np.int64)
        hit = np.zeros((idx.shape[0], n_mid), dtype=bool)
        hit[np.arange(idx.shape[0])[:, None], idx] = True
        injective = hit.sum(axis=1) == n_n
        for row in np.packbits(hit[injective], axis=1):
            key = row.tobytes()
            images[key] = images.get(key, 0) + 1

    choices2 = _hom_image_choices(tmid2, tm)
    total2 = prod(len(ch) for ch in choices2)
    budget.check_candidates(total2, f"surjection enumeration {middle} -> {M}")
    out = 0
    for kernel in _iter_hom_chunks(tmid2, tm, choices2, total2):
        sizes = kernel.sum(axis=1)
        surj = sizes * n_m == n_mid
        for row in np.packbits(kernel[surj], axis=1):
            out += images.get(row.tobytes(), 0)
    return out


def extension_class_count(
    N: FinAbGroup, M: FinAbGroup, middle: FinAbGroup, budget: Budget | None = None
) -> Fraction:
    """Number of isomorphism classes of exact sequences 0->N->M'->M->0 with
    the given middle: pair count times |Hom(M, N)| / |Aut(M')|.

    The automorphisms of a fixed sequence are the unipotent maps
    id + iota f pi for f in Hom(M, N), and they act freely, so the orbit
    count under Aut(M') is as stated. Must come out a nonnegative integer;
    anything else is an internal inconsistency.
    """
    pairs = extension_pair_count(N, middle, M, budget)
    entry = Fraction(pairs * hom_count(M, N), aut_count(middle))
    if entry.denominator != 1:
        raise ConsistencyError(
            f"extension class count for 0 -> {N} -> {middle} -> {M} -> 0 "
            f"is not an integer: {entry}"
        )
    return entry


def extension_table(
    N: FinAbGroup, M: FinAbGroup, budget: Budget | None = None
) -> ExtensionTable:
    """Class counts of exact sequences 0 -> N -> M' -> M -> 0 over all middles."""
    if not N.is_semisimple:
        raise InputError(f"N must be semisimple, got {N}")
    order = N.order * M.order
    primes = sorted(set(N.primes) | set(M.primes))
    entries: dict[FinAbGroup, Fraction] = {}
    for middle in enumerate_groups(primes, order):
        if middle.order != order:
            continue
        entry = extension_class_count(N, M, middle, budget)
        if entry:
            entries[middle] = entry
    return ExtensionTable(sub=N, quot=M, entries=entries)


def candidate_middles(N: FinAbGroup, M: FinAbGroup) -> list[FinAbGroup]:
    """All groups of order |N||M| on the combined prime support."""
    order = N.order * M.order
    primes = sorted(set(N.primes) | set(M.primes))
    if not primes:
        return [FinAbGroup.trivial()]
    return [G for G in enumerate_groups(primes, order) if G.order == order]


# --------------------------------------------------------------------------
# Measures
# --------------------------------------------------------------------------


class Measure:
    """Finitely supported measure on isomorphism classes: group -> mass >= 0.

    Total mass is whatever it is; nothing here assumes probability.
    """

    def __init__(self, masses: Mapping[FinAbGroup, Fraction | int]):
        store: dict[FinAbGroup, Fraction] = {}
        for g, v in masses.items():
            v = Fraction(v)
            if v < 0:
                raise InputError(f"negative mass {v} at {g}")
            if v:
                store[g] = v
        self._masses = store

    def mass(self, g: FinAbGroup) -> Fraction:
        return self._masses.get(g, Fraction(0))

    def support(self) -> list[FinAbGroup]:
        return sorted(self._masses, key=FinAbGroup.sort_key)

    def items(self) -> list[tuple[FinAbGroup, Fraction]]:
        return sorted(self._masses.items(), key=lambda kv: kv[0].sort_key())

    @property
    def total_mass(self) -> Fraction:
        return sum(self._masses.values(), Fraction(0))

    def __eq__(self, other) -> bool:
        return isinstance(other, Measure) and self._masses == other._masses

    def __len__(self) -> int:
        return len(self._masses)

    def to_json_obj(self) -> dict:
        from .rationals import format_rational

        return {
            "masses": [
                {"group": g.to_json_obj(), "value": format_rational(v)}
                for g, v in self.items()
            ]
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "Measure":
        from .rationals import parse_rational

        if not isinstance(obj, Mapping) or "masses" not in obj:
            raise InputError(f"measure JSON needs a 'masses' list, got {obj!r}")
        masses: dict[FinAbGroup, Fraction] = {}
        for rec in obj["masses"]:
            g = FinAbGroup.from_json_obj(rec["group"])
            if g in masses:
                raise InputError(f"duplicate group {g} in measure JSON")
            masses[g] = parse_rational(rec["value"])
        return cls(masses)


# --------------------------------------------------------------------------
# Matrix oracle for the abelian surjection formula
# --------------------------------------------------------------------------


def count_surjective_matrices(h: int, e: int, k: int, budget: Budget | None = None) -> int:
    """Brute-force count of surjective k x e matrices over the h-element field.

    Walks all tuples of linearly independent rows level by level, keeping
    the span of each prefix as a bitmask; the final count sums, over every
    independent (k-1)-prefix, the vectors outside its span. Independent of
    the closed-form product it is used to check.
    """
    if h < 2 or not is_prime(h):
        raise InputError(f"matrix oracle needs a prime field size, got h={h}")
    if e < 0 or k < 0:
        raise InputError("e and k must be nonnegative")
    if k == 0:
        return 1
    if e == 0:
        return 0
    budget = resolve(budget)
    n = h**e
    budget.check_order(n, f"matrix oracle over F_{h}^{e}")
    budget.check_candidates(n * n, f"matrix oracle difference table over F_{h}^{e}")

    digits = np.array(np.unravel_index(np.arange(n), (h,) * e), dtype=np.int64).T
    place = h ** np.arange(e - 1, -1, -1, dtype=np.int64)
    sub = ((digits[:, None, :] - digits[None, :, :]) % h) @ place  # sub[x, w] = x - w
    mul = ((np.arange(h)[:, None, None] * digits[None, :, :]) % h) @ place  # mul[c, v]

    spans = np.zeros((1, n), dtype=bool)
    spans[0, 0] = True
    for level in range(k):
        valid = ~spans
        if level == k - 1:
            return int(valid.sum())
        parent, vec = np.nonzero(valid)
        budget.check_candidates(len(parent), f"matrix oracle level {level + 1}")
        children = np.zeros((len(parent), n), dtype=bool)
        for c in range(h):
            shift = sub[:, mul[c, vec]].T  # (children, n): x - c*v
            children |= spans[parent[:, None], shift]
        spans = children
    raise AssertionError("unreachable")

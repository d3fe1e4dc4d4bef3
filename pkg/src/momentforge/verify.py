"""The oracle suite: every closed form checked against its independent
brute-force counterpart, plus the bracketing property tests.

Each check returns (passed, detail); run_all collects them in order and
is what the CLI `verify` command executes. Randomized checks take an
explicit seed and are fully deterministic given it.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .budget import Budget
from .errors import MomentforgeError
from .finab import (
    FinAbGroup,
    Measure,
    aut_bruteforce,
    aut_count,
    candidate_middles,
    count_surjective_matrices,
    enumerate_groups,
    extension_class_count,
    hom_count,
    hom_count_bruteforce,
    kernel_pair_count,
    sur_bruteforce,
    sur_count,
)
from .inversion import MomentTable, invert_zero, multi_invert_zero, partial_sum
from .localize import reconstruct_probability
from .nonab_oracle import hom_a5_count, sur_a5_bruteforce
from .qseries import SimpleType, inversion_coefficient, q_binomial, q_pochhammer
from .sampler import empirical_moments
from .surjcount import TypeBasis, sur_product, sur_single


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def check_abelian_matrix_oracle() -> tuple[bool, str]:
    checked = 0
    for h in (2, 3):
        t = SimpleType.abelian(h)
        for e in range(5):
            for k in range(5):
                if count_surjective_matrices(h, e, k) != sur_single(t, e, k):
                    return False, f"mismatch at h={h}, e={e}, k={k}"
                checked += 1
    return True, f"{checked} matrix counts match the closed form"


def check_product_splitting(budget: Budget | None = None) -> tuple[bool, str]:
    basis = TypeBasis.abelian_primes([2, 3])
    checked = 0
    for e1 in range(3):
        for e2 in range(3):
            A = FinAbGroup.from_dict({2: [1] * e1, 3: [1] * e2})
            for k1 in range(3):
                for k2 in range(3):
                    B = FinAbGroup.from_dict({2: [1] * k1, 3: [1] * k2})
                    lhs = sur_product(basis, (e1, e2), (k1, k2))
                    rhs = sur_bruteforce(A, B, budget)
                    if lhs != rhs:
                        return False, f"mismatch at e=({e1},{e2}), k=({k1},{k2})"
                    checked += 1
    return True, f"{checked} product counts match brute force"


def check_nonabelian_a5() -> tuple[bool, str]:
    if hom_a5_count() != 121:
        return False, f"|Hom(A5, A5)| = {hom_a5_count()}, expected 121"
    t = SimpleType.nonabelian(120)
    for e in range(3):
        for k in range(3):
            got = sur_a5_bruteforce(e, k)
            want = sur_single(t, e, k)
            if got != want:
                return False, f"mismatch at e={e}, k={k}: oracle {got}, formula {want}"
    return True, "A5 enumeration matches the falling-factorial formula up to e=k=2"


def check_q_identities() -> tuple[bool, str]:
    checked = 0
    for h in (2, 3, 5):
        for e in range(1, 9):
            for k in range(1, e + 1):
                lhs = q_binomial(e, k, h)
                rhs = h**k * q_binomial(e - 1, k, h) + q_binomial(e - 1, k - 1, h)
                if lhs != rhs:
                    return False, f"Pascal recurrence fails at e={e}, k={k}, h={h}"
                checked += 1
            for r in range(9):
                lhs = sum(
                    (-1) ** k * q_binomial(e, k, h) * h ** (k * (k - 1) // 2)
                    for k in range(r + 1)
                )
                rhs = (-1) ** r * q_binomial(e - 1, r, h) * h ** ((r + 1) * r // 2)
                if lhs != rhs:
                    return False, f"telescoping identity fails at e={e}, r={r}, h={h}"
                checked += 1
    return True, f"{checked} q-identities hold exactly"


def random_mass_function(
    rng: random.Random, support_bound: int, max_support: int
) -> dict[int, Fraction]:
    size = rng.randint(0, max_support)
    exps = rng.sample(range(support_bound + 1), min(size, support_bound + 1))
    return {
        e: Fraction(rng.randint(1, 12), rng.randint(1, 12)) for e in sorted(exps)
    }


def one_type_moments(t: SimpleType, masses: dict[int, Fraction], bound: int) -> MomentTable:
    values = [
        sum((m * sur_single(t, e, k) for e, m in masses.items()), Fraction(0))
        for k in range(bound + 1)
    ]
    return MomentTable.one_type(t, values)


def check_bracketing_soundness(seed: int, cases: int = 200) -> tuple[bool, str]:
    rng = random.Random(seed)
    types = [
        SimpleType.abelian(2),
        SimpleType.abelian(3),
        SimpleType.abelian(4),
        SimpleType.abelian(5),
        SimpleType.nonabelian(120),
        SimpleType.nonabelian(6),
    ]
    for case in range(cases):
        t = rng.choice(types)
        masses = random_mass_function(rng, 8, 6)
        m0 = masses.get(0, Fraction(0))
        bound = 9
        moments = one_type_moments(t, masses, bound)
        for r in range(bound + 1):
            s = partial_sum(moments, t, r)
            if r % 2 == 0 and s < m0:
                return False, f"case {case}: even sum r={r} below the mass at 0"
            if r % 2 == 1 and s > m0:
                return False, f"case {case}: odd sum r={r} above the mass at 0"
        for r_max in (1, 4, bound):
            br = invert_zero(moments, t, r_max)
            if not br.contains(m0):
                return False, f"case {case}: bracket at r_max={r_max} misses the mass"
        point = invert_zero(moments, t, bound)
        if point.lower != m0 or point.upper != m0:
            return False, f"case {case}: finite support did not collapse to a point"
    # two-type version over a product basis
    basis = TypeBasis([SimpleType.abelian(2), SimpleType.abelian(3)])
    for case in range(cases):
        pts = {}
        for e1 in range(3):
            for e2 in range(3):
                if rng.random() < 0.4:
                    pts[(e1, e2)] = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        m0 = pts.get((0, 0), Fraction(0))
        bound = (3, 3)
        values = {
            (k1, k2): sum(
                (m * sur_product(basis, e, (k1, k2)) for e, m in pts.items()),
                Fraction(0),
            )
            for k1 in range(4)
            for k2 in range(4)
        }
        table = MomentTable(basis, bound, values)
        br = multi_invert_zero(table, (3, 3))
        if not br.contains(m0):
            return False, f"two-type case {case}: bracket misses the mass"
        if br.lower != m0 or br.upper != m0:
            return False, f"two-type case {case}: no point collapse at full depth"
    return True, f"{2 * cases} randomized mass functions bracketed soundly"


def euler_reference(p: int, factors: int = 30) -> Fraction:
    out = Fraction(1)
    for k in range(1, factors + 1):
        out *= 1 - Fraction(1, p**k)
    return out


def check_euler_constant() -> tuple[bool, str]:
    t = SimpleType.abelian(2)
    moments = MomentTable.one_type(t, [1] * 13)
    br = invert_zero(moments, t, 12)
    ref = euler_reference(2)
    tol = Fraction(1, 10**9)
    if br.width >= Fraction(1, 10**6):
        return False, f"bracket width {float(br.width)} is not below 1e-6"
    if not (br.lower - tol <= ref <= br.upper + tol):
        return False, "bracket does not contain the truncated product reference"
    if abs(ref - Fraction("0.2887880951")) > tol:
        return False, "truncated product disagrees with the quoted constant"
    return True, f"bracket [{float(br.lower):.12f}, {float(br.upper):.12f}] hits the constant"


def check_extension_sum_identity(
    order_bound: int = 72, budget: Budget | None = None
) -> tuple[bool, str]:
    """kernel_pair_count(X, M, N) must equal
    sum_{M'} classCount(N, M, M') * Sur(X, M') / |Hom(M, N)| exactly.

    Middles whose order does not divide |X| admit no surjection from X, so
    their terms vanish and their class counts are never needed.
    """
    xs = [g for g in enumerate_groups({2, 3}, order_bound) if order_bound % g.order == 0]
    ms = enumerate_groups({2, 3}, order_bound)
    ns = [g for g in enumerate_groups({2, 3}, order_bound) if g.is_semisimple]
    checked = 0
    for M in ms:
        for N in ns:
            if N.order * M.order > order_bound:
                continue
            middles = candidate_middles(N, M)
            denom = hom_count(M, N)
            classes: dict[FinAbGroup, Fraction] = {}
            for X in xs:
                lhs = kernel_pair_count(X, M, N, budget)
                rhs = Fraction(0)
                for mid in middles:
                    if X.order % mid.order:
                        continue
                    cc = classes.get(mid)
                    if cc is None:
                        cc = classes[mid] = extension_class_count(N, M, mid, budget)
                    if cc:
                        rhs += cc * sur_bruteforce(X, mid, budget)
                rhs /= denom
                if rhs != lhs:
                    return False, f"mismatch at X={X}, M={M}, N={N}: {lhs} != {rhs}"
                checked += 1
    return True, f"{checked} extension-sum identities hold exactly"


def synthetic_measure(rng: random.Random, order_bound: int, size: int) -> Measure:
    """Measure on `size` random groups of order dividing order_bound, with
    random rational masses."""
    pool = [g for g in enumerate_groups({2, 3}, order_bound) if order_bound % g.order == 0]
    chosen = rng.sample(pool, min(size, len(pool)))
    return Measure({g: Fraction(rng.randint(1, 9), rng.randint(1, 9)) for g in chosen})


def check_end_to_end(
    seed: int,
    support_order: int = 72,
    target_order: int = 24,
    support_size: int = 12,
    budget: Budget | None = None,
) -> tuple[bool, str]:
    """Exact moments of a synthetic measure reconstruct every mass as a
    width-zero bracket once the truncation clears the support."""
    rng = random.Random(seed)
    mu = synthetic_measure(rng, support_order, support_size)
    basis = TypeBasis.abelian_primes([2, 3])
    r_max = (
        max(g.rank(2) for g in mu.support()) + 1,
        max(g.rank(3) for g in mu.support()) + 1,
    )
    table_bound = target_order * 2 ** r_max[0] * 3 ** r_max[1]
    table = empirical_moments(mu, enumerate_groups({2, 3}, table_bound), budget)
    checked = 0
    for M in enumerate_groups({2, 3}, target_order):
        br = reconstruct_probability(table, M, basis, r_max, budget)
        truth = mu.mass(M)
        if br.lower != truth or br.upper != truth:
            return False, f"reconstruction at {M}: bracket {br}, true mass {truth}"
        checked += 1
    return True, f"{checked} masses reconstructed exactly (support {len(mu)} groups)"


def check_hom_aut_agreement(budget: Budget | None = None) -> tuple[bool, str]:
    """Closed-form hom/aut counts vs full endomorphism enumeration.

    Automorphism enumeration is skipped where the candidate count exceeds
    the budget; the hom-count scan covers the whole range.
    """
    from .errors import BudgetExceededError

    checked = skipped = 0
    groups = enumerate_groups({2}, 64) + enumerate_groups({3}, 81)
    for g in groups:
        if hom_count_bruteforce(g, g, budget) != hom_count(g, g):
            return False, f"hom count mismatch at {g}"
        try:
            if aut_bruteforce(g, budget) != aut_count(g):
                return False, f"aut count mismatch at {g}"
            checked += 1
        except BudgetExceededError:
            skipped += 1
    return True, f"hom/aut agree on {checked} groups ({skipped} aut runs over budget)"


def check_sur_smart_vs_bruteforce(budget: Budget | None = None) -> tuple[bool, str]:
    groups = enumerate_groups({2, 3}, 24)
    checked = 0
    for A in groups:
        for B in groups:
            if sur_count(A, B, budget) != sur_bruteforce(A, B, budget):
                return False, f"smart/brute surjection mismatch at {A} -> {B}"
            checked += 1
    return True, f"{checked} smart surjection counts match brute force"


def run_all(seed: int, quick: bool = False, budget: Budget | None = None) -> list[CheckResult]:
    ext_bound = 24 if quick else 72
    e2e_support = 12 if quick else 72
    e2e_target = 8 if quick else 24
    cases = 40 if quick else 200
    checks: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
        ("abelian formula vs matrix oracle", check_abelian_matrix_oracle),
        ("product splitting vs brute force", lambda: check_product_splitting(budget)),
        ("nonabelian formula vs A5 oracle", check_nonabelian_a5),
        ("q-binomial identities", check_q_identities),
        ("bracketing soundness", lambda: check_bracketing_soundness(seed, cases)),
        ("Euler constant bracket", check_euler_constant),
        ("hom/aut enumeration agreement", lambda: check_hom_aut_agreement(budget)),
        ("smart surjection counts", lambda: check_sur_smart_vs_bruteforce(budget)),
        (
            "extension-sum identity",
            lambda: check_extension_sum_identity(ext_bound, budget),
        ),
        (
            "end-to-end exact reconstruction",
            lambda: check_end_to_end(
                seed, e2e_support, e2e_target, support_size=5 if quick else 12, budget=budget
            ),
        ),
    ]
    results = []
    for name, fn in checks:
        begin = time.perf_counter()
        try:
            passed, detail = fn()
        except MomentforgeError as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, passed, detail, time.perf_counter() - begin))
    return results

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from momentforge.errors import InputError
from momentforge.finab import FinAbGroup, Measure, enumerate_groups
from momentforge.inversion import Bracket
from momentforge.sampler import (
    SamplerConfig,
    cokernel_partition,
    convergence_report,
    empirical_moments,
    reference_mass,
    sample_cokernel,
    sample_measure,
)

Z = FinAbGroup.from_orders
triv = FinAbGroup.trivial()


def quotient_partition_oracle(mat, p, cap):
    """Partition of (Z/p**cap)**rows / colspan by explicit closure, torsion
    counting, and conjugation. Independent of the Smith reduction."""
    q = p**cap
    n = mat.shape[0]
    if n == 0:
        return ()
    cols = [tuple(int(x) % q for x in mat[:, j]) for j in range(mat.shape[1])]
    span = {(0,) * n}
    frontier = [(0,) * n]
    while frontier:
        new = []
        for v in frontier:
            for c in cols:
                w = tuple((a + b) % q for a, b in zip(v, c))
                if w not in span:
                    span.add(w)
                    new.append(w)
        frontier = new
    counts = []
    for j in range(cap + 1):
        pj = p**j
        hits = sum(
            1
            for x in itertools.product(range(q), repeat=n)
            if tuple((pj * a) % q for a in x) in span
        )
        counts.append(hits // len(span))
    parts_ge = [round(math.log(counts[j] / counts[j - 1], p)) for j in range(1, cap + 1)]
    out = []
    for i in range(parts_ge[0]):
        out.append(sum(1 for r in parts_ge if r > i))
    return tuple(sorted(out, reverse=True))


def test_smith_matches_quotient_oracle():
    rng = np.random.default_rng(4242)
    for _ in range(250):
        p = int(rng.choice([2, 3, 5]))
        cap = int(rng.integers(1, 3))
        n = int(rng.integers(0, 3))
        m = n + int(rng.integers(0, 2))
        mat = rng.integers(0, p**cap, size=(n, m))
        assert cokernel_partition(mat, p, cap) == quotient_partition_oracle(mat, p, cap)


def test_known_cokernels():
    assert cokernel_partition(np.array([[2]]), 2, 3) == (1,)
    assert cokernel_partition(np.array([[0]]), 2, 3) == (3,)
    assert cokernel_partition(np.array([[1]]), 2, 3) == ()
    assert cokernel_partition(np.diag([1, 2, 4]), 2, 3) == (2, 1)


def test_trivial_matrix_sizes():
    assert sample_cokernel(SamplerConfig(p=2, cap=3, n=0, seed=1, count=1)).is_trivial


def test_determinism_and_prefix():
    base = SamplerConfig(p=2, cap=3, n=4, seed=99, count=60)
    longer = SamplerConfig(p=2, cap=3, n=4, seed=99, count=240)
    first = [sample_cokernel(base, i) for i in range(60)]
    assert first == [sample_cokernel(longer, i) for i in range(60)]
    assert sample_measure(longer, 60) == sample_measure(base)
    other = SamplerConfig(p=2, cap=3, n=4, seed=100, count=60)
    assert [sample_cokernel(other, i) for i in range(60)] != first


def test_config_validation():
    with pytest.raises(InputError):
        SamplerConfig(p=4, cap=3, n=2, seed=1, count=1)
    with pytest.raises(InputError):
        SamplerConfig(p=2, cap=0, n=2, seed=1, count=1)
    with pytest.raises(InputError):
        SamplerConfig(p=2, cap=3, n=2, seed=-1, count=1)
    with pytest.raises(InputError):
        SamplerConfig(p=2, cap=40, n=2, seed=1, count=1)  # int64 overflow guard


def test_unit_entry_probability():
    # a 1x1 matrix over Z/8 has unit entry with probability 1/2
    cfg = SamplerConfig(p=2, cap=3, n=1, seed=7, count=4000)
    freq = sample_measure(cfg).mass(triv)
    assert abs(float(freq) - 0.5) < 0.03


def test_trivial_frequency_near_limit():
    # statistical: at n=8, cap=3 the trivial cokernel shows up with the
    # limiting frequency 0.2888 well within a 0.015 band at t=10**4
    cfg = SamplerConfig(p=2, cap=3, n=8, seed=20260810, count=10_000)
    freq = sample_measure(cfg).mass(triv)
    assert abs(float(freq) - 0.2888) < 0.015


class TestEmpiricalMoments:
    def test_point_measure(self):
        mu = Measure({triv: Fraction(1)})
        table = empirical_moments(mu, enumerate_groups([2], 4))
        assert table(triv) == 1
        assert table(Z(2)) == 0 and table(Z(4)) == 0

    def test_half_half(self):
        mu = Measure({triv: Fraction(1, 2), Z(2): Fraction(1, 2)})
        table = empirical_moments(mu, enumerate_groups([2, 3], 6))
        assert table(Z(2)) == Fraction(1, 2)
        assert table(Z(3)) == 0

    def test_needs_trivial_target(self):
        mu = Measure({Z(2): Fraction(1)})
        with pytest.raises(InputError):
            empirical_moments(mu, [Z(2)])


class TestConvergenceReport:
    def test_exact_consistency_on_prefixes(self):
        # reconstructed bracket from exact empirical moments must contain the
        # exact empirical frequency at every sample count
        cfg = SamplerConfig(p=2, cap=3, n=4, seed=11, count=400)
        targets = [triv, Z(2), Z(4)]
        records = convergence_report(cfg, [100, 400], targets, r_max=6)
        assert len(records) == 6
        for rec in records:
            freq = Fraction(rec["frequency"])
            br = Bracket.from_json_obj(rec["bracket"])
            assert br.contains(freq), rec
            assert {"t", "group", "frequency", "bracket", "reference"} <= set(rec)

    def test_exponent_cap_enforced(self):
        cfg = SamplerConfig(p=2, cap=3, n=4, seed=11, count=10)
        with pytest.raises(InputError, match="exponent"):
            convergence_report(cfg, [10], [Z(8)], r_max=2)

    def test_counts_must_increase(self):
        cfg = SamplerConfig(p=2, cap=3, n=4, seed=11, count=10)
        with pytest.raises(InputError):
            convergence_report(cfg, [10, 10], [triv], r_max=2)


def test_reference_mass():
    want = Fraction(1)
    for k in range(1, 31):
        want *= 1 - Fraction(1, 2**k)
    assert reference_mass(2, 0, triv) == want
    assert reference_mass(2, 0, Z(4)) == want / 2
    shifted = Fraction(1)
    for k in range(2, 32):
        shifted *= 1 - Fraction(1, 2**k)
    assert reference_mass(2, 1, Z(2)) == shifted / 2

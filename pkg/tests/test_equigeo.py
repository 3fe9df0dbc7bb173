"""Equigeodesic tests: both decision routes, structure predicates, canonical form."""

import numpy as np
import pytest

from conftest import random_tangent
from flagdesic import (
    CMatrix,
    FlagPartition,
    GaussianRational,
    InvariantMetric,
    Mode,
    NotEquigeodesic,
    TangentVector,
    canonicalize,
    conjugation_invariants,
    equigeodesic_certificate,
    is_equigeodesic,
    is_essentially_block_diagonal,
    is_essentially_diagonal,
    is_geodesic_vector,
    random_block_unitary,
    random_equigeodesic,
    random_essentially_diagonal,
    random_metric,
    skew_spectrum,
    weyl_vector,
)
from flagdesic.documents import fixture_vector
from flagdesic.flag import build_roots

GR = GaussianRational


# ---------------------------------------------------------------------------
# is_geodesic_vector
# ---------------------------------------------------------------------------


def test_weyl_vectors_are_geodesic_for_any_metric():
    p = FlagPartition((2, 1, 1))
    _, m_pos = build_roots(p)
    for k, root in enumerate(m_pos):
        g = random_metric(p, 50 + k)
        for kind in ("A", "S"):
            ok, residual = is_geodesic_vector(weyl_vector(p, root, kind), g)
            assert ok and residual <= 1e-12


def test_f3_chain_geodesic_only_for_balanced_metric():
    p = FlagPartition((1, 1, 1))
    x = TangentVector.from_blocks(p, {(1, 2): [[1.0]], (2, 3): [[1.0]]})
    ok, _ = is_geodesic_vector(x, InvariantMetric.normal(p))
    assert ok
    g = InvariantMetric.from_pairs(p, {(1, 2): 1.0, (1, 3): 1.0, (2, 3): 2.0})
    ok, residual = is_geodesic_vector(x, g)
    assert not ok
    # the bracket entry lands at position (1,3): hand value sqrt(2)/(4*2)
    assert residual == pytest.approx(np.sqrt(2) / 8.0)


def test_normal_metric_geodesic_for_everything():
    rng = np.random.default_rng(21)
    for parts in [(1, 1, 1), (2, 2, 1), (3, 1)]:
        p = FlagPartition(parts)
        g = InvariantMetric.normal(p)
        for _ in range(20):
            ok, residual = is_geodesic_vector(random_tangent(p, rng), g)
            assert ok and residual <= 1e-12


def test_geodesic_rejects_probe_and_mismatch():
    from flagdesic import basis_metric

    p = FlagPartition((1, 1, 1))
    rng = np.random.default_rng(22)
    x = random_tangent(p, rng)
    with pytest.raises(ValueError):
        is_geodesic_vector(x, basis_metric(p, 1, 2))
    with pytest.raises(ValueError):
        is_geodesic_vector(x, InvariantMetric.normal(FlagPartition((2, 1))))


# ---------------------------------------------------------------------------
# is_equigeodesic and the certificate
# ---------------------------------------------------------------------------


def test_f9_fixture_is_equigeodesic():
    x = fixture_vector("f9-333")
    block = is_equigeodesic(x)
    cert = equigeodesic_certificate(x)
    assert block.is_equigeodesic and block.worst_residual == 0.0
    assert cert.is_equigeodesic and cert.worst_residual <= 1e-12


def test_f3_chain_is_not_equigeodesic():
    p = FlagPartition((1, 1, 1))
    x = TangentVector.from_blocks(p, {(1, 2): [[1.0]], (2, 3): [[1.0]]})
    v = is_equigeodesic(x)
    assert not v.is_equigeodesic
    assert v.violating_triple == (1, 2, 3)
    assert v.worst_residual > 1e-8
    c = equigeodesic_certificate(x)
    assert not c.is_equigeodesic
    assert c.violating_triple == (1, 2, 3)


def test_two_block_partition_vacuously_equigeodesic():
    rng = np.random.default_rng(23)
    p = FlagPartition((3, 2))
    for _ in range(5):
        x = random_tangent(p, rng)
        assert is_equigeodesic(x).is_equigeodesic
        assert equigeodesic_certificate(x).is_equigeodesic


def test_zero_vector_is_equigeodesic():
    p = FlagPartition((1, 1, 1))
    x = TangentVector(p, CMatrix.zeros(3, 3))
    assert is_equigeodesic(x).is_equigeodesic
    assert equigeodesic_certificate(x).is_equigeodesic


def test_equivalence_of_routes_small_sample():
    rng = np.random.default_rng(24)
    for parts in [(1, 1, 1), (2, 1, 1), (2, 2, 1)]:
        p = FlagPartition(parts)
        for k in range(25):
            x = random_equigeodesic(p, 10_000 + k) if k % 2 else random_tangent(p, rng)
            assert (
                is_equigeodesic(x).is_equigeodesic
                == equigeodesic_certificate(x).is_equigeodesic
            )


def test_exact_mode_verdicts():
    p = FlagPartition((1, 1, 1))
    x = TangentVector.from_blocks(
        p, {(1, 2): [[GR(1, 1)]], (2, 3): [[GR(2)]]}, Mode.EXACT
    )
    assert not is_equigeodesic(x).is_equigeodesic
    assert not equigeodesic_certificate(x).is_equigeodesic
    y = TangentVector.from_blocks(p, {(1, 2): [[GR(1, 1)]]}, Mode.EXACT)
    v = is_equigeodesic(y)
    assert v.is_equigeodesic and v.worst_residual == 0.0
    assert equigeodesic_certificate(y).is_equigeodesic


def test_exact_equigeodesic_by_orthogonality():
    # products vanish through orthogonal columns, not through sparsity:
    # a12 = (1,1)*, a13 = (1,-1)*, a23 = 0 on partition (2,1,1)
    p = FlagPartition((2, 1, 1))
    x = TangentVector.from_blocks(
        p,
        {(1, 2): [[GR(1)], [GR(1)]], (1, 3): [[GR(1)], [GR(-1)]]},
        Mode.EXACT,
    )
    assert not is_essentially_diagonal(x.matrix)
    assert is_equigeodesic(x).is_equigeodesic
    assert equigeodesic_certificate(x).is_equigeodesic
    form = canonicalize(x.to_float())
    values = sorted(a for _, _, a in form.pairs)
    assert values == pytest.approx([np.sqrt(2), np.sqrt(2)])


def test_verdict_scale_invariance():
    p = FlagPartition((1, 1, 1))
    x = TangentVector.from_blocks(p, {(1, 2): [[1e-6]], (2, 3): [[1e-6]]})
    assert not is_equigeodesic(x).is_equigeodesic
    y = TangentVector.from_blocks(p, {(1, 2): [[1e6]]})
    assert is_equigeodesic(y).is_equigeodesic


# ---------------------------------------------------------------------------
# structure predicates
# ---------------------------------------------------------------------------


def test_essentially_diagonal_basic():
    assert is_essentially_diagonal(CMatrix.from_complex(np.diag([1.0, 2.0, 0.0])))
    assert is_essentially_diagonal(CMatrix.from_complex([[0, 2.5], [-2.5, 0]]))
    assert not is_essentially_diagonal(CMatrix.from_complex(np.ones((2, 2))))
    assert is_essentially_diagonal(CMatrix.zeros(3, 3))


def test_essentially_diagonal_exact():
    m = CMatrix.from_exact([[0, 1], [1, 0]])
    assert is_essentially_diagonal(m)
    assert not is_essentially_diagonal(CMatrix.from_exact([[1, 1], [0, 1]]))


def test_essentially_block_diagonal():
    p = FlagPartition((3, 1, 1))
    single = TangentVector.from_blocks(p, {(1, 2): [[1.0], [2.0], [0.0]]})
    assert is_essentially_block_diagonal(single)
    two_in_row = fixture_vector("fn-211")
    assert not is_essentially_block_diagonal(two_in_row)


def test_block_diagonal_implies_equigeodesic():
    rng = np.random.default_rng(25)
    p = FlagPartition((2, 2, 1))
    for pair in p.positive_pairs():
        ri = p.parts[pair[0] - 1]
        cj = p.parts[pair[1] - 1]
        blk = rng.normal(size=(ri, cj)) + 1j * rng.normal(size=(ri, cj))
        x = TangentVector.from_blocks(p, {pair: blk})
        assert is_essentially_block_diagonal(x)
        assert is_equigeodesic(x).is_equigeodesic
        assert equigeodesic_certificate(x).is_equigeodesic


def test_full_flag_equigeodesic_iff_essentially_diagonal():
    p = FlagPartition((1, 1, 1, 1))
    for k in range(30):
        x = random_equigeodesic(p, 300 + k)
        assert is_essentially_diagonal(x.matrix)
    rng = np.random.default_rng(26)
    for _ in range(30):
        x = random_tangent(p, rng)
        assert is_essentially_diagonal(x.matrix) == is_equigeodesic(x).is_equigeodesic


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------


def test_canonicalize_orthogonal_columns_example():
    # two orthogonal column blocks, zero (2,3) block: already essentially diagonal
    x = fixture_vector("fn-211")
    form = canonicalize(x)
    values = sorted(a for _, _, a in form.pairs)
    assert values == pytest.approx([1.0, 2.0])
    assert is_essentially_diagonal(form.J)
    assert form.residual <= 1e-9 * x.fro()


def test_canonicalize_already_diagonal_input():
    p = FlagPartition((2, 2))
    x = TangentVector.from_blocks(p, {(1, 2): [[3.0, 0.0], [0.0, 1.0]]})
    form = canonicalize(x)
    assert form.J.allclose(x.matrix, tol=1e-12)
    assert np.allclose(np.abs(form.U.data), np.eye(4), atol=1e-12)
    assert form.pairs == ((1, 3, 3.0), (2, 4, 1.0))


def test_canonicalize_recovers_sigmas_after_conjugation():
    x = fixture_vector("f9-333")
    for seed in range(5):
        u = random_block_unitary(x.partition, seed)
        y = x.conjugated_by(u)
        form = canonicalize(y)
        recovered = sorted(a for _, _, a in form.pairs)
        assert recovered == pytest.approx([1.0, 2.0, 3.0, 4.0], abs=1e-9)
        residual_check = (form.U.H @ y.matrix @ form.U - form.J).fro()
        assert residual_check <= 1e-9 * y.fro()
        # pairs sorted by descending value
        assert [a for _, _, a in form.pairs] == sorted(
            (a for _, _, a in form.pairs), reverse=True
        )
        # mirrored entries and positivity
        for r, c, a in form.pairs:
            assert r < c and a > 0
            assert form.J.entry(r - 1, c - 1) == pytest.approx(a)
            assert form.J.entry(c - 1, r - 1) == pytest.approx(-a)


def test_canonicalize_rejects_non_equigeodesic():
    p = FlagPartition((1, 1, 1))
    x = TangentVector.from_blocks(p, {(1, 2): [[1.0]], (2, 3): [[1.0]]})
    with pytest.raises(NotEquigeodesic) as err:
        canonicalize(x)
    assert err.value.violating_triple == (1, 2, 3)


def test_canonicalize_rejects_exact_mode():
    p = FlagPartition((1, 1))
    x = TangentVector.from_blocks(p, {(1, 2): [[GR(1)]]}, Mode.EXACT)
    with pytest.raises(ValueError, match="Float"):
        canonicalize(x)


def test_canonical_values_match_spectrum():
    for seed in range(10):
        p = FlagPartition((2, 2, 1))
        x = random_equigeodesic(p, 700 + seed)
        form = canonicalize(x)
        values = [a for _, _, a in form.pairs]
        padded = sorted(values + [0.0] * (p.total - 2 * len(values)) + [-a for a in values], reverse=True)
        spectrum = skew_spectrum(x.matrix)
        assert np.allclose(padded, spectrum, atol=1e-9)


def test_canonicalize_repeated_singular_values():
    # degenerate sigmas within one block
    p = FlagPartition((2, 2, 2))
    x = TangentVector.from_blocks(p, {(1, 2): [[2.0, 0.0], [0.0, 2.0]]})
    form = canonicalize(x)
    assert sorted(a for _, _, a in form.pairs) == pytest.approx([2.0, 2.0])
    spectrum = skew_spectrum(x.matrix)
    assert spectrum == pytest.approx([2.0, 2.0, 0.0, 0.0, -2.0, -2.0])


def test_canonicalize_saturated_rank_budget():
    # block 2 of partition (2,2,2) receives rank 1 from each side, filling n_2
    p = FlagPartition((2, 2, 2))
    x = TangentVector.from_blocks(
        p,
        {
            (1, 2): [[1.5, 0.0], [0.0, 0.0]],
            (2, 3): [[0.0, 0.0], [0.0, 2.5]],
        },
    )
    assert is_equigeodesic(x).is_equigeodesic
    form = canonicalize(x)
    assert sorted(a for _, _, a in form.pairs) == pytest.approx([1.5, 2.5])
    u = random_block_unitary(p, 9)
    form2 = canonicalize(x.conjugated_by(u))
    assert sorted(a for _, _, a in form2.pairs) == pytest.approx([1.5, 2.5])


def test_canonicalize_mixed_partition_samples():
    for seed in range(8):
        p = FlagPartition((3, 2, 1))
        x = random_equigeodesic(p, 1_300 + seed)
        form = canonicalize(x)
        assert form.residual <= 1e-9 * max(x.fro(), 1.0)
        values = [a for _, _, a in form.pairs]
        padded = sorted(values + [-a for a in values] + [0.0] * (6 - 2 * len(values)), reverse=True)
        assert np.allclose(padded, skew_spectrum(x.matrix), atol=1e-9)


def test_canonicalize_zero_vector():
    p = FlagPartition((2, 1))
    x = TangentVector(p, CMatrix.zeros(3, 3))
    form = canonicalize(x)
    assert form.pairs == ()
    assert form.J.is_zero()
    assert np.allclose(form.U.data, np.eye(3))


# ---------------------------------------------------------------------------
# conjugation invariants
# ---------------------------------------------------------------------------


def test_invariants_of_column_example():
    x = fixture_vector("fn-211")
    inv = conjugation_invariants(x)
    assert inv.ranks == {(1, 2): 1, (1, 3): 1, (2, 3): 0}
    assert inv.singular_values[(1, 2)] == pytest.approx((1.0,))
    assert inv.singular_values[(1, 3)] == pytest.approx((2.0,))
    assert inv.singular_values[(2, 3)] == ()


def test_invariants_stable_under_conjugation():
    p = FlagPartition((2, 2, 1))
    x = random_equigeodesic(p, 31)
    base = conjugation_invariants(x)
    for seed in range(5):
        y = x.conjugated_by(random_block_unitary(p, 400 + seed))
        other = conjugation_invariants(y)
        assert other.ranks == base.ranks
        for pair in base.singular_values:
            assert np.allclose(
                other.singular_values[pair], base.singular_values[pair], atol=1e-9
            )


def test_rank_inequality_for_equigeodesic_inputs():
    for seed in range(10):
        p = FlagPartition((2, 2, 1))
        x = random_equigeodesic(p, 500 + seed)
        inv = conjugation_invariants(x)
        for i in range(1, p.s + 1):
            total = sum(
                inv.ranks[(min(i, j), max(i, j))]
                for j in range(1, p.s + 1)
                if j != i
            )
            assert total <= p.parts[i - 1]


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


def test_random_equigeodesic_properties():
    for parts in [(1, 1, 1), (2, 1, 1), (3, 3, 3)]:
        p = FlagPartition(parts)
        for seed in range(10):
            x = random_equigeodesic(p, seed)
            assert is_equigeodesic(x).is_equigeodesic
            assert equigeodesic_certificate(x).is_equigeodesic


def test_random_equigeodesic_deterministic():
    p = FlagPartition((2, 2, 1))
    x = random_equigeodesic(p, 77)
    y = random_equigeodesic(p, 77)
    assert np.array_equal(x.matrix.data, y.matrix.data)
    z = random_equigeodesic(p, 78)
    assert not np.array_equal(x.matrix.data, z.matrix.data)


def test_random_equigeodesic_full_flag_round_trip():
    p = FlagPartition((1, 1, 1, 1, 1))
    for seed in range(5):
        x = random_equigeodesic(p, 900 + seed)
        base = random_essentially_diagonal(p, np.random.default_rng(900 + seed))
        form = canonicalize(x)
        expected = sorted(abs(t) for t in skew_spectrum(base.matrix) if t > 1e-12)
        got = sorted(a for _, _, a in form.pairs)
        assert np.allclose(got, expected, atol=1e-9)


def test_verdict_invariant_under_block_conjugation():
    p = FlagPartition((2, 2, 1))
    x = random_equigeodesic(p, 61)
    rng = np.random.default_rng(62)
    bad = random_tangent(p, rng)
    for seed in range(50):
        u = random_block_unitary(p, 800 + seed)
        assert is_equigeodesic(x.conjugated_by(u)).is_equigeodesic
        assert not is_equigeodesic(bad.conjugated_by(u)).is_equigeodesic


def test_equigeodesics_pass_random_metrics():
    p = FlagPartition((2, 1, 1))
    x = random_equigeodesic(p, 41)
    for seed in range(100):
        ok, residual = is_geodesic_vector(x, random_metric(p, seed))
        assert ok and residual <= 1e-8


def test_exact_essential_diagonal_sampler():
    values = (GR(1), GR(-1), GR(2), GR(1, 1), GR(0))
    p = FlagPartition((2, 2, 1))
    x = random_essentially_diagonal(p, 5, mode=Mode.EXACT, values=values)
    assert x.mode is Mode.EXACT
    assert is_equigeodesic(x).is_equigeodesic
    assert is_essentially_diagonal(x.matrix)

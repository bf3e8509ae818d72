from itertools import combinations

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.sparse.linalg import aslinearoperator

from tofcs.errors import ConfigError, DimensionError, GeometryError, RipCapExceededError
from tofcs.schema import CirculantBlockSpec, SensingMatrix
from tofcs.sensing import (
    apply_adjoint,
    apply_block,
    apply_forward,
    as_operator,
    circular_convolve,
    dense_matrix,
    estimate_rip,
    identity_block,
    identity_sensing_matrix,
    operator_norm,
    random_block,
    random_sensing_matrix,
    restrict,
    sample_generator,
    sample_selection,
    spectral_norm,
    spectrum_in_band,
    zero_fraction,
)


def test_circular_convolve_shifts_with_delta():
    x = np.array([1.0, 2.0, 3.0])
    assert_allclose(circular_convolve([1, 0, 0], x), x, atol=1e-12)
    # (v ∗ x)_j = x_{j−1}
    assert_allclose(circular_convolve([0, 1, 0], x), [3.0, 1.0, 2.0], atol=1e-12)


def test_fft_matches_direct(rng):
    for w in (1, 2, 7, 14, 16):
        v = rng.standard_normal(w)
        x = rng.standard_normal(w)
        assert_allclose(circular_convolve(v, x), circular_convolve(v, x, method="direct"), atol=1e-12)


def test_convolution_theorem_for_every_width(rng):
    for w in range(1, 65):
        v = rng.standard_normal(w)
        x = rng.standard_normal(w)
        want = np.real(np.fft.ifft(np.fft.fft(v) * np.fft.fft(x)))
        assert_allclose(circular_convolve(v, x), want, atol=1e-10)
        assert_allclose(circular_convolve(v, x, method="direct"), want, atol=1e-10)



def test_circular_convolve_length_mismatch():
    with pytest.raises(DimensionError):
        circular_convolve([1, 0], [1, 2, 3])


def test_block_matches_dense(rng):
    blk = random_block(14, 7, seed=3)
    x = rng.standard_normal(14)
    assert_allclose(apply_block(blk, x), blk.dense @ x, atol=1e-12)
    assert blk.dense.shape == (7, 14)
    assert_allclose(blk.scale, 1 / np.sqrt(7))


def test_block_spec_rejects_bad_selection():
    with pytest.raises(DimensionError):
        CirculantBlockSpec(generator=np.ones(4), selection=[0, 0], scale=1.0)
    with pytest.raises(DimensionError):
        CirculantBlockSpec(generator=np.ones(4), selection=[5], scale=1.0)
    with pytest.raises(DimensionError):
        CirculantBlockSpec(generator=[1.0, -2.0, 0.0], selection=[0], scale=1.0)


def test_forward_and_adjoint_match_dense(rng):
    M = random_sensing_matrix(4, 28, 14, 5, seed=11)
    A = dense_matrix(M)
    assert A.shape == (M.m, M.n)
    x = rng.standard_normal(M.n)
    y = rng.standard_normal(M.m)
    assert_allclose(apply_forward(M, x), A @ x, atol=1e-12)
    assert_allclose(apply_adjoint(M, y), A.T @ y, atol=1e-12)


def test_adjoint_identity_holds(rng):
    M = random_sensing_matrix(3, 28, 14, 6, p_zero=2 / 3, seed=5)
    for _ in range(200):
        x = rng.standard_normal(M.n)
        y = rng.standard_normal(M.m)
        lhs = apply_forward(M, x) @ y
        rhs = x @ apply_adjoint(M, y)
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1.0)


def test_adjoint_identity_over_random_matrices(rng):
    for trial in range(200):
        w = int(rng.integers(1, 9))
        r = int(rng.integers(1, w + 1))
        n1, n2 = int(rng.integers(1, 4)), w * int(rng.integers(1, 4))
        M = random_sensing_matrix(n1, n2, w, r, p_zero=float(rng.uniform(0, 0.9)), seed=trial)
        x = rng.standard_normal(M.n)
        y = rng.standard_normal(M.m)
        lhs = apply_forward(M, x) @ y
        rhs = x @ apply_adjoint(M, y)
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1.0)


def test_forward_is_block_local(rng):
    M = random_sensing_matrix(3, 28, 14, 5, seed=6)
    x = rng.standard_normal((3, 28))
    base = apply_forward(M, x)
    offsets = M.offsets
    for k in range(M.K):
        r0, r1, c0, c1 = M.segment_region(k)
        bumped = x.copy()
        bumped[r0:r1, c0:c1] += rng.standard_normal((r1 - r0, c1 - c0))
        changed = np.flatnonzero(~np.isclose(apply_forward(M, bumped), base, rtol=0, atol=1e-12))
        assert changed.size > 0
        assert changed.min() >= offsets[k] and changed.max() < offsets[k + 1]


def test_as_operator_roundtrip(rng):
    M = random_sensing_matrix(2, 14, 7, 3, seed=2)
    op = as_operator(M)
    x = rng.standard_normal(M.n)
    assert_allclose(op.matvec(x), apply_forward(M, x))
    assert op.shape == (M.m, M.n)


def test_identity_matrix_is_identity(rng):
    M = identity_sensing_matrix(3, 8, 4)
    x = rng.standard_normal(M.n)
    assert_allclose(apply_forward(M, x), x)
    assert M.compression_ratio == 1.0


def test_matrix_geometry_errors():
    blk = identity_block(4)
    with pytest.raises(GeometryError):
        SensingMatrix(blocks=(blk,) * 3, n1=1, n2=10, w=4)
    with pytest.raises(GeometryError):
        SensingMatrix(blocks=(blk,) * 3, n1=1, n2=8, w=4)
    with pytest.raises(GeometryError):
        random_sensing_matrix(2, 8, 4, 0)


def test_forward_rejects_wrong_length():
    M = identity_sensing_matrix(2, 8, 4)
    with pytest.raises(DimensionError):
        apply_forward(M, np.zeros(15))


def test_random_matrix_is_seeded():
    a = random_sensing_matrix(2, 28, 14, 7, seed=9)
    b = random_sensing_matrix(2, 28, 14, 7, seed=9)
    c = random_sensing_matrix(2, 28, 14, 7, seed=10)
    assert all(x.same_as(y) for x, y in zip(a.blocks, b.blocks))
    assert not all(x.same_as(y) for x, y in zip(a.blocks, c.blocks))
    # ทุก block ได้ seed ของตัวเอง
    assert len({blk.seed for blk in a.blocks}) == a.K


def test_full_rank_blocks_are_invertible():
    for seed in range(20):
        blk = random_block(14, 14, p_zero=2 / 3, seed=seed)
        assert np.linalg.matrix_rank(blk.dense) == 14


def test_full_rank_blocks_have_banded_spectrum():
    for p_zero in (0.0, 1 / 3, 2 / 3):
        for seed in range(10):
            blk = random_block(14, 14, p_zero=p_zero, seed=seed)
            assert spectrum_in_band(blk.generator, p_zero)
            assert np.linalg.cond(blk.dense) <= 4.0 + 1e-9
    # ต่อให้สุ่มใหม่ได้ generator ก็ยังมาจาก seed เดิม
    assert random_block(14, 14, seed=3).same_as(random_block(14, 14, seed=3))
    with pytest.raises(ConfigError):
        random_block(8, 8, p_zero=1.0, seed=0)


def test_sample_generator_extreme_probabilities():
    assert not sample_generator(64, p_zero=1.0, seed=1).any()
    ones = sample_generator(64, p_zero=0.0, a=2.5, seed=1)
    assert set(np.abs(ones).tolist()) == {2.5}
    assert (ones > 0).any() and (ones < 0).any()


def test_sample_generator_rejects_bad_probability():
    with pytest.raises(ConfigError):
        sample_generator(8, p_zero=1.5)


def test_sample_selection_is_sorted_and_seeded():
    assert sample_selection(14, 14, seed=4).tolist() == list(range(14))
    sel = sample_selection(14, 3, seed=4)
    assert sel.tolist() == sorted(set(sel.tolist()))
    assert np.array_equal(sel, sample_selection(14, 3, seed=4))
    assert 0 <= sample_selection(14, 1, seed=2)[0] < 14
    with pytest.raises(ConfigError):
        sample_selection(4, 5)


def test_sample_selection_is_uniform():
    counts = np.zeros(14)
    for seed in range(50000):
        counts[sample_selection(14, 3, seed=seed)] += 1
    freq = counts / counts.sum()
    assert_allclose(freq, np.full(14, 1 / 14), rtol=0.05)


def test_zero_fraction_tracks_p_zero():
    M = random_sensing_matrix(168, 224, 14, 3, p_zero=2 / 3, seed=1)
    assert abs(zero_fraction(M) - 2 / 3) < 0.02
    assert zero_fraction(identity_sensing_matrix(1, 4, 4)) == pytest.approx(0.75)


def test_restrict_matches_full_forward(rng):
    M = random_sensing_matrix(6, 28, 7, 4, seed=4)
    x = rng.standard_normal((6, 28))
    region = (2, 5, 7, 21)
    sub, index = restrict(M, region)
    assert (sub.n1, sub.n2) == (3, 14)
    full = apply_forward(M, x)
    assert_allclose(apply_forward(sub, x[2:5, 7:21]), full[index])


def test_restrict_rejects_misaligned_columns():
    M = identity_sensing_matrix(4, 8, 4)
    with pytest.raises(GeometryError):
        restrict(M, (0, 2, 1, 5))


def _rip_from_scratch(A, s):
    delta = 0.0
    for supp in combinations(range(A.shape[1]), s):
        sv = np.linalg.svd(A[:, supp], compute_uv=False)
        delta = max(delta, 1 - sv.min() ** 2, sv.max() ** 2 - 1)
    return delta


def test_exhaustive_rip_matches_enumeration():
    blk = random_block(8, 6, seed=21)
    est = estimate_rip(blk, 2)
    assert est.supports_checked == 28
    assert est.delta == pytest.approx(_rip_from_scratch(blk.dense, 2), abs=1e-12)


def test_rip_of_identity_is_zero():
    assert estimate_rip(identity_block(8), 3).delta == pytest.approx(0.0, abs=1e-12)


def test_sampled_rip_is_lower_bound():
    blk = random_block(10, 5, seed=2)
    exact = estimate_rip(blk, 3).delta
    sampled = estimate_rip(blk, 3, method="sampled", n_samples=50, seed=1)
    assert sampled.method == "sampled"
    assert sampled.delta <= exact + 1e-12


def test_rip_cap():
    with pytest.raises(RipCapExceededError):
        estimate_rip(random_block(30, 10, seed=0), 15, cap=1000)
    with pytest.raises(ConfigError):
        estimate_rip(identity_block(4), 5)


def test_operator_norm_matches_svd():
    M = random_sensing_matrix(2, 14, 7, 4, seed=8)
    A = dense_matrix(M)
    est = operator_norm(as_operator(M))
    assert est.value == pytest.approx(np.linalg.norm(A, 2), rel=1e-5)
    assert spectral_norm(M) == pytest.approx(np.linalg.norm(A, 2), rel=1e-12)


def test_segment_region_is_row_major():
    M = identity_sensing_matrix(3, 28, 14)
    assert M.segments_per_row == 2
    assert M.segment_region(0) == (0, 1, 0, 14)
    assert M.segment_region(3) == (1, 2, 14, 28)


def test_rip_with_zero_column_is_at_least_one():
    # แถวเดียวของ identity → column ที่เหลือเป็นศูนย์
    blk = CirculantBlockSpec(generator=[1.0, 0.0, 0.0, 0.0], selection=[0], scale=1.0)
    assert not blk.dense[:, 1:].any()
    assert estimate_rip(blk, 1).delta >= 1.0


def test_operator_norm_of_scaled_identity():
    assert operator_norm(aslinearoperator(np.eye(6))).value == pytest.approx(1.0, rel=1e-9)
    est = operator_norm(aslinearoperator(3.0 * np.eye(6)))
    assert est.value == pytest.approx(3.0, rel=1e-9)
    assert est.converged

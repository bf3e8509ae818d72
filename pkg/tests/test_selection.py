import numpy as np
import pytest

from tofcs.errors import ConfigError, DimensionError
from tofcs.models import SolverSettings
from tofcs.schema import CandidatePool, CirculantBlockSpec, DifferencePair
from tofcs.selection import candidate_pool, evaluate_pool, segment_errors, select_candidates
from tofcs.sensing import identity_block, random_block


EXACT = SolverSettings(lam=0.0, fista_global_iters=60)
QUICK = SolverSettings(fista_global_iters=5, tv_global_iters=5)


def _images(rng, count=2, shape=(8, 8)):
    return [DifferencePair(rng.standard_normal(shape), rng.standard_normal(shape)) for _ in range(count)]


def test_candidate_pool_is_seeded():
    a = candidate_pool(4, 14, 7, seed=2)
    b = candidate_pool(4, 14, 7, seed=2)
    assert a.seeds == b.seeds
    assert len(set(a.seeds)) == 4
    assert all(x.same_as(y) for x, y in zip(a.candidates, b.candidates))
    with pytest.raises(ConfigError):
        candidate_pool(0, 14, 7)


def test_segment_errors_layout():
    pair = DifferencePair(np.zeros((2, 4)), np.zeros((2, 4)))
    est = DifferencePair(np.array([[1.0, 0, 0, 0], [0, 0, 0, 0]]), np.array([[0, 0, 0, 0], [0, 0, 0, 2.0]]))
    assert segment_errors(pair, est, 2).tolist() == [1.0, 0.0, 0.0, 4.0]


def test_single_candidate_passes_through(rng):
    pool = candidate_pool(1, 4, 2, seed=5)
    M = select_candidates(pool, _images(rng, 1), "fista-global", QUICK)
    assert M.K == 16
    assert all(blk.same_as(pool.candidates[0]) for blk in M.blocks)


def test_identity_beats_rank_one_generator(rng):
    ones = CirculantBlockSpec(generator=np.ones(4), selection=np.arange(4), scale=0.5)
    pool = CandidatePool(candidates=[ones, identity_block(4)])
    scored = evaluate_pool(pool, _images(rng), "fista-global", EXACT)
    assert scored.errors.shape == (2, 16)
    M = select_candidates(scored, _images(rng), "fista-global", EXACT)
    assert all(blk.same_as(identity_block(4)) for blk in M.blocks)


def test_selection_ignores_pool_order(rng):
    pool = candidate_pool(3, 4, 2, seed=1)
    reordered = CandidatePool(candidates=list(reversed(pool.candidates)))
    images = _images(rng)
    a = select_candidates(pool, images, "fista-global", QUICK)
    b = select_candidates(reordered, images, "fista-global", QUICK)
    assert [blk.seed for blk in a.blocks] == [blk.seed for blk in b.blocks]


def test_ties_go_to_lowest_seed(rng):
    pool = CandidatePool(
        candidates=[random_block(4, 2, seed=7), random_block(4, 2, seed=3)],
        errors=np.zeros((2, 16)),
        image_count=1,
    )
    M = select_candidates(pool, _images(rng, 1))
    assert {blk.seed for blk in M.blocks} == {3}


def test_evaluate_pool_rejects_empty_inputs(rng):
    with pytest.raises(ConfigError):
        evaluate_pool(CandidatePool(), _images(rng))
    with pytest.raises(ConfigError):
        evaluate_pool(candidate_pool(2, 4, 2), [])


def test_evaluate_pool_rejects_mixed_shapes(rng):
    images = _images(rng, 1) + _images(rng, 1, shape=(4, 8))
    with pytest.raises(DimensionError):
        evaluate_pool(candidate_pool(2, 4, 2), images, "fista-global", QUICK)


def test_seedless_ties_ignore_pool_order(rng):
    # ทั้งสองตัวไม่มี seed และ error เท่ากันทุกตำแหน่ง
    first = CirculantBlockSpec(generator=[1.0, 0.0, 0.0, 0.0], selection=[0, 2], scale=1.0)
    second = CirculantBlockSpec(generator=[-1.0, 1.0, 0.0, 0.0], selection=[0, 2], scale=1.0)
    images = _images(rng, 1)
    winners = []
    for order in ([first, second], [second, first]):
        pool = CandidatePool(candidates=order, errors=np.zeros((2, 16)), image_count=1)
        M = select_candidates(pool, images)
        winners.append({tuple(blk.generator.tolist()) for blk in M.blocks})
    assert winners[0] == winners[1] == {(-1.0, 1.0, 0.0, 0.0)}


def test_seeded_candidates_come_before_seedless(rng):
    seeded = random_block(4, 2, seed=50)
    pool = CandidatePool(candidates=[identity_block(4), seeded], errors=np.zeros((2, 16)), image_count=1)
    M = select_candidates(pool, _images(rng, 1))
    assert {blk.seed for blk in M.blocks} == {50}


def test_pool_keeps_per_image_errors(rng):
    pool = candidate_pool(2, 4, 2, seed=6)
    scored = evaluate_pool(pool, _images(rng, 3), "fista-global", QUICK)
    assert scored.image_errors.shape == (2, 3, 16)
    assert scored.image_count == 3
    np.testing.assert_allclose(scored.errors, scored.image_errors.mean(axis=1))
    assert scored.seeds == sorted(pool.seeds)

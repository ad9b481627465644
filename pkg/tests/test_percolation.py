"""Vertex deletion on pairing-model configurations.

The three-bucket trace below is worked by hand: deleting the middle
bucket of a triangle leaves one edge between the other two, so the
survivor census is (N_0, N_1, N_2) = (0, 2, 0).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perclab.pairing import (
    Configuration,
    DegreeSequence,
    project,
    sample_configuration,
)
from perclab.percolation import (
    DeletionParams,
    apply_deletion,
    choose_deletion_set,
    degree_census,
    format_outcome,
    parse_outcome,
    percolate,
    read_outcome,
    reinstate,
    write_outcome,
)
from perclab.theory import ModelParams, mu_all


def triangle_config() -> Configuration:
    # buckets 0,1,2 of degree 2; points 0,1 | 2,3 | 4,5
    # pairs (1,2), (3,4), (5,0) form the 3-cycle 0-1-2-0
    seq = DegreeSequence.regular(3, 2)
    return Configuration(seq, np.array([5, 2, 1, 4, 3, 0]))


def test_triangle_minus_middle_bucket():
    out = apply_deletion(triangle_config(), np.array([1]))
    assert out.original_n == 3
    assert np.array_equal(out.deleted, [1])
    assert out.r == 1
    assert np.array_equal(out.census, [0, 2, 0])
    # survivors keep one pair: the old (5,0) edge between buckets 2 and 0
    assert out.n_survivors == 2
    assert np.array_equal(out.survivor.seq.degrees, [1, 1])
    g = project(out.survivor)
    assert np.array_equal(g.edges, [[0, 1]])
    # bucket_map sends new labels back to original ones
    assert np.array_equal(out.bucket_map, [0, 2])


def test_delete_nothing_is_identity():
    cfg = sample_configuration(DegreeSequence.regular(20, 3), seed=4)
    out = apply_deletion(cfg, np.zeros(0, dtype=np.int64))
    assert out.r == 0
    assert np.array_equal(out.census, [0, 0, 0, 20])
    assert out.survivor == cfg
    assert np.array_equal(out.bucket_map, np.arange(20))


def test_delete_everything():
    cfg = sample_configuration(DegreeSequence.regular(8, 3), seed=4)
    out = apply_deletion(cfg, np.arange(8))
    assert out.r == 8
    assert out.n_survivors == 0
    assert np.array_equal(out.census, [0, 0, 0, 0])
    assert out.survivor.seq.n == 0


def test_deletion_params_validation():
    with pytest.raises(ValueError):
        DeletionParams(n=10)  # neither alpha nor p
    with pytest.raises(ValueError):
        DeletionParams(n=10, alpha=0.5, p=0.1)  # both
    assert DeletionParams(n=100, alpha=0.5).prob == pytest.approx(0.1)
    assert DeletionParams(n=100, p=0.25).prob == 0.25


def test_choose_deletion_set_mean():
    # average |R| over many draws should sit near n*p
    n, p, reps = 4000, 0.3, 400
    rng = np.random.default_rng(8)
    total = sum(
        choose_deletion_set(DeletionParams(n=n, p=p, seed=rng)).size
        for _ in range(reps)
    )
    mean = total / reps
    se = math.sqrt(n * p * (1 - p) / reps)
    assert abs(mean - n * p) < 4 * se


def test_deletion_count_concentrates_at_scale():
    # p = n**-1/2 with n = 10**6 gives E|R| = 1000, sd ~ 31.6
    n = 10**6
    params = DeletionParams(n=n, alpha=0.5, seed=77)
    r = choose_deletion_set(params).size
    expect = n**0.5
    sd = math.sqrt(n * params.prob * (1 - params.prob))
    assert abs(r - expect) < 5 * sd


def test_percolate_is_deterministic():
    cfg = sample_configuration(DegreeSequence.regular(50, 4), seed=1)
    a = percolate(cfg, DeletionParams(n=50, p=0.3, seed=9))
    b = percolate(cfg, DeletionParams(n=50, p=0.3, seed=9))
    assert np.array_equal(a.deleted, b.deleted)
    assert a.survivor == b.survivor


def test_degree_census_with_predictions():
    cfg = sample_configuration(DegreeSequence.regular(100, 4), seed=0)
    out = percolate(cfg, DeletionParams(n=100, alpha=0.5, seed=3))
    census, mus = degree_census(out, alpha=0.5)
    assert np.array_equal(census, out.census)
    assert mus == pytest.approx(mu_all(ModelParams(n=100, d=4, alpha=0.5)))
    census2, nothing = degree_census(out)
    assert nothing is None


# ---------------------------------------------------------------------------
# reinstatement


def test_reinstate_all_recovers_original():
    cfg = sample_configuration(DegreeSequence.regular(30, 3), seed=6)
    out = percolate(cfg, DeletionParams(n=30, p=0.4, seed=2))
    back = reinstate(cfg, out, winners=out.deleted)
    assert back.r == 0
    assert back.survivor == cfg


def test_reinstate_none_is_noop():
    cfg = sample_configuration(DegreeSequence.regular(30, 3), seed=6)
    out = percolate(cfg, DeletionParams(n=30, p=0.4, seed=2))
    again = reinstate(cfg, out, winners=np.zeros(0, dtype=np.int64))
    assert np.array_equal(again.deleted, out.deleted)
    assert again.survivor == out.survivor


def test_reinstate_rejects_non_deleted_winners():
    cfg = sample_configuration(DegreeSequence.regular(30, 3), seed=6)
    out = percolate(cfg, DeletionParams(n=30, p=0.4, seed=2))
    alive = np.setdiff1d(np.arange(30), out.deleted)[:1]
    with pytest.raises(ValueError):
        reinstate(cfg, out, winners=alive)


def test_reinstate_q_extremes():
    cfg = sample_configuration(DegreeSequence.regular(30, 3), seed=6)
    out = percolate(cfg, DeletionParams(n=30, p=0.4, seed=2))
    keep_all = reinstate(cfg, out, q=1.0, seed=0)
    assert np.array_equal(keep_all.deleted, out.deleted)
    drop_all = reinstate(cfg, out, q=0.0, seed=0)
    assert drop_all.r == 0


def test_two_stage_rate_composes():
    # stage one at p1, keep-deleted q: the surviving deletion set should
    # behave like a single binomial at rate p1*q
    n, p1, q, reps = 3000, 0.4, 0.5, 300
    seq = DegreeSequence.regular(n, 3)
    cfg = sample_configuration(seq, seed=10)
    rng = np.random.default_rng(11)
    total = 0
    for _ in range(reps):
        out = percolate(cfg, DeletionParams(n=n, p=p1, seed=rng))
        final = reinstate(cfg, out, q=q, seed=rng)
        total += final.r
    mean = total / reps
    p_eff = p1 * q
    se = math.sqrt(n * p_eff * (1 - p_eff) / reps)
    assert abs(mean - n * p_eff) < 4 * se


# ---------------------------------------------------------------------------
# structural invariants

degree_lists = st.lists(st.integers(min_value=0, max_value=5), min_size=1, max_size=14)


@st.composite
def config_and_deletion(draw):
    degs = draw(degree_lists)
    if sum(degs) % 2 == 1:
        degs[0] += 1
    seed = draw(st.integers(min_value=0, max_value=2**31))
    n = len(degs)
    deleted = sorted(draw(st.sets(st.integers(min_value=0, max_value=n - 1))))
    return np.array(degs), seed, np.array(deleted, dtype=np.int64)


@given(config_and_deletion())
@settings(max_examples=150, deadline=None)
def test_census_accounting(case):
    degs, seed, deleted = case
    cfg = sample_configuration(DegreeSequence(degs), seed=seed)
    out = apply_deletion(cfg, deleted)
    n = len(degs)
    assert out.census.sum() == n - deleted.size
    # handshake on the survivor graph
    total_deg = int((np.arange(out.census.size) * out.census).sum())
    assert total_deg % 2 == 0
    assert total_deg == 2 * project(out.survivor).m
    # degrees can only shrink, tracked through bucket_map
    assert np.all(out.survivor.seq.degrees <= degs[out.bucket_map])
    # deleted and survivors partition the buckets
    assert np.array_equal(
        np.sort(np.concatenate([out.bucket_map, deleted])), np.arange(n)
    )


@given(config_and_deletion())
@settings(max_examples=60, deadline=None)
def test_outcome_text_roundtrip(case):
    degs, seed, deleted = case
    cfg = sample_configuration(DegreeSequence(degs), seed=seed)
    out = apply_deletion(cfg, deleted)
    back = parse_outcome(format_outcome(out))
    assert back.original_n == out.original_n
    assert np.array_equal(back.deleted, out.deleted)
    assert np.array_equal(back.census, out.census)
    assert back.survivor == out.survivor
    assert np.array_equal(back.bucket_map, out.bucket_map)
    assert back.point_map is None  # not recoverable from text


def test_outcome_file_roundtrip(tmp_path):
    out = apply_deletion(triangle_config(), np.array([1]))
    path = tmp_path / "out.txt"
    write_outcome(out, path)
    text = path.read_text()
    assert "deleted: 2" in text  # 1-based original label
    assert "census: 0 2 0" in text
    back = read_outcome(path)
    assert np.array_equal(back.census, out.census)
    assert back.survivor == out.survivor

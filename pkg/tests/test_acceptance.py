import pytest

import acceptance_engine
from acceptance_engine import (
    AcceptanceResult,
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    degeneracy_cases,
    lattice_paths,
    run_acceptance,
    summarize,
)
from core.errors import Inconsistent, NotClosed
from db.db import get_db


def _clean(result: AcceptanceResult, seeds: int) -> None:
    assert result.failed == 0, result.detail
    assert result.passed + result.discarded == seeds
    assert result.passed > 0


def test_lattice_paths():
    paths = lattice_paths((2, 1, 1), (0, 0, 0))
    assert len(paths) == 4
    assert len({tuple(p) for p in paths}) == 4
    for path in paths:
        at = [0, 0, 0]
        for axis, sign in path:
            at[axis] += sign
            assert 0 <= at[axis]
        assert tuple(at) == (2, 1, 1)


@pytest.mark.parametrize("rank", [0, 1])
def test_cube_dimensions(sampler, rank):
    _clean(criterion_1(rank, 3, sampler), 3)


def test_four_d_consistency(sampler):
    _clean(criterion_2(0, 3, sampler), 3)


def test_closedness(sampler):
    _clean(criterion_3(0, 2, sampler), 2)


@pytest.mark.parametrize("rank", [0, 1])
def test_potential_round_trip(sampler, rank):
    _clean(criterion_4(rank, 2, sampler), 2)


@pytest.mark.parametrize("rank", [0, 1])
def test_commuting_diagram(sampler, rank):
    _clean(criterion_5(rank, 2, sampler), 2)


@pytest.mark.parametrize("rank", [0, 1, 2])
def test_map_consistency(sampler, rank):
    result = criterion_6(rank, 5, sampler)
    assert result.failed == 0 and result.passed + result.discarded == 5


def test_slicing(sampler):
    _clean(criterion_7(0, 2, sampler), 2)


@pytest.mark.parametrize("rank", [0, 1])
def test_degeneracies(sampler, rank):
    outcomes = degeneracy_cases(rank, sampler)
    assert set(outcomes) == {'repeated_subspace', 'not_affine', 'singular_denominator', 'degenerate_slice'}
    assert all(outcomes.values()), outcomes
    result = criterion_8(rank, 1, sampler)
    assert (result.passed, result.failed) == (4, 0)


def test_run_acceptance_persists():
    before = len(get_db().get_acceptance_results(limit=1000))
    frame = run_acceptance(criteria=[1, 6], ranks=[0], seeds={'cube_dimensions': 2, 'map_consistency': 2})
    assert list(frame['criterion']) == [1, 6]
    assert bool(frame['ok'].all())
    assert len(get_db().get_acceptance_results(limit=1000)) == before + 2
    summary = summarize(frame)
    assert list(summary['criterion']) == [1, 6]
    assert bool(summary['ok'].all())


def test_run_acceptance_without_ledger():
    frame = run_acceptance(criteria=[8], ranks=[0], persist=False)
    assert len(frame) == 1 and frame.iloc[0]['passed'] == 4


@pytest.mark.parametrize("error", [NotClosed, Inconsistent])
def test_broken_identity_is_a_failure_not_a_discard(sampler, monkeypatch, error):
    def broken(net, region):
        raise error("relation fails", location={'n': (0, 0, 0), 'axes': (0, 1, 2)})

    monkeypatch.setattr(acceptance_engine, 'coefficient_pipeline', broken)
    result = criterion_5(0, 2, sampler)
    assert (result.passed, result.failed, result.discarded) == (0, 2, 0)
    assert 'relation fails' in result.detail

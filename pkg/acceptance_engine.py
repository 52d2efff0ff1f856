"""Acceptance sweeps.

Runs the exact property checks over many seeds and ranks, aggregates them with
pandas and persists one row per (criterion, rank) into `acceptance_results`.

Every check is exact: a seed either passes, fails, or is discarded because the
sampled data hit a degeneracy (counted, never silently repaired).
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import config
from core.errors import (
    DegeneracyError,
    DegenerateInput,
    DegenerateSlice,
    GrassnetError,
    Inconsistent,
    NotAffine,
    SingularDenominator,
)
from core.grassmann import Subspace
from core.lattice import Region
from core.linalg import RationalMatrix, inverse
from db.db import get_db
from engine.coefficients import (
    PlaquetteField,
    a_field_from_net,
    check_aa,
    closed_form_from_potential,
    coefficient_pipeline,
    extract_a,
    integrate_potential,
    transport,
)
from engine.darboux_net import (
    check_cube_span,
    check_r_closedness,
    edge_sweep,
    potentials_s,
    r_field_from_net,
    rotation_coeffs_darboux,
    slice_qnet,
)
from engine.darboux_system import DarbouxState, check_map_4d_consistency, evolve
from engine.qnet import QNet, consistency_report, cube_inputs, propagate_cube, propagate_cube_with_ledger
from engine.sampler import GeneralPositionSampler


@dataclass(frozen=True)
class AcceptanceResult:
    criterion: int
    rank: int
    seeds: int
    passed: int
    failed: int
    discarded: int
    seconds: float
    detail: str = ''
    redraws: int = 0

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.passed > 0


def _rng(criterion: int, rank: int, seed: int) -> np.random.Generator:
    return np.random.default_rng([criterion, rank, seed])


def _tally(criterion: int, rank: int, seeds: int, check: Callable[[np.random.Generator], bool], sampler) -> AcceptanceResult:
    started = time.perf_counter()
    passed = failed = discarded = 0
    first_failure = ''
    before = sampler.stats.resamples
    for seed in range(seeds):
        try:
            ok = check(_rng(criterion, rank, seed))
        except Inconsistent as e:
            ok = False
            first_failure = first_failure or f"seed={seed}: {e}"
        except DegeneracyError:
            discarded += 1
            continue
        except GrassnetError as e:
            ok = False
            first_failure = first_failure or f"seed={seed}: {e}"
        if ok:
            passed += 1
        else:
            failed += 1
            if not first_failure:
                first_failure = f"seed={seed}"
    return AcceptanceResult(
        criterion=criterion,
        rank=rank,
        seeds=seeds,
        passed=passed,
        failed=failed,
        discarded=discarded,
        seconds=round(time.perf_counter() - started, 3),
        detail=first_failure,
        redraws=sampler.stats.resamples - before,
    )


# ============================================================================
# Criteria
# ============================================================================

def criterion_1(rank: int, seeds: int, sampler: Optional[GeneralPositionSampler] = None) -> AcceptanceResult:
    """Cube propagation dimension ledger at d = 4r+3, plus axis-label symmetry."""
    sampler = sampler or GeneralPositionSampler()
    d = 4 * rank + 3

    def check(rng):
        data = sampler.sample_cube_data(rank, d, rng)
        X, X1, X2, X3, X12, X13, X23 = cube_inputs(data, (0, 0, 0), (0, 1, 2))
        result, ledger = propagate_cube_with_ledger(X, X1, X2, X3, X12, X13, X23)
        swapped = propagate_cube(X, X2, X1, X3, X12, X23, X13)
        return ledger.generic and swapped == result

    return _tally(1, rank, seeds, check, sampler)


def criterion_2(rank: int, seeds: int, sampler: Optional[GeneralPositionSampler] = None) -> AcceptanceResult:
    """Four candidates for X_1234 coincide and equal the meet of the four V-planes."""
    sampler = sampler or GeneralPositionSampler()
    d = 5 * rank + 4

    def check(rng):
        rep = consistency_report(sampler.sample_hypercube_data(rank, d, rng))
        return rep.consistent and rep.matches_v_meet

    return _tally(2, rank, seeds, check, sampler)


def criterion_3(rank: int, seeds: int, sampler: Optional[GeneralPositionSampler] = None) -> AcceptanceResult:
    """a^{ij}_k a^{ik} = a^{ik}_j a^{ij} on every cube of propagated 2×2×2 nets."""
    sampler = sampler or GeneralPositionSampler()
    region = Region((2, 2, 2))

    def check(rng):
        net = sampler.sample_propagated_net(3, rank, 4 * rank + 3, region, rng)
        a = a_field_from_net(net, region)
        return all(
            check_aa(a, n, p, q, s)
            for n, i, j, k in region.cubes()
            for p, q, s in ((i, j, k), (j, i, k), (k, i, j))
        )

    return _tally(3, rank, seeds, check, sampler)


def lattice_paths(target: Sequence[int], origin: Sequence[int]) -> List[List[Tuple[int, int]]]:
    """Three distinct monotone paths (axis order, reversed order, round robin) plus one detour."""
    delta = [t - o for t, o in zip(target, origin)]
    axes = [k for k, x in enumerate(delta) if x]
    forward = [(k, 1) for k in axes for _ in range(delta[k])]
    backward = [(k, 1) for k in reversed(axes) for _ in range(delta[k])]
    robin = []
    left = dict((k, delta[k]) for k in axes)
    while any(left.values()):
        for k in axes:
            if left[k]:
                robin.append((k, 1))
                left[k] -= 1
    paths = [forward, backward, robin]
    if len(axes) >= 2:
        a, b = axes[0], axes[1]
        # up b first, over a, back down b, then the rest
        detour = [(b, 1)] * delta[b] + [(a, 1)] * delta[a] + [(b, -1)] * delta[b] + [(b, 1)] * delta[b]
        detour += [(k, 1) for k in axes[2:] for _ in range(delta[k])]
        paths.append(detour)
    return paths


def criterion_4(rank: int, seeds: int, sampler: Optional[GeneralPositionSampler] = None) -> AcceptanceResult:
    """Closed one-forms built from random potentials are recovered up to the base gauge."""
    sampler = sampler or GeneralPositionSampler()
    regions = [Region((4, 4)), Region((3, 3, 3))]

    def check(rng):
        for region in regions:
            axes = list(range(region.N))
            h = sampler.random_potential(region.N, rank, region, rng, bound=3)
            a = closed_form_from_potential(h, axes, region)
            origin = region.origin
            eye = RationalMatrix.identity(rank + 1)
            rec = integrate_potential(a, eye, origin, region)
            base_inv = inverse(h.get(origin))
            if any(rec.get(n) != h.get(n) @ base_inv for n in region.vertices()):
                return False
            corner = tuple(o + e for o, e in zip(origin, region.extents))
            ends = [transport(a, eye, origin, path) for path in lattice_paths(corner, origin)]
            if any(end != rec.get(corner) for end in ends):
                return False
        return True

    return _tally(4, rank, seeds, check, sampler)


def _commuting(b: PlaquetteField, region: Region) -> bool:
    state = DarbouxState.from_field(b)
    walls = state.restrict(region.wall_plaquettes())
    evolved = evolve(walls, region)
    return all(evolved.get(*key) == value for key, value in b.values.items())


def criterion_5(rank: int, seeds: int, sampler: Optional[GeneralPositionSampler] = None) -> AcceptanceResult:
    """Rotation coefficients of a propagated net equal the evolution of their wall values."""
    sampler = sampler or GeneralPositionSampler()
    region = Region((2, 2, 2))

    def check(rng):
        net = sampler.sample_propagated_net(
            3, rank, 4 * rank + 3, region, rng, accept=lambda net: coefficient_pipeline(net, region) is not None
        )
        bundle = coefficient_pipeline(net, region)
        residual_ok = all(ok for *_, ok in bundle.residuals(region))
        return residual_ok and _commuting(bundle.b, region)

    return _tally(5, rank, seeds, check, sampler)


def criterion_6(rank: int, seeds: int, sampler: Optional[GeneralPositionSampler] = None) -> AcceptanceResult:
    """Both shift orders of the map agree on random 4D corners; singular draws discarded."""
    sampler = sampler or GeneralPositionSampler()

    def check(rng):
        return check_map_4d_consistency(sampler.sample_darboux_corner(4, rank, rng))

    return _tally(6, rank, seeds, check, sampler)


def _darboux_pipeline(edges, region: Region):
    r_field = r_field_from_net(edges, region)
    s = potentials_s(r_field, region)
    return r_field, rotation_coeffs_darboux(s, region)


def criterion_7(rank: int, seeds: int, sampler: Optional[GeneralPositionSampler] = None) -> AcceptanceResult:
    """Sliced Q-nets are Darboux nets with closed r^{ij} and evolving rotation coefficients."""
    sampler = sampler or GeneralPositionSampler()
    region = Region((2, 2, 2))

    def check(rng):
        net = sampler.sample_propagated_net(3, rank, 4 * rank + 3, region, rng)
        _, edges = sampler.sample_slicing_plane(
            net, rng, region, accept=lambda e: _darboux_pipeline(e, region) is not None
        )
        if not all(c.passed for c in edge_sweep(edges, region)):
            return False
        if not all(check_cube_span(edges, n, i, j, k) for n, i, j, k in region.cubes()):
            return False
        r_field, b = _darboux_pipeline(edges, region)
        closed = all(
            check_r_closedness(r_field, n, p, q, s)
            for n, i, j, k in region.cubes()
            for p, q, s in ((i, j, k), (j, i, k), (k, i, j))
        )
        return closed and _commuting(b, region)

    return _tally(7, rank, seeds, check, sampler)


def degeneracy_cases(rank: int, sampler: Optional[GeneralPositionSampler] = None, seed: int = 0) -> Dict[str, bool]:
    """Constructed degenerate inputs must raise the typed error at the right location."""
    sampler = sampler or GeneralPositionSampler()
    rng = _rng(8, rank, seed)
    d = 4 * rank + 3
    k = rank + 1
    outcomes = {}

    # repeated subspace: X_1 = X collapses two faces
    data = sampler.sample_cube_data(rank, d, rng)
    X, X1, X2, X3, X12, X13, X23 = cube_inputs(data, (0, 0, 0), (0, 1, 2))
    try:
        propagate_cube(X, X, X2, X3, X12, X13, X23, location={'n': (0, 0, 0), 'axes': (0, 1, 2)})
        outcomes['repeated_subspace'] = False
    except DegenerateInput as e:
        outcomes['repeated_subspace'] = e.location == {'n': (0, 0, 0), 'axes': (0, 1, 2)}

    # point at infinity: last block of X(1,0) is zero
    net = sampler.sample_propagated_net(2, rank, 3 * rank + 2, Region((1, 1)), rng)
    rows = [[1 if c == p else 0 for c in range(net.d + 1)] for p in range(k)]
    infinite = Subspace(RationalMatrix(rows))
    broken = net.copy()
    broken.values[(1, 0)] = infinite
    try:
        extract_a(broken, (0, 0), 0, 1)
        outcomes['not_affine'] = False
    except NotAffine as e:
        outcomes['not_affine'] = e.location == (1, 0)

    # singular denominator: b^{jk} = b^{kj} = I
    eye = RationalMatrix.identity(k)
    zero = RationalMatrix.zeros(k, k)
    state = DarbouxState(3, rank)
    for n, i, j in Region((1, 1, 1)).wall_plaquettes():
        state.set(n, i, j, eye if {i, j} == {1, 2} else zero)
    try:
        evolve(state, Region((1, 1, 1)))
        outcomes['singular_denominator'] = False
    except SingularDenominator as e:
        outcomes['singular_denominator'] = e.location is not None and e.location.get('n') == (0, 0, 0)

    # collapsed direction: X(1,0) = X(0,0) makes the edge span degenerate
    collapsed = QNet(2, rank, d, {(0, 0): X, (1, 0): X, (0, 1): X2, (1, 1): X12})
    plane = Subspace(RationalMatrix.identity(d + 1).select_rows(0, d - rank))
    try:
        slice_qnet(collapsed, plane)
        outcomes['degenerate_slice'] = False
    except DegenerateSlice as e:
        outcomes['degenerate_slice'] = e.location == {'n': (0, 0), 'axis': 0}
    return outcomes


def criterion_8(rank: int, seeds: int = 1, sampler: Optional[GeneralPositionSampler] = None) -> AcceptanceResult:
    sampler = sampler or GeneralPositionSampler()
    started = time.perf_counter()
    passed = failed = 0
    failures = []
    for seed in range(seeds):
        for name, ok in degeneracy_cases(rank, sampler, seed).items():
            if ok:
                passed += 1
            else:
                failed += 1
                failures.append(name)
    return AcceptanceResult(
        criterion=8,
        rank=rank,
        seeds=seeds,
        passed=passed,
        failed=failed,
        discarded=0,
        seconds=round(time.perf_counter() - started, 3),
        detail=",".join(sorted(set(failures))),
    )


CRITERIA: Dict[int, Tuple[Callable[..., AcceptanceResult], str, Tuple[int, ...]]] = {
    1: (criterion_1, 'cube_dimensions', (0, 1, 2)),
    2: (criterion_2, 'four_d_consistency', (0, 1, 2)),
    3: (criterion_3, 'closedness', (0, 1, 2)),
    4: (criterion_4, 'potential_round_trip', (0, 1, 2)),
    5: (criterion_5, 'commuting_diagram', (0, 1)),
    6: (criterion_6, 'map_consistency', (0, 1, 2)),
    7: (criterion_7, 'slicing', (0, 1)),
    8: (criterion_8, 'degeneracies', (0, 1, 2)),
}


def run_acceptance(
    criteria: Optional[Iterable[int]] = None,
    ranks: Optional[Iterable[int]] = None,
    seeds: Optional[Dict[str, int]] = None,
    persist: bool = True,
) -> pd.DataFrame:
    """Run the selected criteria; returns one row per (criterion, rank)."""
    seeds = dict(getattr(config, 'ACCEPTANCE_SEEDS', {}), **(seeds or {}))
    allowed = set(ranks) if ranks is not None else set(getattr(config, 'ACCEPTANCE_RANKS', (0, 1, 2)))
    sampler = GeneralPositionSampler()
    db = get_db() if persist and getattr(config, 'LEDGER_ENABLED', True) else None

    rows = []
    for number in sorted(criteria or CRITERIA):
        fn, key, default_ranks = CRITERIA[number]
        for rank in default_ranks:
            if rank not in allowed:
                continue
            result = fn(rank, int(seeds.get(key, 1)), sampler)
            rows.append(asdict(result))
            if db is not None:
                db.insert_acceptance_result(asdict(result))
                level = 'INFO' if result.ok else 'ERROR'
                db.log(level, 'Acceptance', f"criterion {number} r={rank}: {result.passed} passed, "
                                            f"{result.failed} failed, {result.discarded} discarded")

    frame = pd.DataFrame(rows, columns=[
        'criterion', 'rank', 'seeds', 'passed', 'failed', 'discarded', 'seconds', 'detail', 'redraws'
    ])
    if not frame.empty:
        frame['ok'] = (frame['failed'] == 0) & (frame['passed'] > 0)
    return frame


def summarize(frame: pd.DataFrame) -> pd.DataFrame:
    """Per-criterion totals across ranks."""
    if frame.empty:
        return frame
    grouped = frame.groupby('criterion').agg(
        ranks=('rank', 'nunique'),
        passed=('passed', 'sum'),
        failed=('failed', 'sum'),
        discarded=('discarded', 'sum'),
        seconds=('seconds', 'sum'),
    )
    grouped['ok'] = grouped['failed'] == 0
    return grouped.reset_index()

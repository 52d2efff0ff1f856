from fractions import Fraction

import pytest

from core.errors import MissingPlaquette, SingularDenominator
from core.lattice import Region
from core.linalg import RationalMatrix, inverse
from engine.darboux_system import (
    DarbouxState,
    check_map_4d_consistency,
    corner_from_state,
    darboux_map,
    darboux_map_printed_sign,
    evolve,
    shift_state,
    step_cube,
)


def q(p, d=1):
    return RationalMatrix([[Fraction(p, d)]])


def test_scalar_map_value():
    assert darboux_map(q(1, 2), q(1, 3), q(1, 4), q(1, 5)) == q(35, 57)


def test_matrix_map_identity_denominator():
    b_ij = RationalMatrix([[1, 2], [3, 4]])
    b_ik = RationalMatrix([[0, 1], [1, 0]])
    b_kj = RationalMatrix([[1, 0], [0, 2]])
    zero = RationalMatrix.zeros(2, 2)
    assert darboux_map(b_ij, b_ik, b_kj, zero) == b_ij + b_ik @ b_kj


def test_singular_denominator_is_located():
    with pytest.raises(SingularDenominator) as err:
        darboux_map(q(1), q(1), q(1), q(1), location={'n': (0, 0, 0), 'axes': (0, 1, 2)})
    assert err.value.location == {'n': (0, 0, 0), 'axes': (0, 1, 2)}


def test_printed_sign_companion(sampler, np_rng):
    b = [sampler.random_small_matrix(2, np_rng) for _ in range(4)]
    minus = [-m for m in b]
    assert darboux_map_printed_sign(*minus) == -darboux_map(*b)


def test_state_needs_three_axes():
    with pytest.raises(ValueError):
        DarbouxState(2, 0)


def test_step_cube_outputs(sampler, np_rng, unit_cube):
    state, _ = sampler.sample_darboux_state(3, 1, unit_cube, np_rng)
    out = step_cube(state, (0, 0, 0))
    assert len(out) == 6
    assert ((0, 0, 1), 0, 1) in out and ((1, 0, 0), 2, 1) in out


class TestEvolve:
    @pytest.mark.parametrize("r", [0, 1])
    def test_fills_region(self, sampler, r):
        region = Region((2, 2, 2))
        state, redraws = sampler.sample_darboux_state(3, r, region, rng=r + 3)
        assert redraws >= 0
        out = evolve(state, region)
        assert len(out) == 72
        for key in region.wall_plaquettes():
            assert out.get(*key) == state.get(*key)

    def test_orders_agree(self, sampler):
        region = Region((2, 1, 2))
        state, _ = sampler.sample_darboux_state(3, 1, region, rng=12)
        assert evolve(state, region).values == evolve(state, region, order='reverse').values

    def test_four_axes(self, sampler):
        region = Region((1, 1, 1, 1))
        state, _ = sampler.sample_darboux_state(4, 0, region, rng=2)
        out = evolve(state, region)
        assert len(out) == 2 * len(list(region.squares()))

    def test_missing_wall(self, sampler, unit_cube):
        state, _ = sampler.sample_darboux_state(3, 0, unit_cube, rng=1)
        del state.values[((0, 0, 0), 0, 1)]
        with pytest.raises(MissingPlaquette):
            evolve(state, unit_cube)

    def test_singular_wall_data(self, unit_cube):
        state = DarbouxState(3, 0)
        for n, i, j in unit_cube.wall_plaquettes():
            state.set(n, i, j, q(1) if {i, j} == {1, 2} else q(0))
        with pytest.raises(SingularDenominator) as err:
            evolve(state, unit_cube)
        assert err.value.location['n'] == (0, 0, 0)


class TestMultidimensionalConsistency:
    @pytest.mark.parametrize("r", [0, 1, 2])
    def test_random_corners(self, sampler, r):
        for seed in range(3):
            corner = sampler.sample_darboux_corner(4, r, rng=100 * r + seed)
            try:
                assert check_map_4d_consistency(corner)
            except SingularDenominator:
                continue

    def test_five_axes(self, sampler):
        corner = sampler.sample_darboux_corner(5, 0, rng=77)
        assert check_map_4d_consistency(corner)

    def test_shift_state_avoids_axis(self, sampler):
        corner = sampler.sample_darboux_corner(4, 0, rng=5)
        shifted = shift_state(corner, 3)
        assert set(shifted) == {(p, q) for p in range(3) for q in range(3) if p != q}

    def test_needs_four_axes(self, sampler):
        with pytest.raises(ValueError):
            check_map_4d_consistency(sampler.sample_darboux_corner(3, 0, rng=1))

    def test_corner_from_state(self, sampler, unit_cube):
        state, _ = sampler.sample_darboux_state(3, 0, unit_cube, rng=4)
        corner = corner_from_state(state)
        assert len(corner) == 6
        assert corner[(0, 2)] == state.get((0, 0, 0), 0, 2)


def test_map_commutes_with_conjugation():
    b_ij = RationalMatrix([[1, 2], [0, 1]])
    b_ik = RationalMatrix([["1/3", 0], [1, "-1/2"]])
    b_kj = RationalMatrix([[0, "1/3"], [0, 0]])
    b_jk = RationalMatrix([["1/2", 0], ["1/2", "1/2"]])
    g = RationalMatrix([[2, 1], [1, 1]])
    g_inv = inverse(g)

    def conj(m):
        return g @ m @ g_inv

    expected = conj(darboux_map(b_ij, b_ik, b_kj, b_jk))
    assert darboux_map(conj(b_ij), conj(b_ik), conj(b_kj), conj(b_jk)) == expected


def test_scalar_map_embeds_as_multiple_of_identity():
    eye = RationalMatrix.identity(3)
    scaled = [eye * Fraction(1, d) for d in (2, 3, 4, 5)]
    assert darboux_map(*scaled) == eye * Fraction(35, 57)

from fractions import Fraction

import pytest

from core.errors import DegenerateSlice, MissingEdge, UnderDetermined
from core.grassmann import Subspace, contains, join
from core.lattice import Region, shift
from core.linalg import RationalMatrix
from engine.darboux_net import (
    EdgeNet,
    check_cube_span,
    check_edge_square,
    check_r_closedness,
    cube_span_sweep,
    darboux_y_variables,
    edge_square_dim,
    edge_sweep,
    extract_r,
    potentials_s,
    r_field_from_net,
    rotation_coeffs_darboux,
    slice_qnet,
)
from engine.darboux_system import DarbouxState, evolve
from engine.qnet import QNet


def P(*coords):
    return Subspace(RationalMatrix([list(coords)]))


@pytest.fixture
def collinear_square():
    return EdgeNet(2, 0, 2, {
        ((0, 0), 0): P(0, 0, 1),
        ((0, 0), 1): P(1, 0, 1),
        ((0, 1), 0): P(Fraction(1, 4), 0, 1),
        ((1, 0), 1): P(3, 0, 1),
    })


def _pipeline(edges, region):
    r_field = r_field_from_net(edges, region)
    s = potentials_s(r_field, region)
    return r_field, s, rotation_coeffs_darboux(s, region)


def test_missing_edge(collinear_square):
    with pytest.raises(MissingEdge):
        collinear_square.get((5, 5), 0)


def test_edge_square_on_a_line(collinear_square):
    assert edge_square_dim(collinear_square, (0, 0), 0, 1) == 1
    assert check_edge_square(collinear_square, (0, 0), 0, 1)
    assert all(c.passed for c in edge_sweep(collinear_square))


def test_extract_r(collinear_square):
    assert extract_r(collinear_square, (0, 0), 0, 1) == RationalMatrix([[Fraction(3, 4)]])


def test_extract_r_needs_distinct_sides(collinear_square):
    collinear_square.set((0, 0), 1, P(0, 0, 1))
    with pytest.raises(UnderDetermined):
        extract_r(collinear_square, (0, 0), 0, 1)


class TestSlicing:
    @pytest.mark.parametrize("r", [0, 1])
    def test_slice_is_darboux_net(self, sampler, r):
        region = Region((1, 1, 1))
        net = sampler.sample_propagated_net(3, r, 4 * r + 3, region, rng=50 + r)
        plane, edges = sampler.sample_slicing_plane(
            net, rng=60 + r, region=region, accept=lambda e: _pipeline(e, region) is not None
        )
        assert plane.vector_dim == 4 * r + 3 - r
        assert len(edges) == 12
        for (n, i), X in edges.values.items():
            assert contains(plane, X)
            assert contains(join([net.get(n), net.get(shift(n, i))]), X)
        assert all(c.passed for c in edge_sweep(edges, region))
        assert check_cube_span(edges, (0, 0, 0), 0, 1, 2)
        sweep = cube_span_sweep(edges, region)
        assert sweep == [((0, 0, 0), (0, 1, 2), True)]

    def test_sliced_coefficients_evolve(self, sampler):
        region = Region((2, 2, 2))
        net = sampler.sample_propagated_net(3, 0, 3, region, rng=70)
        _, edges = sampler.sample_slicing_plane(
            net, rng=71, region=region, accept=lambda e: _pipeline(e, region) is not None
        )
        r_field, s, b = _pipeline(edges, region)
        for n, i, j, k in region.cubes():
            assert check_r_closedness(r_field, n, i, j, k)
            assert check_r_closedness(r_field, n, k, i, j)
        walls = DarbouxState.from_field(b).restrict(region.wall_plaquettes())
        evolved = evolve(walls, region)
        assert all(evolved.get(*key) == value for key, value in b.values.items())

    def test_linear_problem_on_slice(self, sampler):
        region = Region((1, 1, 1))
        net = sampler.sample_propagated_net(3, 1, 7, region, rng=80)
        _, edges = sampler.sample_slicing_plane(
            net, rng=81, region=region, accept=lambda e: _pipeline(e, region) is not None
        )
        _, s, b = _pipeline(edges, region)
        y = darboux_y_variables(edges, s)
        for n, i, j in region.squares():
            for p, q in ((i, j), (j, i)):
                assert y.get(shift(n, q), p) - y.get(n, p) == b.get(n, p, q) @ y.get(n, q)

    def test_printed_sign_negates(self, sampler):
        region = Region((1, 1, 1))
        net = sampler.sample_propagated_net(3, 0, 3, region, rng=90)
        _, edges = sampler.sample_slicing_plane(
            net, rng=91, region=region, accept=lambda e: _pipeline(e, region) is not None
        )
        _, s, b = _pipeline(edges, region)
        printed = rotation_coeffs_darboux(s, region, printed_sign=True)
        assert all(printed.get(*key) == -value for key, value in b.values.items())

    def test_collapsed_edge_is_located(self, sampler):
        data = sampler.sample_cube_data(0, 3, rng=3)
        X = data.get((0, 0, 0))
        net = QNet(2, 0, 3, {(0, 0): X, (1, 0): X, (0, 1): data.get((0, 1, 0)), (1, 1): data.get((1, 1, 0))})
        plane = Subspace(RationalMatrix.identity(4).select_rows(0, 3))
        with pytest.raises(DegenerateSlice) as err:
            slice_qnet(net, plane)
        assert err.value.location == {'n': (0, 0), 'axis': 0}

    def test_wrong_codimension(self, sampler):
        net = sampler.sample_cube_data(0, 3, rng=3)
        with pytest.raises(DegenerateSlice):
            slice_qnet(net, Subspace(RationalMatrix.identity(4).select_rows(0, 2)))

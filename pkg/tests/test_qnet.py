import pytest

from core.errors import AmbientMismatch, DegenerateInput, Inconsistent, MissingVertex, NotClosed, UnderDetermined
from core.grassmann import Subspace, contains, join
from core.lattice import Region, shift
from core.linalg import RationalMatrix
from engine.qnet import (
    QNet,
    QNetPropagator,
    check_4d_consistency,
    check_square,
    consistency_report,
    cube_inputs,
    propagate_cube,
    propagate_cube_with_ledger,
    propagate_net,
    square_dim,
    sweep_squares,
)


def P(*coords):
    return Subspace(RationalMatrix([list(coords)]))


@pytest.fixture
def planar_square():
    return QNet(2, 0, 3, {
        (0, 0): P(0, 0, 0, 1),
        (1, 0): P(1, 0, 0, 1),
        (0, 1): P(0, 1, 0, 1),
        (1, 1): P(2, 3, 0, 1),
    })


class TestQNet:
    def test_missing_vertex(self, planar_square):
        with pytest.raises(MissingVertex) as err:
            planar_square.get((5, 5))
        assert err.value.location == (5, 5)
        assert isinstance(err.value, KeyError)

    def test_rejects_wrong_ambient(self, planar_square):
        with pytest.raises(AmbientMismatch):
            planar_square.set((2, 0), P(1, 0, 1))

    def test_rejects_wrong_rank(self, planar_square):
        with pytest.raises(DegenerateInput):
            planar_square.set((2, 0), Subspace.full(4))

    def test_restrict_and_copy(self, planar_square):
        small = planar_square.restrict([(0, 0), (1, 0)])
        assert len(small) == 2 and (1, 1) not in small
        clone = planar_square.copy()
        clone.set((2, 0), P(5, 0, 0, 1))
        assert (2, 0) not in planar_square


class TestSquares:
    def test_planar(self, planar_square):
        assert square_dim(planar_square, (0, 0), 0, 1) == 2
        assert check_square(planar_square, (0, 0), 0, 1)

    def test_non_planar(self, planar_square):
        planar_square.set((1, 1), P(1, 1, 1, 1))
        assert square_dim(planar_square, (0, 0), 0, 1) == 3
        checks = sweep_squares(planar_square)
        assert len(checks) == 1 and not checks[0].passed


class TestCube:
    def test_generic_cube(self, sampler, unit_cube):
        for seed in range(3):
            data = sampler.sample_cube_data(0, 3, rng=seed)
            X123, ledger = propagate_cube_with_ledger(*cube_inputs(data, (0, 0, 0), (0, 1, 2)))
            assert ledger.generic and not ledger.stationary
            net = data.copy()
            net.set((1, 1, 1), X123)
            assert all(c.passed for c in sweep_squares(net, unit_cube))

    def test_higher_rank_cube(self, sampler, unit_cube):
        data = sampler.sample_cube_data(1, 7, rng=11)
        X123, ledger = propagate_cube_with_ledger(*cube_inputs(data, (0, 0, 0), (0, 1, 2)))
        assert X123.projective_dim == 1
        assert ledger.dim_V == 7
        assert ledger.pairwise_meet_dims == (3, 3, 3)

    def test_output_lies_in_every_upper_face(self, sampler):
        data = sampler.sample_cube_data(0, 3, rng=5)
        X, X1, X2, X3, X12, X13, X23 = cube_inputs(data, (0, 0, 0), (0, 1, 2))
        X123 = propagate_cube(X, X1, X2, X3, X12, X13, X23)
        assert contains(join([X1, X12, X13]), X123)
        assert contains(join([X2, X12, X23]), X123)
        assert contains(join([X3, X13, X23]), X123)

    def test_axis_relabeling(self, sampler):
        data = sampler.sample_cube_data(0, 3, rng=8)
        X, X1, X2, X3, X12, X13, X23 = cube_inputs(data, (0, 0, 0), (0, 1, 2))
        assert propagate_cube(X, X1, X2, X3, X12, X13, X23) == propagate_cube(X, X3, X2, X1, X23, X13, X12)

    def test_stationary_cube(self):
        X = P(1, 2, 3, 1)
        result, ledger = propagate_cube_with_ledger(*([X] * 7))
        assert result == X and ledger.stationary

    def test_repeated_input_is_located(self, sampler):
        data = sampler.sample_cube_data(0, 3, rng=2)
        X, X1, X2, X3, X12, X13, X23 = cube_inputs(data, (0, 0, 0), (0, 1, 2))
        with pytest.raises(DegenerateInput) as err:
            propagate_cube(X, X, X2, X3, X12, X13, X23, location={'n': (0, 0, 0), 'axes': (0, 1, 2)})
        assert err.value.location == {'n': (0, 0, 0), 'axes': (0, 1, 2)}

    @pytest.mark.parametrize('r', [0, 1])
    def test_repeated_face_corner_is_rejected(self, sampler, r):
        data = sampler.sample_cube_data(r, 4 * r + 3, rng=11)
        X, X1, X2, X3, X12, X13, X23 = cube_inputs(data, (0, 0, 0), (0, 1, 2))
        with pytest.raises(DegenerateInput, match="three corners"):
            propagate_cube(X, X1, X2, X3, X1, X13, X23, location=(0, 0, 0))
        with pytest.raises(DegenerateInput, match="three corners"):
            propagate_cube(X, X, X2, X3, X12, X13, X23)

    def test_ambient_too_small(self):
        pts = [P(1, 0, 1), P(0, 1, 1), P(1, 1, 1), P(2, 0, 1), P(0, 2, 1), P(3, 1, 1), P(1, 3, 1)]
        with pytest.raises(DegenerateInput):
            propagate_cube(*pts)


class TestPropagation:
    def test_box_is_filled_and_planar(self, sampler):
        region = Region((2, 2, 2))
        walls = sampler.sample_qnet_walls(3, 0, 3, region, rng=3)
        assert len(walls) == 19
        try:
            net = propagate_net(walls, region)
        except (DegenerateInput, Inconsistent):
            pytest.skip("degenerate wall sample")
        assert len(net) == 27
        assert all(c.passed for c in sweep_squares(net, region))

    def test_order_and_threads_agree(self, sampler):
        region = Region((2, 2, 2))
        net = sampler.sample_propagated_net(3, 0, 3, region, rng=4)
        walls = net.restrict(region.wall_vertices())
        reverse = propagate_net(walls, region, order='reverse')
        threaded = propagate_net(walls, region, workers=3)
        assert reverse.values == net.values == threaded.values

    def test_four_dimensional_box(self, sampler):
        region = Region((1, 1, 1, 1))
        net = sampler.sample_propagated_net(4, 0, 4, region, rng=6)
        first = QNetPropagator(axis_choice='first').propagate(net.restrict(region.wall_vertices()), region)
        last = QNetPropagator(axis_choice='last').propagate(net.restrict(region.wall_vertices()), region)
        assert first.get((1, 1, 1, 1)) == last.get((1, 1, 1, 1))

    def test_missing_wall_vertex(self, sampler, unit_cube):
        walls = sampler.sample_cube_data(0, 3, rng=1)
        del walls.values[(1, 1, 0)]
        with pytest.raises(MissingVertex):
            propagate_net(walls, unit_cube)

    def test_invalid_order(self):
        with pytest.raises(ValueError):
            QNetPropagator(order='random')


class TestFourDimensionalConsistency:
    @pytest.mark.parametrize("r", [0, 1])
    def test_candidates_agree(self, sampler, r):
        data = sampler.sample_hypercube_data(r, 5 * r + 4, rng=r + 30)
        rep = consistency_report(data)
        assert len(rep.candidates) == 4
        assert rep.consistent and rep.matches_v_meet
        assert rep.v_meet.projective_dim == r

    def test_rank_two(self, sampler):
        data = sampler.sample_hypercube_data(2, 14, rng=42)
        assert check_4d_consistency(data)
        rep = consistency_report(data)
        assert rep.matches_v_meet and all(c.projective_dim == 2 for c in rep.candidates)

    def test_needs_enough_room(self, sampler):
        data = sampler.sample_hypercube_data(0, 3, rng=1)
        with pytest.raises(DegenerateInput):
            check_4d_consistency(data)

    def test_needs_four_axes(self, sampler):
        with pytest.raises(ValueError):
            consistency_report(sampler.sample_cube_data(0, 4, rng=1))


def test_corrupted_vertex_fails_only_incident_squares(sampler):
    region = Region((2, 2))
    net = sampler.sample_qnet_walls(2, 0, 3, region, rng=17)
    assert all(c.passed for c in sweep_squares(net, region))
    net.set((1, 1), P(7, -3, 11, 1))
    failed = {(c.vertex, c.i, c.j) for c in sweep_squares(net, region) if not c.passed}
    assert failed == {((0, 0), 0, 1), ((1, 0), 0, 1), ((0, 1), 0, 1), ((1, 1), 0, 1)}


class TestSamplerRedraws:
    def test_degenerate_filter_result_is_redrawn(self, sampler):
        calls = []

        def flaky(net):
            calls.append(net)
            if len(calls) == 1:
                raise UnderDetermined("edge differences collapse")
            return True

        net = sampler.sample_propagated_net(3, 0, 3, Region((1, 1, 1)), rng=5, accept=flaky)
        assert len(calls) == 2 and net.get((1, 1, 1)) is not None
        assert sampler.stats.reasons.get('accept', 0) >= 1

    @pytest.mark.parametrize('error', [Inconsistent, NotClosed])
    def test_broken_identity_is_not_redrawn(self, sampler, error):
        def broken(net):
            raise error("identity fails", location=(0, 0, 0))

        with pytest.raises(error):
            sampler.sample_propagated_net(3, 0, 3, Region((1, 1, 1)), rng=5, accept=broken)

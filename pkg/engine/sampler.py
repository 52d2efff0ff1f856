"""
General-position sampler
Draws seeded integer data for Q-nets, slicing planes, potentials and Darboux
states. Every draw is redrawn until the exact rank conditions of the construction
it feeds hold; nothing is perturbed.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np

import config
from core.errors import DegeneracyError, DegenerateInput, Inconsistent, Singular, SingularDenominator
from core.grassmann import (
    SampleStats,
    Subspace,
    is_affine,
    join,
    make_rng,
    random_codim_plane,
    random_in_span,
    random_subspace,
)
from core.lattice import Region, shift
from core.linalg import RationalMatrix, is_invertible
from engine.coefficients import VertexField
from engine.darboux_net import EdgeNet, slice_qnet
from engine.darboux_system import DarbouxState, evolve
from engine.qnet import QNet, propagate_net

Seed = Union[int, np.random.Generator, None]


class _Restart(Exception):
    pass


_REDRAWABLE = (DegeneracyError, Singular)


def _reraise_violation(err: Exception) -> None:
    """Inconsistent results are reported, never redrawn."""
    if isinstance(err, Inconsistent):
        raise err


class GeneralPositionSampler:
    """Seeded generator of generic input data"""

    def __init__(self, bound: Optional[int] = None, span_bound: Optional[int] = None, max_redraws: Optional[int] = None):
        self.bound = bound or getattr(config, 'SAMPLE_ENTRY_BOUND', 10)
        self.span_bound = span_bound or getattr(config, 'SPAN_COEFFICIENT_BOUND', 5)
        self.max_redraws = max_redraws or getattr(config, 'MAX_SAMPLE_REDRAWS', 200)
        self.stats = SampleStats()

    # ========================================================================
    # Q-net wall data
    # ========================================================================

    def _draw_walls(self, N: int, r: int, d: int, region: Region, rng: np.random.Generator) -> QNet:
        net = QNet(N, r, d)
        k = r + 1
        for v in region.wall_vertices():
            nonzero = [a for a, x in enumerate(region.offset(v)) if x]
            if not nonzero:
                X = random_subspace(d + 1, k, rng, self.bound, self.stats)
            elif len(nonzero) == 1:
                prev = net.get(shift(v, nonzero[0], step=-1))
                X = random_subspace(
                    d + 1, k, rng, self.bound, self.stats,
                    accept=lambda c, prev=prev: join([prev, c]).vector_dim == 2 * k,
                )
            else:
                i, j = nonzero
                m = shift(v, i, j, step=-1)
                X0, Xi, Xj = net.get(m), net.get(shift(m, i)), net.get(shift(m, j))
                span = join([X0, Xi, Xj])
                if span.vector_dim != 3 * k:
                    raise _Restart()

                def generic(c, X0=X0, Xi=Xi, Xj=Xj):
                    return all(join([p, q, c]).vector_dim == 3 * k for p, q in ((X0, Xi), (X0, Xj), (Xi, Xj)))

                X = random_in_span(span, k, rng, self.span_bound, self.stats, accept=generic)
            net.set(v, X)
        return net

    def sample_qnet_walls(self, N: int, r: int, d: int, region: Region, rng: Seed = None) -> QNet:
        """Vertices with at most two nonzero offsets, every wall square planar and generic."""
        if region.N != N:
            raise ValueError(f"region is {region.N}-dimensional, expected {N}")
        rng = make_rng(rng)
        for _ in range(self.max_redraws):
            try:
                return self._draw_walls(N, r, d, region, rng)
            except (_Restart, DegenerateInput):
                self.stats.reject('wall')
        raise DegenerateInput(f"no generic wall data after {self.max_redraws} redraws")

    def sample_cube_data(self, r: int, d: int, rng: Seed = None) -> QNet:
        """Seven generic inputs of a unit cube (N = 3)."""
        return self.sample_qnet_walls(3, r, d, Region((1, 1, 1)), rng)

    def sample_hypercube_data(self, r: int, d: int, rng: Seed = None) -> QNet:
        """Eleven generic inputs X, X_i, X_ij of a unit 4-cube."""
        return self.sample_qnet_walls(4, r, d, Region((1, 1, 1, 1)), rng)

    def sample_propagated_net(
        self,
        N: int,
        r: int,
        d: int,
        region: Region,
        rng: Seed = None,
        accept: Optional[Callable[[QNet], bool]] = None,
        **propagation,
    ) -> QNet:
        """Wall data that propagates without degeneracy, with every vertex in the affine chart."""
        rng = make_rng(rng)
        for _ in range(self.max_redraws):
            walls = self.sample_qnet_walls(N, r, d, region, rng)
            try:
                net = propagate_net(walls, region, **propagation)
            except _REDRAWABLE as e:
                _reraise_violation(e)
                self.stats.reject('propagation')
                continue
            if not all(is_affine(X) for X in net.values.values()):
                self.stats.reject('chart')
                continue
            try:
                if accept is not None and not accept(net):
                    self.stats.reject('accept')
                    continue
            except _REDRAWABLE as e:
                _reraise_violation(e)
                self.stats.reject('accept')
                continue
            return net
        raise DegenerateInput(f"no propagatable sample after {self.max_redraws} redraws")

    # ========================================================================
    # Slicing planes
    # ========================================================================

    def sample_slicing_plane(
        self,
        net: QNet,
        rng: Seed = None,
        region: Optional[Region] = None,
        accept: Optional[Callable[[EdgeNet], bool]] = None,
    ) -> Tuple[Subspace, EdgeNet]:
        """Random plane of codimension r+1 generic with respect to every edge of the net."""
        rng = make_rng(rng)
        for _ in range(self.max_redraws):
            plane = random_codim_plane(net.d + 1, net.r + 1, rng, self.bound, self.stats)
            try:
                edges = slice_qnet(net, plane, region)
            except _REDRAWABLE as e:
                _reraise_violation(e)
                self.stats.reject('slice')
                continue
            if not all(is_affine(X) for X in edges.values.values()):
                self.stats.reject('chart')
                continue
            try:
                if accept is not None and not accept(edges):
                    self.stats.reject('accept')
                    continue
            except _REDRAWABLE as e:
                _reraise_violation(e)
                self.stats.reject('accept')
                continue
            return plane, edges
        raise DegenerateInput(f"no generic slicing plane after {self.max_redraws} redraws")

    # ========================================================================
    # Matrices and potentials
    # ========================================================================

    def random_integer_matrix(self, size: int, rng: Seed = None, bound: Optional[int] = None) -> RationalMatrix:
        rng = make_rng(rng)
        bound = bound or self.bound
        entries = rng.integers(-bound, bound + 1, size=(size, size)).tolist()
        return RationalMatrix([[int(x) for x in row] for row in entries], ncols=size)

    def random_invertible(self, size: int, rng: Seed = None, bound: Optional[int] = None) -> RationalMatrix:
        rng = make_rng(rng)
        for _ in range(self.max_redraws):
            m = self.random_integer_matrix(size, rng, bound)
            if is_invertible(m):
                return m
            self.stats.reject('singular')
        raise DegenerateInput("no invertible matrix drawn")

    def random_potential(self, N: int, r: int, region: Region, rng: Seed = None, bound: Optional[int] = None) -> VertexField:
        """Invertible (r+1)×(r+1) integer matrices on every vertex of the region."""
        rng = make_rng(rng)
        h = VertexField(N, r)
        for n in region.vertices():
            h.set(n, self.random_invertible(r + 1, rng, bound))
        return h

    def random_small_matrix(self, size: int, rng: Seed = None) -> RationalMatrix:
        """Entries p/10 with |p| <= 5, i.e. in [-1/2, 1/2]."""
        rng = make_rng(rng)
        num = getattr(config, 'DARBOUX_NUMERATOR_BOUND', 5)
        den = getattr(config, 'DARBOUX_DENOMINATOR', 10)
        entries = rng.integers(-num, num + 1, size=(size, size)).tolist()
        return RationalMatrix([[Fraction(int(x), den) for x in row] for row in entries], ncols=size)

    # ========================================================================
    # Darboux states
    # ========================================================================

    def sample_darboux_corner(self, N: int, r: int, rng: Seed = None) -> Dict[Tuple[int, int], RationalMatrix]:
        """b^{pq} for every ordered pair of N axes at one corner."""
        rng = make_rng(rng)
        return {(p, q): self.random_small_matrix(r + 1, rng) for p, q in permutations(range(N), 2)}

    def sample_darboux_state(
        self, N: int, r: int, region: Region, rng: Seed = None, check: bool = True
    ) -> Tuple[DarbouxState, int]:
        """Random wall data; redrawn while evolution over the region hits a singular denominator.

        Returns the state and the number of redraws.
        """
        rng = make_rng(rng)
        limit = getattr(config, 'DARBOUX_MAX_REDRAWS', 50)
        redraws = 0
        while True:
            state = DarbouxState(N, r)
            for n, i, j in region.wall_plaquettes():
                state.set(n, i, j, self.random_small_matrix(r + 1, rng))
            if not check:
                return state, redraws
            try:
                evolve(state, region)
                return state, redraws
            except SingularDenominator:
                redraws += 1
                self.stats.reject('denominator')
                if redraws > limit:
                    raise


# Singleton
_sampler = None

def get_sampler() -> GeneralPositionSampler:
    """Get sampler instance"""
    global _sampler
    if _sampler is None:
        _sampler = GeneralPositionSampler()
    return _sampler

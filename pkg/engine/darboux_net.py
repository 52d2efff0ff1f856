"""
Darboux net engine
Edge-valued r-planes whose four sides per square lie in a (2r+1)-plane:
coefficients r^{ij}, potentials s^i, rotation coefficients, and construction
by slicing a Q-net with a plane of codimension r+1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from core.errors import (
    AmbientMismatch,
    DegenerateInput,
    DegenerateSlice,
    Inconsistent,
    MissingEdge,
    NoSolution,
    NotAffine,
    NotClosed,
    Singular,
    UnderDetermined,
)
from core.grassmann import Subspace, affine_matrix, join, meet, projective_dim
from core.lattice import Region, Vertex, shift
from core.linalg import RationalMatrix, inverse, rank, solve_right
from engine.coefficients import EdgeField, PlaquetteField, check_aa, lame_from_a


@dataclass
class EdgeNet:
    """Partial map from edges (n, i) of Z^N to G^d_r."""

    N: int
    r: int
    d: int
    values: Dict[Tuple[Vertex, int], Subspace] = field(default_factory=dict)

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"an edge net needs N >= 2, got {self.N}")
        for (n, i), X in list(self.values.items()):
            self._validate(n, i, X)

    def _validate(self, n: Vertex, i: int, X: Subspace) -> None:
        if len(n) != self.N or not 0 <= i < self.N:
            raise ValueError(f"edge {n},{i} is not an edge of Z^{self.N}")
        if X.ambient_dim != self.d + 1:
            raise AmbientMismatch("edge plane lives in another space", location={'n': n, 'axis': i})
        if X.projective_dim != self.r:
            raise DegenerateInput(
                f"edge plane has dim {X.projective_dim}, expected {self.r}", location={'n': n, 'axis': i}
            )

    def get(self, n: Sequence[int], i: int) -> Subspace:
        key = (tuple(n), int(i))
        try:
            return self.values[key]
        except KeyError:
            raise MissingEdge("edge not stored", location={'n': key[0], 'axis': i}) from None

    def set(self, n: Sequence[int], i: int, X: Subspace) -> None:
        key = (tuple(n), int(i))
        self._validate(key[0], key[1], X)
        self.values[key] = X

    def has(self, n: Sequence[int], i: int) -> bool:
        return (tuple(n), int(i)) in self.values

    def __len__(self) -> int:
        return len(self.values)

    def edges(self) -> List[Tuple[Vertex, int]]:
        return sorted(self.values, key=lambda k: (sum(k[0]), k))


class EdgeSquareCheck(NamedTuple):
    vertex: Vertex
    i: int
    j: int
    dim: int
    passed: bool


def _square_sides(net: EdgeNet, n: Sequence[int], i: int, j: int) -> List[Subspace]:
    return [net.get(n, i), net.get(n, j), net.get(shift(n, j), i), net.get(shift(n, i), j)]


def edge_square_dim(net: EdgeNet, n: Sequence[int], i: int, j: int) -> int:
    return join(_square_sides(net, n, i, j)).projective_dim


def check_edge_square(net: EdgeNet, n: Sequence[int], i: int, j: int) -> bool:
    return edge_square_dim(net, n, i, j) <= 2 * net.r + 1


def _stored_squares(net: EdgeNet):
    for n, i in net.edges():
        for j in range(i + 1, net.N):
            if net.has(n, j) and net.has(shift(n, j), i) and net.has(shift(n, i), j):
                yield n, i, j


def edge_sweep(net: EdgeNet, region: Optional[Region] = None) -> List[EdgeSquareCheck]:
    squares = region.squares() if region is not None else _stored_squares(net)
    out = []
    for n, i, j in squares:
        dim = edge_square_dim(net, n, i, j)
        out.append(EdgeSquareCheck(n, i, j, dim, dim <= 2 * net.r + 1))
    return out


def check_cube_span(net: EdgeNet, n: Sequence[int], i: int, j: int, k: int) -> bool:
    """The twelve edge planes of an elementary cube lie in a (3r+2)-plane."""
    planes = []
    for a in (i, j, k):
        b, c = [x for x in (i, j, k) if x != a]
        for corner in (tuple(n), shift(n, b), shift(n, c), shift(n, b, c)):
            planes.append(net.get(corner, a))
    return join(planes).projective_dim <= 3 * net.r + 2


# ============================================================================
# Coefficients r^{ij} and potentials s^i
# ============================================================================

def edge_affine(net: EdgeNet, n: Sequence[int], i: int) -> RationalMatrix:
    try:
        return affine_matrix(net.get(n, i))
    except NotAffine:
        raise NotAffine("edge plane is not in the affine chart", location={'n': tuple(n), 'axis': i}) from None


def extract_r(net: EdgeNet, n: Sequence[int], i: int, j: int) -> RationalMatrix:
    """The unique r^{ij} with x^i_j = r^{ij} x^i + (I − r^{ij}) x^j."""
    location = {'n': tuple(n), 'axes': (i, j)}
    xi = edge_affine(net, n, i)
    xj = edge_affine(net, n, j)
    xij = edge_affine(net, shift(n, j), i)
    diff = xi - xj
    if rank(diff) != net.r + 1:
        raise UnderDetermined("side planes x^i and x^j are not independent", location=location)
    try:
        return solve_right(diff, xij - xj)
    except NoSolution:
        raise Inconsistent("square sides do not lie in a (2r+1)-plane", location=location) from None


def r_field_from_net(net: EdgeNet, region: Region) -> PlaquetteField:
    field_ = PlaquetteField(net.N, net.r)
    for n, i, j in region.squares():
        field_.set(n, i, j, extract_r(net, n, i, j))
        field_.set(n, j, i, extract_r(net, n, j, i))
    return field_


def check_r_closedness(r_field: PlaquetteField, n: Sequence[int], i: int, j: int, k: int) -> bool:
    """r^{ij}(n+e_k) r^{ik}(n) == r^{ik}(n+e_j) r^{ij}(n)."""
    return check_aa(r_field, n, i, j, k)


def potentials_s(r_field: PlaquetteField, region: Region) -> EdgeField:
    """s^i with r^{ij} = s^i_j (s^i)^{-1}, gauge-fixed to I on the i-line through the origin."""
    for n, i, j, k in region.cubes():
        for p, q, s in ((i, j, k), (j, i, k), (k, i, j)):
            if not check_r_closedness(r_field, n, p, q, s):
                raise NotClosed("r-coefficients are not closed", location={'n': n, 'axes': (p, q, s)})
    return lame_from_a(r_field, region)


def rotation_coeffs_darboux(s: EdgeField, region: Optional[Region] = None, printed_sign: bool = False) -> PlaquetteField:
    """b^{ij} = ((s^i_j)^{-1} − (s^i)^{-1}) s^j, or its negative with ``printed_sign``.

    The default sign makes y^i = (s^i)^{-1} x^i solve y^i_j = y^i + b^{ij} y^j, so
    these coefficients evolve by the same map as the Q-net ones.
    """
    b = PlaquetteField(s.N, s.r)
    if region is not None:
        squares = list(region.squares())
    else:
        squares = [
            (n, i, j)
            for n, i in s.keys()
            for j in range(i + 1, s.N)
            if s.has(n, j) and s.has(shift(n, j), i) and s.has(shift(n, i), j)
        ]
    for n, i, j in squares:
        for p, q in ((i, j), (j, i)):
            try:
                inv_shifted = inverse(s.get(shift(n, q), p))
                inv_here = inverse(s.get(n, p))
            except Singular:
                raise Singular("potential is not invertible", location={'n': n, 'axes': (p, q)}) from None
            value = (inv_shifted - inv_here) @ s.get(n, q)
            b.set(n, p, q, -value if printed_sign else value)
    return b


def darboux_y_variables(net: EdgeNet, s: EdgeField) -> EdgeField:
    """y^i = (s^i)^{-1} x^i on every stored edge."""
    y = EdgeField(s.N, s.r)
    for n, i in s.keys():
        if not net.has(n, i):
            continue
        try:
            y.set(n, i, inverse(s.get(n, i)) @ edge_affine(net, n, i))
        except Singular:
            raise Singular("potential is not invertible", location={'n': n, 'axis': i}) from None
    return y


# ============================================================================
# Slicing a Q-net
# ============================================================================

def slice_qnet(net, plane: Subspace, region: Optional[Region] = None) -> EdgeNet:
    """X^i(n) = join(X(n), X(n+e_i)) ∩ Π for every edge of the net (or region)."""
    r, d = net.r, net.d
    if plane.ambient_dim != d + 1:
        raise AmbientMismatch(f"plane lives in Q^{plane.ambient_dim}, net in Q^{d + 1}")
    if plane.vector_dim != d - r:
        raise DegenerateSlice(f"slicing plane must have codimension {r + 1}, got {d + 1 - plane.vector_dim}")
    if region is not None:
        edges = list(region.edges())
    else:
        edges = [(n, i) for n in net.vertices() for i in range(net.N) if shift(n, i) in net]
    out = EdgeNet(net.N, r, d)
    for n, i in edges:
        location = {'n': n, 'axis': i}
        span = join([net.get(n), net.get(shift(n, i))])
        if span.projective_dim != 2 * r + 1:
            raise DegenerateSlice(f"edge spans dim {span.projective_dim}, expected {2 * r + 1}", location=location)
        point = meet(span, plane)
        if projective_dim(point) != r:
            raise DegenerateSlice(
                f"edge meets the plane in dim {projective_dim(point)}, expected {r}", location=location
            )
        out.set(n, i, point)
    return out


def cube_span_sweep(net: EdgeNet, region: Region) -> List[Tuple[Vertex, Tuple[int, int, int], bool]]:
    return [(n, (i, j, k), check_cube_span(net, n, i, j, k)) for n, i, j, k in region.cubes()]

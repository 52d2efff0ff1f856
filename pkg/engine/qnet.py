"""
Q-net engine
Stores vertex-valued r-planes on Z^N, propagates elementary cubes and checks
the four-dimensional consistency of the cube rule.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import config
from core.errors import (
    AmbientMismatch,
    ConfigError,
    DegenerateInput,
    DegenerateIntersection,
    Inconsistent,
    MissingVertex,
)
from core.grassmann import Subspace, join, meet, meet_all, projective_dim
from core.lattice import Region, Vertex, shift
from db.db import get_db


@dataclass
class QNet:
    """Partial map Z^N → G^d_r."""

    N: int
    r: int
    d: int
    values: Dict[Vertex, Subspace] = field(default_factory=dict)

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"a Q-net needs N >= 2, got {self.N}")
        if self.r < 0 or self.d < self.r:
            raise ValueError(f"invalid rank/dimension r={self.r} d={self.d}")
        for n, X in list(self.values.items()):
            self._validate(n, X)

    def _validate(self, n: Vertex, X: Subspace) -> None:
        if len(n) != self.N:
            raise ValueError(f"vertex {n} is not in Z^{self.N}")
        if X.ambient_dim != self.d + 1:
            raise AmbientMismatch(f"subspace lives in Q^{X.ambient_dim}, net in Q^{self.d + 1}", location=n)
        if X.projective_dim != self.r:
            raise DegenerateInput(f"stored plane has dim {X.projective_dim}, expected {self.r}", location=n)

    def get(self, n: Sequence[int]) -> Subspace:
        key = tuple(n)
        try:
            return self.values[key]
        except KeyError:
            raise MissingVertex("vertex not stored", location=key) from None

    def set(self, n: Sequence[int], X: Subspace) -> None:
        key = tuple(n)
        self._validate(key, X)
        self.values[key] = X

    def __contains__(self, n) -> bool:
        return tuple(n) in self.values

    def __len__(self) -> int:
        return len(self.values)

    def vertices(self) -> List[Vertex]:
        return sorted(self.values, key=lambda n: (sum(n), n))

    def copy(self) -> "QNet":
        return QNet(self.N, self.r, self.d, dict(self.values))

    def restrict(self, vertices) -> "QNet":
        keep = {tuple(v) for v in vertices}
        return QNet(self.N, self.r, self.d, {n: X for n, X in self.values.items() if n in keep})


# ============================================================================
# Squares
# ============================================================================

class SquareCheck(NamedTuple):
    vertex: Vertex
    i: int
    j: int
    dim: int
    passed: bool


def square_dim(net: QNet, n: Sequence[int], i: int, j: int) -> int:
    """Projective dimension of the join of the four vertices of a square."""
    corners = [net.get(n), net.get(shift(n, i)), net.get(shift(n, j)), net.get(shift(n, i, j))]
    return join(corners).projective_dim


def check_square(net: QNet, n: Sequence[int], i: int, j: int) -> bool:
    return square_dim(net, n, i, j) <= 3 * net.r + 2


def _stored_squares(net: QNet) -> Iterator[Tuple[Vertex, int, int]]:
    for n in net.vertices():
        for i, j in combinations(range(net.N), 2):
            if shift(n, i) in net and shift(n, j) in net and shift(n, i, j) in net:
                yield n, i, j


def sweep_squares(net: QNet, region: Optional[Region] = None) -> List[SquareCheck]:
    """Check every fully stored elementary square (of ``region`` when given)."""
    squares = region.squares() if region is not None else _stored_squares(net)
    out = []
    for n, i, j in squares:
        dim = square_dim(net, n, i, j)
        out.append(SquareCheck(n, i, j, dim, dim <= 3 * net.r + 2))
    return out


# ============================================================================
# Elementary cube
# ============================================================================

@dataclass(frozen=True)
class CubeLedger:
    """Every projective dimension asserted while propagating one cube."""

    r: int
    d: int
    dim_V: int
    face_dims_in: Tuple[int, int, int]
    pairwise_meet_dims: Tuple[int, int, int]
    triple_meet_dim: int
    face_dims_out: Tuple[int, int, int]
    stationary: bool = False

    @property
    def generic(self) -> bool:
        r = self.r
        return (
            self.dim_V == 4 * r + 3
            and all(x == 3 * r + 2 for x in self.face_dims_in)
            and all(x == 2 * r + 1 for x in self.pairwise_meet_dims)
            and self.triple_meet_dim == r
            and all(x == 3 * r + 2 for x in self.face_dims_out)
        )


def propagate_cube_with_ledger(
    X: Subspace,
    X1: Subspace,
    X2: Subspace,
    X3: Subspace,
    X12: Subspace,
    X13: Subspace,
    X23: Subspace,
    axes: Tuple[int, int, int] = (0, 1, 2),
    location=None,
    cross_check: Optional[bool] = None,
) -> Tuple[Subspace, CubeLedger]:
    """Unique X_123 with planar faces, together with its dimension ledger.

    X_123 is the meet of the three (3r+2)-planes span(X_i, X_ij, X_ik).
    """
    inputs = [X, X1, X2, X3, X12, X13, X23]
    r = X.projective_dim
    ambient = X.ambient_dim
    d = ambient - 1
    for Y in inputs[1:]:
        if Y.ambient_dim != ambient:
            raise AmbientMismatch("cube inputs live in different spaces", location=location)
        if Y.projective_dim != r:
            raise DegenerateInput("cube inputs have different ranks", location=location)

    if all(Y == X for Y in inputs[1:]):
        ledger = CubeLedger(r, d, r, (r, r, r), (r, r, r), r, (r, r, r), stationary=True)
        return X, ledger

    if d < 4 * r + 3:
        raise DegenerateInput(f"propagation needs d >= 4r+3, got d={d} r={r}", location=location)

    a, b, c = axes
    single = {a: X1, b: X2, c: X3}
    double = {(a, b): X12, (a, c): X13, (b, c): X23}

    def _pair(p, q):
        return double[(p, q) if (p, q) in double else (q, p)]

    faces_in = []
    for p, q in ((a, b), (a, c), (b, c)):
        corners = [X, single[p], single[q], _pair(p, q)]
        # any three corners of a generic face already span it
        for triple in combinations(corners, 3):
            dim = join(list(triple)).projective_dim
            if dim != 3 * r + 2:
                raise DegenerateInput(
                    f"three corners of face ({p},{q}) span dim {dim}, expected {3 * r + 2}", location=location
                )
        dim = join(corners).projective_dim
        if dim != 3 * r + 2:
            raise DegenerateInput(f"face ({p},{q}) spans dim {dim}, expected {3 * r + 2}", location=location)
        faces_in.append(dim)

    dim_V = join(inputs).projective_dim
    if dim_V != 4 * r + 3:
        raise DegenerateInput(f"cube spans dim {dim_V}, expected {4 * r + 3}", location=location)

    planes = []
    for p in (a, b, c):
        q, s = [x for x in (a, b, c) if x != p]
        P = join([single[p], _pair(p, q), _pair(p, s)])
        if P.projective_dim != 3 * r + 2:
            raise DegenerateInput(
                f"plane through vertex {p} spans dim {P.projective_dim}, expected {3 * r + 2}",
                location=location,
            )
        planes.append(P)

    pairwise = []
    pair_meets = {}
    for u, v in ((0, 1), (0, 2), (1, 2)):
        M = meet(planes[u], planes[v])
        dim = projective_dim(M)
        if dim != 2 * r + 1:
            raise DegenerateIntersection(
                f"planes {axes[u]},{axes[v]} meet in dim {dim}, expected {2 * r + 1}", location=location
            )
        pairwise.append(dim)
        pair_meets[(u, v)] = M

    result = meet_all(planes)
    triple_dim = projective_dim(result)
    if triple_dim != r:
        raise DegenerateIntersection(f"triple meet has dim {triple_dim}, expected {r}", location=location)

    if cross_check is None:
        cross_check = getattr(config, 'CROSS_CHECK_TRIPLE_MEET', True)
    if cross_check:
        for (u, v), M in pair_meets.items():
            third = ({0, 1, 2} - {u, v}).pop()
            if meet(M, planes[third]) != result:
                raise Inconsistent("pairwise-then-third meet disagrees with the triple meet", location=location)

    faces_out = []
    for p in (a, b, c):
        q, s = [x for x in (a, b, c) if x != p]
        dim = join([single[p], _pair(p, q), _pair(p, s), result]).projective_dim
        if dim != 3 * r + 2:
            raise DegenerateIntersection(
                f"output face through vertex {p} spans dim {dim}, expected {3 * r + 2}", location=location
            )
        faces_out.append(dim)

    ledger = CubeLedger(
        r=r,
        d=d,
        dim_V=dim_V,
        face_dims_in=tuple(faces_in),
        pairwise_meet_dims=tuple(pairwise),
        triple_meet_dim=triple_dim,
        face_dims_out=tuple(faces_out),
    )
    return result, ledger


def propagate_cube(X, X1, X2, X3, X12, X13, X23, axes=(0, 1, 2), location=None) -> Subspace:
    return propagate_cube_with_ledger(X, X1, X2, X3, X12, X13, X23, axes=axes, location=location)[0]


def cube_inputs(net: QNet, base: Sequence[int], axes: Tuple[int, int, int]) -> Tuple[Subspace, ...]:
    """The seven stored vertices of the cube at ``base`` spanned by ``axes``."""
    i, j, k = axes
    return (
        net.get(base),
        net.get(shift(base, i)),
        net.get(shift(base, j)),
        net.get(shift(base, k)),
        net.get(shift(base, i, j)),
        net.get(shift(base, i, k)),
        net.get(shift(base, j, k)),
    )


# ============================================================================
# Propagation over a region
# ============================================================================

class QNetPropagator:
    """Fills a box region from its wall data, layer by layer."""

    def __init__(self, workers: Optional[int] = None, order: Optional[str] = None, axis_choice: Optional[str] = None):
        self.workers = workers if workers is not None else getattr(config, 'PROPAGATION_WORKERS', 1)
        self.order = order or getattr(config, 'PROPAGATION_ORDER', 'lexicographic')
        self.axis_choice = axis_choice or getattr(config, 'PROPAGATION_AXIS_CHOICE', 'first')
        if self.order not in ('lexicographic', 'reverse'):
            raise ValueError(f"unknown order {self.order!r}")
        if self.axis_choice not in ('first', 'last'):
            raise ValueError(f"unknown axis choice {self.axis_choice!r}")

    def _cube_for(self, region: Region, v: Vertex) -> Tuple[Vertex, Tuple[int, int, int]]:
        nonzero = [k for k, x in enumerate(region.offset(v)) if x]
        axes = tuple(nonzero[:3] if self.axis_choice == 'first' else nonzero[-3:])
        return shift(v, *axes, step=-1), axes

    def _fill_vertex(self, net: QNet, region: Region, v: Vertex) -> Tuple[Vertex, Subspace]:
        base, axes = self._cube_for(region, v)
        location = {'n': base, 'axes': axes}
        X123 = propagate_cube(*cube_inputs(net, base, axes), axes=axes, location=location)
        return v, X123

    def propagate(self, initial: QNet, region: Region) -> QNet:
        if region.N != initial.N:
            raise ConfigError(f"region is {region.N}-dimensional, net is {initial.N}-dimensional")
        net = initial.copy()
        for v in region.wall_vertices():
            net.get(v)

        layers: Dict[int, List[Vertex]] = {}
        for v in region.vertices():
            if sum(1 for x in region.offset(v) if x) >= 3:
                layers.setdefault(region.level(v), []).append(v)

        for level in sorted(layers):
            todo = layers[level]
            if self.order == 'reverse':
                todo = list(reversed(todo))
            if self.workers > 1 and len(todo) > 1:
                with ThreadPoolExecutor(max_workers=self.workers) as pool:
                    results = list(pool.map(lambda v: self._fill_vertex(net, region, v), todo))
            else:
                results = [self._fill_vertex(net, region, v) for v in todo]
            for v, X in results:
                net.set(v, X)

        failed = [c for c in sweep_squares(net, region) if not c.passed]
        if failed:
            c = failed[0]
            raise Inconsistent(
                f"{len(failed)} squares not planar after propagation (dim {c.dim})",
                location={'n': c.vertex, 'axes': (c.i, c.j)},
            )

        if getattr(config, 'LEDGER_ENABLED', True):
            get_db().log('DEBUG', 'QNetPropagator', f"Propagated N={net.N} r={net.r} d={net.d} region {region}")
        return net


def propagate_net(
    initial: QNet,
    region: Region,
    order: Optional[str] = None,
    axis_choice: Optional[str] = None,
    workers: Optional[int] = None,
) -> QNet:
    return QNetPropagator(workers=workers, order=order, axis_choice=axis_choice).propagate(initial, region)


# ============================================================================
# Four-dimensional consistency
# ============================================================================

@dataclass(frozen=True)
class ConsistencyReport:
    r: int
    d: int
    triples: Dict[Tuple[int, int, int], Subspace]
    candidates: Tuple[Subspace, ...]
    v_meet: Optional[Subspace]
    consistent: bool
    matches_v_meet: bool


def consistency_report(initial: QNet) -> ConsistencyReport:
    """X_1234 computed four ways from the data X, X_i, X_ij on a unit 4-cube at the origin."""
    if initial.N != 4:
        raise ConfigError(f"4D consistency needs N=4, got {initial.N}")
    r, d = initial.r, initial.d
    if d < 5 * r + 4:
        raise DegenerateInput(f"4D consistency needs d >= 5r+4, got d={d} r={r}")
    o = (0, 0, 0, 0)

    def X(*axes):
        return initial.get(shift(o, *axes))

    triples = {}
    for i, j, k in combinations(range(4), 3):
        location = {'n': o, 'axes': (i, j, k)}
        triples[(i, j, k)] = propagate_cube(
            X(), X(i), X(j), X(k), X(i, j), X(i, k), X(j, k), axes=(i, j, k), location=location
        )

    def X3(*axes):
        return triples[tuple(sorted(axes))]

    candidates = []
    spans = []
    for l in range(4):
        i, j, k = [a for a in range(4) if a != l]
        location = {'n': shift(o, l), 'axes': (i, j, k)}
        candidates.append(
            propagate_cube(
                X(l), X(l, i), X(l, j), X(l, k), X3(l, i, j), X3(l, i, k), X3(l, j, k),
                axes=(i, j, k), location=location,
            )
        )
        spans.append(join([X(l), X(l, i), X(l, j), X(l, k)]))

    v_meet = meet_all(spans)
    consistent = all(c == candidates[0] for c in candidates[1:])
    return ConsistencyReport(
        r=r,
        d=d,
        triples=triples,
        candidates=tuple(candidates),
        v_meet=v_meet,
        consistent=consistent,
        matches_v_meet=v_meet is not None and all(c == v_meet for c in candidates),
    )


def check_4d_consistency(initial: QNet) -> bool:
    return consistency_report(initial).consistent


# Singleton
_propagator = None

def get_propagator() -> QNetPropagator:
    """Get propagator configured from config"""
    global _propagator
    if _propagator is None:
        _propagator = QNetPropagator()
    return _propagator

"""
Coefficient engine
Reads the noncommutative coefficients a^{ij} off a Q-net in affine normalization,
integrates closed multiplicative one-forms to Lamé coefficients h^i and builds
the rotation coefficients b^{ij} together with the y-variables of the linear problem.

Linear problem convention: y^i_j = y^i + b^{ij} y^j.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from core.errors import (
    Inconsistent,
    NotAffine,
    MissingEdge,
    MissingPlaquette,
    MissingVertex,
    NoSolution,
    NotClosed,
    Singular,
    UnderDetermined,
)
from core.grassmann import affine_matrix
from core.lattice import Region, Vertex, shift
from core.linalg import RationalMatrix, inverse, is_invertible, rank, solve_right, vstack


# ============================================================================
# Lattice fields
# ============================================================================

@dataclass
class LatticeField:
    """Sparse matrix-valued field on Z^N; subclasses fix the key shape."""

    N: int
    r: int
    values: Dict[tuple, RationalMatrix] = field(default_factory=dict)

    kind = 'field'
    _missing = KeyError

    def __post_init__(self):
        # Hook so the dataclass __init__ calls subclass __post_init__ checks.
        pass

    def _key(self, *args) -> tuple:
        raise NotImplementedError

    def get(self, *args) -> RationalMatrix:
        key = self._key(*args)
        try:
            return self.values[key]
        except KeyError:
            raise self._missing(f"no {self.kind} value", location=key) from None

    def set(self, *args) -> None:
        *key_args, value = args
        self.values[self._key(*key_args)] = value

    def has(self, *args) -> bool:
        return self._key(*args) in self.values

    def __len__(self) -> int:
        return len(self.values)

    def keys(self) -> List[tuple]:
        return sorted(self.values, key=lambda k: (sum(k[0]) if isinstance(k[0], tuple) else sum(k), k))

    def items(self):
        return [(k, self.values[k]) for k in self.keys()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeField):
            return NotImplemented
        return (self.kind, self.N, self.r, self.values) == (other.kind, other.N, other.r, other.values)


class PlaquetteField(LatticeField):
    """Matrices on ordered elementary squares (n, i, j), i ≠ j."""

    kind = 'plaquette'
    _missing = MissingPlaquette

    def _key(self, n, i, j) -> tuple:
        if i == j:
            raise ValueError("plaquette axes must differ")
        return (tuple(n), int(i), int(j))


class EdgeField(LatticeField):
    """Matrices on edges (n, i) from n to n+e_i."""

    kind = 'edge'
    _missing = MissingEdge

    def _key(self, n, i) -> tuple:
        return (tuple(n), int(i))


class VertexField(LatticeField):
    """Matrices on vertices (potentials)."""

    kind = 'vertex'
    _missing = MissingVertex

    def _key(self, n) -> tuple:
        return tuple(n)


# ============================================================================
# Coefficients a^{ij}
# ============================================================================

def vertex_affine(net, n: Sequence[int]) -> RationalMatrix:
    """Normalized representative of X(n); NotAffine carries the vertex."""
    try:
        return affine_matrix(net.get(n))
    except NotAffine:
        raise NotAffine("plane is not in the affine chart", location=tuple(n)) from None


def extract_a(net, n: Sequence[int], i: int, j: int) -> Tuple[RationalMatrix, RationalMatrix]:
    """The unique (a^{ij}, a^{ji}) with x_ij = x + a^{ij}(x_i − x) + a^{ji}(x_j − x)."""
    location = {'n': tuple(n), 'axes': (i, j)}
    x = vertex_affine(net, n)
    xi = vertex_affine(net, shift(n, i))
    xj = vertex_affine(net, shift(n, j))
    xij = vertex_affine(net, shift(n, i, j))
    system = vstack(xi - x, xj - x)
    k = net.r + 1
    if rank(system) != 2 * k:
        raise UnderDetermined(f"edge differences have rank {rank(system)}, expected {2 * k}", location=location)
    try:
        coeffs = solve_right(system, xij - x)
    except NoSolution:
        raise Inconsistent("square is not planar", location=location) from None
    return coeffs.columns(0, k), coeffs.columns(k, 2 * k)


def a_field_from_net(net, region: Region) -> PlaquetteField:
    field_ = PlaquetteField(net.N, net.r)
    for n, i, j in region.squares():
        a_ij, a_ji = extract_a(net, n, i, j)
        field_.set(n, i, j, a_ij)
        field_.set(n, j, i, a_ji)
    return field_


def check_aa(a: PlaquetteField, n: Sequence[int], i: int, j: int, k: int) -> bool:
    """a^{ij}(n+e_k) a^{ik}(n) == a^{ik}(n+e_j) a^{ij}(n)."""
    left = a.get(shift(n, k), i, j) @ a.get(n, i, k)
    right = a.get(shift(n, j), i, k) @ a.get(n, i, j)
    return left == right


def edge_form_for_axis(a: PlaquetteField, i: int) -> EdgeField:
    """{a^{ij}}_j as a one-form on the edges in the directions j ≠ i."""
    form = EdgeField(a.N, a.r)
    for (n, p, q), value in a.values.items():
        if p == i:
            form.set(n, q, value)
    return form


# ============================================================================
# Closed multiplicative one-forms
# ============================================================================

def check_closedness(a: EdgeField, n: Sequence[int], j: int, k: int) -> bool:
    """a^j(n+e_k) a^k(n) == a^k(n+e_j) a^j(n)."""
    left = a.get(shift(n, k), j) @ a.get(n, k)
    right = a.get(shift(n, j), k) @ a.get(n, j)
    return left == right


def _step(a: EdgeField, h: RationalMatrix, at: Vertex, axis: int, sign: int) -> Tuple[Vertex, RationalMatrix]:
    if sign > 0:
        form = a.get(at, axis)
        if not is_invertible(form):
            raise Singular("one-form value is not invertible", location={'n': at, 'axis': axis})
        return shift(at, axis), form @ h
    target = shift(at, axis, step=-1)
    form = a.get(target, axis)
    try:
        return target, inverse(form) @ h
    except Singular:
        raise Singular("one-form value is not invertible", location={'n': target, 'axis': axis}) from None


def transport(
    a: EdgeField,
    h_start: RationalMatrix,
    start: Sequence[int],
    steps: Iterable[Tuple[int, int]],
) -> RationalMatrix:
    """Carry a potential along an explicit path of (axis, ±1) steps."""
    at, h = tuple(start), h_start
    for axis, sign in steps:
        at, h = _step(a, h, at, axis, sign)
    return h


def integrate_potential(
    a: EdgeField,
    h0: RationalMatrix,
    base: Sequence[int],
    region: Region,
    axes: Optional[Sequence[int]] = None,
) -> VertexField:
    """Potential h with h(base) = h0 and a^j(n) = h(n+e_j) h(n)^{-1} on the region.

    Closedness is checked on every square first; afterwards every edge of the
    region is re-checked against the potential, so path independence is verified
    rather than assumed.
    """
    base = tuple(base)
    axes = tuple(sorted(axes)) if axes is not None else tuple(k for k in range(region.N) if region.extents[k] > 0)
    if not region.contains(base):
        raise ValueError(f"base {base} outside region {region}")
    if not is_invertible(h0):
        raise Singular("initial value of the potential is not invertible", location=base)

    for p in range(len(axes)):
        for q in range(p + 1, len(axes)):
            j, k = axes[p], axes[q]
            for n in region.cell_bases((j, k)):
                if not check_closedness(a, n, j, k):
                    raise NotClosed("one-form is not closed", location={'n': n, 'axes': (j, k)})

    h = VertexField(a.N, h0.nrows - 1)
    h.set(base, h0)
    queue = deque([base])
    while queue:
        at = queue.popleft()
        current = h.get(at)
        for axis in axes:
            for sign in (1, -1):
                target = shift(at, axis, step=sign)
                if not region.contains(target) or h.has(target):
                    continue
                _, value = _step(a, current, at, axis, sign)
                h.set(target, value)
                queue.append(target)

    for axis in axes:
        for n in region.cell_bases((axis,)):
            if h.get(shift(n, axis)) != a.get(n, axis) @ h.get(n):
                raise NotClosed("potential is path dependent", location={'n': n, 'axis': axis})
    return h


def closed_form_from_potential(h: VertexField, axes: Sequence[int], region: Region) -> EdgeField:
    """a^j(n) = h(n+e_j) h(n)^{-1} on every edge of the region along ``axes``."""
    form = EdgeField(h.N, h.r)
    for j in axes:
        for n in region.cell_bases((j,)):
            form.set(n, j, h.get(shift(n, j)) @ inverse(h.get(n)))
    return form


# ============================================================================
# Lamé and rotation coefficients
# ============================================================================

def lame_from_a(a: PlaquetteField, region: Region) -> EdgeField:
    """h^i with a^{ij} = h^i_j (h^i)^{-1}, normalized by h^i = I on the i-line through the origin."""
    lame = EdgeField(a.N, a.r)
    eye = RationalMatrix.identity(a.r + 1)
    for i in range(region.N):
        if region.extents[i] == 0:
            continue
        others = [k for k in range(region.N) if k != i and region.extents[k] > 0]
        form = edge_form_for_axis(a, i)
        for t in range(region.origin[i], region.origin[i] + region.extents[i]):
            base = tuple(t if k == i else region.origin[k] for k in range(region.N))
            sub = region.slice_through(base, others)
            potential = integrate_potential(form, eye, base, sub, axes=others)
            for n, value in potential.items():
                lame.set(n, i, value)
    return lame


def _squares_of(field_: EdgeField, region: Optional[Region]) -> List[Tuple[Vertex, int, int]]:
    if region is not None:
        return list(region.squares())
    out = []
    for n, i in field_.keys():
        for j in range(field_.N):
            if j <= i:
                continue
            if field_.has(n, j) and field_.has(shift(n, j), i) and field_.has(shift(n, i), j):
                out.append((n, i, j))
    return out


def rotation_coeffs(h: EdgeField, region: Optional[Region] = None) -> PlaquetteField:
    """b^{ij} = (h^i_j)^{-1} (h^j_i − h^j) on every square."""
    b = PlaquetteField(h.N, h.r)
    for n, i, j in _squares_of(h, region):
        for p, q in ((i, j), (j, i)):
            try:
                left = inverse(h.get(shift(n, q), p))
            except Singular:
                raise Singular("Lamé coefficient is not invertible", location={'n': shift(n, q), 'axis': p}) from None
            b.set(n, p, q, left @ (h.get(shift(n, p), q) - h.get(n, q)))
    return b


def y_variables(net, h: EdgeField) -> EdgeField:
    """y^i = (h^i)^{-1} (x_i − x), stored as (r+1)×(d+1) matrices."""
    y = EdgeField(h.N, h.r)
    for n, i in h.keys():
        if n not in net or shift(n, i) not in net:
            continue
        x = vertex_affine(net, n)
        xi = vertex_affine(net, shift(n, i))
        try:
            y.set(n, i, inverse(h.get(n, i)) @ (xi - x))
        except Singular:
            raise Singular("Lamé coefficient is not invertible", location={'n': n, 'axis': i}) from None
    return y


def linear_problem_residual(y: EdgeField, b: PlaquetteField, n: Sequence[int], i: int, j: int) -> RationalMatrix:
    """y^i_j − y^i − b^{ij} y^j; zero exactly when the linear problem holds."""
    return y.get(shift(n, j), i) - y.get(n, i) - b.get(n, i, j) @ y.get(n, j)


@dataclass
class CoefficientBundle:
    a: PlaquetteField
    h: EdgeField
    b: PlaquetteField
    y: EdgeField

    def residuals(self, region: Region) -> List[Tuple[Vertex, int, int, bool]]:
        out = []
        for n, i, j in region.squares():
            for p, q in ((i, j), (j, i)):
                out.append((n, p, q, linear_problem_residual(self.y, self.b, n, p, q).is_zero()))
        return out


def coefficient_pipeline(net, region: Region) -> CoefficientBundle:
    """net → a → h → b, y on a box region."""
    a = a_field_from_net(net, region)
    for n, i, j, k in _aa_checks(region):
        if not check_aa(a, n, i, j, k):
            raise NotClosed("relation a^{ij}_k a^{ik} = a^{ik}_j a^{ij} fails", location={'n': n, 'axes': (i, j, k)})
    h = lame_from_a(a, region)
    b = rotation_coeffs(h, region)
    y = y_variables(net, h)
    return CoefficientBundle(a=a, h=h, b=b, y=y)


def _aa_checks(region: Region):
    for n, i, j, k in region.cubes():
        for p, q, s in ((i, j, k), (j, i, k), (k, i, j)):
            yield n, p, q, s

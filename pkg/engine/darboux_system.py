"""
Discrete Darboux system
Evolves plaquette-valued rotation coefficients b^{ij} cube by cube with

    b^{ij}_k = (b^{ij} + b^{ik} b^{kj}) (I − b^{jk} b^{kj})^{-1}

and checks the multidimensional consistency of this map directly.
"""

from __future__ import annotations

from itertools import combinations, permutations
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

from core.errors import Inconsistent, MissingPlaquette, Singular, SingularDenominator
from core.lattice import Region, Vertex, shift
from core.linalg import RationalMatrix, inverse
from engine.coefficients import PlaquetteField

Pair = Tuple[int, int]
MapFn = Callable[..., RationalMatrix]


class DarbouxState(PlaquetteField):
    """Rotation coefficients on the plaquettes of Z^N, N >= 3."""

    def __post_init__(self):
        if self.N < 3:
            raise ValueError(f"the Darboux system needs N >= 3, got {self.N}")

    @classmethod
    def from_field(cls, field_: PlaquetteField) -> "DarbouxState":
        return cls(field_.N, field_.r, dict(field_.values))

    def copy(self) -> "DarbouxState":
        return DarbouxState(self.N, self.r, dict(self.values))

    def restrict(self, keys) -> "DarbouxState":
        keep = set(keys)
        return DarbouxState(self.N, self.r, {k: v for k, v in self.values.items() if k in keep})

    def corner(self, n: Sequence[int], axes: Sequence[int]) -> Dict[Pair, RationalMatrix]:
        """b^{pq}(n) for every ordered pair of ``axes``."""
        return {(p, q): self.get(n, p, q) for p, q in permutations(axes, 2)}


def _denominator(b_jk: RationalMatrix, b_kj: RationalMatrix, location) -> RationalMatrix:
    eye = RationalMatrix.identity(b_jk.nrows)
    try:
        return inverse(eye - b_jk @ b_kj)
    except Singular:
        raise SingularDenominator("I - b^{jk} b^{kj} is singular", location=location) from None


def darboux_map(b_ij, b_ik, b_kj, b_jk, location=None) -> RationalMatrix:
    """b^{ij}_k from the four rotation coefficients of the base corner."""
    return (b_ij + b_ik @ b_kj) @ _denominator(b_jk, b_kj, location)


def darboux_map_printed_sign(b_ij, b_ik, b_kj, b_jk, location=None) -> RationalMatrix:
    """Companion map obeyed by −b: (b^{ij} − b^{ik} b^{kj}) (I − b^{jk} b^{kj})^{-1}."""
    return (b_ij - b_ik @ b_kj) @ _denominator(b_jk, b_kj, location)


def step_cube(
    state: PlaquetteField,
    n: Sequence[int],
    axes: Tuple[int, int, int] = (0, 1, 2),
    map_fn: MapFn = darboux_map,
) -> Dict[Tuple[Vertex, int, int], RationalMatrix]:
    """The six shifted coefficients b^{pq}(n+e_s) of one cube.

    With the default map the outputs are checked against the coupled relations
    b^{ij}_k − b^{ik}_j b^{kj} = b^{ij} and −b^{ij}_k b^{jk} + b^{ik}_j = b^{ik}.
    """
    n = tuple(n)
    b = {(p, q): state.get(n, p, q) for p, q in permutations(axes, 2)}
    shifted: Dict[Tuple[Pair, int], RationalMatrix] = {}
    out = {}
    for p, q in permutations(axes, 2):
        s = next(x for x in axes if x not in (p, q))
        location = {'n': n, 'axes': (p, q, s)}
        value = map_fn(b[(p, q)], b[(p, s)], b[(s, q)], b[(q, s)], location=location)
        shifted[((p, q), s)] = value
        out[(shift(n, s), p, q)] = value

    if map_fn is darboux_map:
        for p in axes:
            q, s = [x for x in axes if x != p]
            for j, k in ((q, s), (s, q)):
                b_ij_k = shifted[((p, j), k)]
                b_ik_j = shifted[((p, k), j)]
                first = b_ij_k - b_ik_j @ b[(k, j)]
                second = -(b_ij_k @ b[(j, k)]) + b_ik_j
                if first != b[(p, j)] or second != b[(p, k)]:
                    raise Inconsistent("coupled relations fail for the cube outputs", location={'n': n, 'axes': axes})
    return out


# ============================================================================
# Lattice evolution
# ============================================================================

def evolve(
    state: PlaquetteField,
    region: Region,
    order: str = 'lexicographic',
    map_fn: MapFn = darboux_map,
) -> DarbouxState:
    """Fill every plaquette of the region from the wall data.

    Cubes are processed layer by layer (coordinate sum of the base). A plaquette
    reached by several cubes must come out identical each time.
    """
    if order not in ('lexicographic', 'reverse'):
        raise ValueError(f"unknown order {order!r}")
    if region.N != state.N:
        raise ValueError(f"region is {region.N}-dimensional, state is {state.N}-dimensional")
    out = DarbouxState.from_field(state)
    walls = set(region.wall_plaquettes())
    for key in walls:
        out.get(*key)

    layers: Dict[int, list] = {}
    for cube in region.cubes():
        layers.setdefault(region.level(cube[0]), []).append(cube)

    computed = set()
    for level in sorted(layers):
        cubes = sorted(layers[level], reverse=(order == 'reverse'))
        results = [step_cube(out, n, (i, j, k), map_fn=map_fn) for n, i, j, k in cubes]
        for (n, i, j, k), produced in zip(cubes, results):
            for key, value in produced.items():
                if key in computed or key in walls:
                    if out.get(*key) != value:
                        raise Inconsistent(
                            "plaquette reached by two cubes with different values",
                            location={'n': key[0], 'axes': key[1:]},
                        )
                    continue
                out.set(*key, value)
                computed.add(key)
    return out


# ============================================================================
# Multidimensional consistency of the map
# ============================================================================

def shift_state(b: Mapping[Pair, RationalMatrix], k: int, map_fn: MapFn = darboux_map) -> Dict[Pair, RationalMatrix]:
    """b^{pq}_k for every ordered pair (p, q) avoiding k."""
    axes = sorted({a for pair in b for a in pair})
    if k not in axes:
        raise ValueError(f"axis {k} not present in the corner data")
    out = {}
    for p, q in permutations([a for a in axes if a != k], 2):
        try:
            out[(p, q)] = map_fn(b[(p, q)], b[(p, k)], b[(k, q)], b[(q, k)], location={'axes': (p, q, k)})
        except KeyError as e:
            raise MissingPlaquette(f"corner data lacks pair {e.args[0]}") from None
    return out


def check_map_4d_consistency(b: Mapping[Pair, RationalMatrix], map_fn: MapFn = darboux_map) -> bool:
    """b^{ij}_{kl} computed by shifting along k then l agrees with l then k, for all i, j, k, l."""
    axes = sorted({a for pair in b for a in pair})
    if len(axes) < 4:
        raise ValueError("multidimensional consistency needs at least four axes")
    single = {k: shift_state(b, k, map_fn) for k in axes}
    for k, l in combinations(axes, 2):
        kl = shift_state(single[k], l, map_fn)
        lk = shift_state(single[l], k, map_fn)
        if kl != lk:
            return False
    return True


def corner_from_state(state: PlaquetteField, n: Optional[Sequence[int]] = None) -> Dict[Pair, RationalMatrix]:
    n = tuple(n) if n is not None else (0,) * state.N
    return {(p, q): state.get(n, p, q) for p, q in permutations(range(state.N), 2)}

"""Lattice plumbing: vertex tuples, unit shifts, box regions, squares and cubes.

Axes are 0-based. A region is a box: ``origin + [0, extent_i]`` along axis i,
so ``extents`` count cells, not vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, List, Sequence, Tuple

Vertex = Tuple[int, ...]


def unit(N: int, i: int) -> Vertex:
    return tuple(1 if k == i else 0 for k in range(N))


def shift(n: Sequence[int], *axes: int, step: int = 1) -> Vertex:
    """n + step·(e_a for a in axes); repeated axes add up."""
    out = list(n)
    for a in axes:
        out[a] += step
    return tuple(out)


def parse_vertex(text: str) -> Vertex:
    return tuple(int(x) for x in str(text).split(",") if x.strip() != "")


def format_vertex(n: Sequence[int]) -> str:
    return ",".join(str(x) for x in n)


@dataclass(frozen=True)
class Region:
    """Box of cells ``origin .. origin + extents`` (vertex coordinates inclusive)."""

    extents: Tuple[int, ...]
    origin: Tuple[int, ...] = ()

    def __post_init__(self):
        ext = tuple(int(e) for e in self.extents)
        if not ext or any(e < 0 for e in ext):
            raise ValueError(f"region extents must be non-negative, got {self.extents}")
        org = tuple(int(o) for o in self.origin) if self.origin else (0,) * len(ext)
        if len(org) != len(ext):
            raise ValueError("origin and extents differ in length")
        object.__setattr__(self, "extents", ext)
        object.__setattr__(self, "origin", org)

    @classmethod
    def parse(cls, text: str) -> "Region":
        """'2,2,2' or '2x2x2' → Region((2,2,2))."""
        parts = str(text).replace("x", ",").replace("×", ",").split(",")
        return cls(tuple(int(p) for p in parts if p.strip()))

    @property
    def N(self) -> int:
        return len(self.extents)

    def __str__(self) -> str:
        return "x".join(str(e) for e in self.extents)

    def contains(self, n: Sequence[int]) -> bool:
        return all(o <= x <= o + e for x, o, e in zip(n, self.origin, self.extents))

    def offset(self, n: Sequence[int]) -> Tuple[int, ...]:
        return tuple(x - o for x, o in zip(n, self.origin))

    def level(self, n: Sequence[int]) -> int:
        """Coordinate sum relative to the origin (the layer index)."""
        return sum(self.offset(n))

    def vertices(self) -> Iterator[Vertex]:
        """All vertices, in layer order then lexicographic."""
        ranges = [range(o, o + e + 1) for o, e in zip(self.origin, self.extents)]
        return iter(sorted(product(*ranges), key=lambda n: (self.level(n), n)))

    def cell_bases(self, axes: Sequence[int]) -> Iterator[Vertex]:
        """Base vertices n of cells spanned by ``axes`` with all corners inside."""
        axes = set(axes)
        ranges = [
            range(o, o + e) if k in axes else range(o, o + e + 1)
            for k, (o, e) in enumerate(zip(self.origin, self.extents))
        ]
        return iter(sorted(product(*ranges), key=lambda n: (self.level(n), n)))

    def squares(self) -> Iterator[Tuple[Vertex, int, int]]:
        """(n, i, j) with i < j for every elementary square in the box."""
        for i, j in combinations(range(self.N), 2):
            for n in self.cell_bases((i, j)):
                yield n, i, j

    def cubes(self) -> Iterator[Tuple[Vertex, int, int, int]]:
        for i, j, k in combinations(range(self.N), 3):
            for n in self.cell_bases((i, j, k)):
                yield n, i, j, k

    def edges(self) -> Iterator[Tuple[Vertex, int]]:
        for i in range(self.N):
            for n in self.cell_bases((i,)):
                yield n, i

    def wall_vertices(self) -> List[Vertex]:
        """Cauchy data of a 3D vertex rule: vertices with at most two nonzero offsets."""
        return [n for n in self.vertices() if sum(1 for x in self.offset(n) if x) <= 2]

    def wall_plaquettes(self) -> List[Tuple[Vertex, int, int]]:
        """Cauchy data of a 3D plaquette rule: (n, i, j) with n_k at the origin off the (i,j)-plane.

        Both orderings (i, j) and (j, i) are listed.
        """
        out = []
        for n, i, j in self.squares():
            if all(x == 0 for k, x in enumerate(self.offset(n)) if k not in (i, j)):
                out.append((n, i, j))
                out.append((n, j, i))
        return out

    def slice_through(self, base: Sequence[int], axes: Sequence[int]) -> "Region":
        """Sub-box through ``base`` that only extends along ``axes``."""
        axes = set(axes)
        origin = tuple(o if k in axes else b for k, (o, b) in enumerate(zip(self.origin, base)))
        extents = tuple(e if k in axes else 0 for k, e in enumerate(self.extents))
        return Region(extents, origin)


def ordered_pairs(axes: Sequence[int]) -> List[Tuple[int, int]]:
    return [(i, j) for i in axes for j in axes if i != j]

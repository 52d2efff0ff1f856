"""Grassmannian points as exact subspaces of Q^(d+1).

A ``Subspace`` of vector dimension r+1 in Q^(d+1) is an r-plane of P^d. Equality
is basis-independent (compared through the reduced row echelon basis).

General position is never perturbed into existence: samplers redraw until every
rank condition holds exactly, and constructions raise typed errors otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

import config
from core.errors import AmbientMismatch, DegenerateInput, NotAffine
from core.linalg import (
    RationalMatrix,
    hstack,
    inverse,
    is_invertible,
    nullspace,
    rank,
    rref,
    vstack,
)


class Subspace:
    """Row span of a full-row-rank rational matrix."""

    __slots__ = ("basis", "_canonical")

    def __init__(self, basis: Union[RationalMatrix, Sequence[Sequence]]):
        if not isinstance(basis, RationalMatrix):
            basis = RationalMatrix(basis)
        if basis.nrows < 1:
            raise ValueError("a subspace needs at least one basis row")
        if rank(basis) != basis.nrows:
            raise ValueError(f"basis of {basis.nrows} rows is not of full row rank")
        self.basis = basis
        self._canonical: Optional[Tuple] = None

    @classmethod
    def span(cls, rows: Union[RationalMatrix, Sequence[Sequence]]) -> Optional["Subspace"]:
        """Span of possibly dependent rows; None for the zero subspace."""
        m = rows if isinstance(rows, RationalMatrix) else RationalMatrix(rows)
        reduced, _ = rref(m)
        if not reduced:
            return None
        return cls(RationalMatrix(reduced, ncols=m.ncols))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(RationalMatrix.identity(ambient_dim))

    @property
    def ambient_dim(self) -> int:
        return self.basis.ncols

    @property
    def vector_dim(self) -> int:
        return self.basis.nrows

    @property
    def projective_dim(self) -> int:
        return self.basis.nrows - 1

    def canonical(self) -> Tuple:
        if self._canonical is None:
            rows, _ = rref(self.basis)
            self._canonical = tuple(tuple(row) for row in rows)
        return self._canonical

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.canonical()))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.projective_dim} in P^{self.ambient_dim - 1})"

    # -- text form ---------------------------------------------------------

    def to_record(self) -> Dict:
        return {"ambient_dim": self.ambient_dim, "rows": self.basis.to_text_rows()}

    @classmethod
    def from_record(cls, record: Dict) -> "Subspace":
        ambient = int(record["ambient_dim"])
        return cls(RationalMatrix.from_text_rows(record["rows"], ncols=ambient))


@dataclass(frozen=True)
class AffineRep:
    """Normalized representative [block | I] with I in the last r+1 columns."""

    r: int
    d: int
    block: Optional[RationalMatrix]  # (r+1)×(d−r); None when d == r

    def expand(self) -> RationalMatrix:
        eye = RationalMatrix.identity(self.r + 1)
        if self.block is None:
            return eye
        return hstack(self.block, eye)


# ============================================================================
# Operations
# ============================================================================

def _same_ambient(subspaces: Sequence[Subspace]) -> int:
    if not subspaces:
        raise ValueError("need at least one subspace")
    ambient = subspaces[0].ambient_dim
    for s in subspaces[1:]:
        if s.ambient_dim != ambient:
            raise AmbientMismatch(f"ambient dimensions {ambient} and {s.ambient_dim}")
    return ambient


def join(subspaces: Iterable[Subspace]) -> Subspace:
    """Span of the union of the operands."""
    subspaces = list(subspaces)
    _same_ambient(subspaces)
    if len(subspaces) == 1:
        return subspaces[0]
    return Subspace.span(vstack(*(s.basis for s in subspaces)))


def meet(u: Subspace, v: Subspace) -> Optional[Subspace]:
    """Exact intersection; None when it is {0}.

    Solves α·U = β·V through the nullspace of [U; V]ᵀ and rebuilds the
    intersection from the α-part.
    """
    _same_ambient([u, v])
    kernel = nullspace(vstack(u.basis, v.basis).transpose())
    if kernel.nrows == 0:
        return None
    alpha = kernel.columns(0, u.vector_dim)
    return Subspace(alpha @ u.basis)


def meet_all(subspaces: Sequence[Subspace]) -> Optional[Subspace]:
    """Simultaneous intersection of several subspaces in one nullspace solve."""
    subspaces = list(subspaces)
    ambient = _same_ambient(subspaces)
    if len(subspaces) == 1:
        return subspaces[0]
    first = subspaces[0]
    sizes = [s.vector_dim for s in subspaces]
    block_rows = []
    for m in range(1, len(subspaces)):
        blocks = []
        for l, s in enumerate(subspaces):
            if l == 0:
                blocks.append(first.basis.transpose())
            elif l == m:
                blocks.append(-s.basis.transpose())
            else:
                blocks.append(RationalMatrix.zeros(ambient, sizes[l]))
        block_rows.append(hstack(*blocks))
    kernel = nullspace(vstack(*block_rows))
    if kernel.nrows == 0:
        return None
    alpha = kernel.columns(0, sizes[0])
    return Subspace(alpha @ first.basis)


def projective_dim(u: Optional[Subspace]) -> int:
    """Projective dimension; −1 for the empty intersection."""
    if u is None:
        return -1
    return u.projective_dim


def contains(u: Subspace, v: Subspace) -> bool:
    """True iff v ⊆ u."""
    _same_ambient([u, v])
    return rank(vstack(u.basis, v.basis)) == u.vector_dim


def to_affine(u: Subspace) -> AffineRep:
    n = u.ambient_dim
    k = u.vector_dim
    trailing = u.basis.columns(n - k, n)
    if not is_invertible(trailing):
        raise NotAffine(f"trailing {k}x{k} block is singular")
    normalized = inverse(trailing) @ u.basis
    block = normalized.columns(0, n - k) if n > k else None
    return AffineRep(r=k - 1, d=n - 1, block=block)


def from_affine(rep: AffineRep) -> Subspace:
    return Subspace(rep.expand())


def affine_matrix(u: Subspace) -> RationalMatrix:
    """The normalized (r+1)×(d+1) representative of u."""
    return to_affine(u).expand()


def is_affine(u: Subspace) -> bool:
    n, k = u.ambient_dim, u.vector_dim
    return is_invertible(u.basis.columns(n - k, n))


# ============================================================================
# Seeded general-position sampling
# ============================================================================

@dataclass
class SampleStats:
    """Counts draws rejected for rank or chart degeneracy."""

    draws: int = 0
    resamples: int = 0
    reasons: Dict[str, int] = field(default_factory=dict)

    def reject(self, reason: str) -> None:
        self.resamples += 1
        self.reasons[reason] = self.reasons.get(reason, 0) + 1


def make_rng(seed: Union[int, np.random.Generator, None]) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _integer_matrix(rng: np.random.Generator, nrows: int, ncols: int, bound: int) -> RationalMatrix:
    entries = rng.integers(-bound, bound + 1, size=(nrows, ncols))
    return RationalMatrix([[int(x) for x in row] for row in entries.tolist()], ncols=ncols)


def _draw_until_generic(
    build: Callable[[], RationalMatrix],
    vec_dim: int,
    stats: SampleStats,
    accept: Optional[Callable[[Subspace], bool]],
    max_redraws: Optional[int],
) -> Subspace:
    limit = max_redraws if max_redraws is not None else int(getattr(config, 'MAX_SAMPLE_REDRAWS', 200))
    for _ in range(limit + 1):
        stats.draws += 1
        m = build()
        if rank(m) != vec_dim:
            stats.reject("rank")
            continue
        candidate = Subspace(m)
        if not is_affine(candidate):
            stats.reject("chart")
            continue
        if accept is not None and not accept(candidate):
            stats.reject("accept")
            continue
        return candidate
    raise DegenerateInput(f"no generic {vec_dim}-dimensional draw after {limit} redraws ({stats.reasons})")


def random_subspace(
    ambient: int,
    vec_dim: int,
    seed: Union[int, np.random.Generator, None] = None,
    bound: int = 10,
    stats: Optional[SampleStats] = None,
    accept: Optional[Callable[[Subspace], bool]] = None,
    max_redraws: Optional[int] = None,
) -> Subspace:
    """Integer-entry subspace, redrawn until full rank and affine-normalizable."""
    if not 1 <= vec_dim <= ambient:
        raise ValueError(f"need 1 <= vec_dim <= ambient, got {vec_dim} in {ambient}")
    if bound < 1:
        raise ValueError("bound must be at least 1")
    rng = make_rng(seed)
    stats = stats if stats is not None else SampleStats()
    return _draw_until_generic(
        lambda: _integer_matrix(rng, vec_dim, ambient, bound), vec_dim, stats, accept, max_redraws
    )


def random_in_span(
    span: Subspace,
    vec_dim: int,
    seed: Union[int, np.random.Generator, None] = None,
    bound: int = 10,
    stats: Optional[SampleStats] = None,
    accept: Optional[Callable[[Subspace], bool]] = None,
    max_redraws: Optional[int] = None,
) -> Subspace:
    """Generic vec_dim-dimensional subspace of ``span`` (integer combinations of its basis).

    Raises DegenerateInput when no draw lands in the affine chart, e.g. when the
    span meets the chart's complement too much.
    """
    if not 1 <= vec_dim <= span.vector_dim:
        raise ValueError(f"cannot draw dimension {vec_dim} inside dimension {span.vector_dim}")
    rng = make_rng(seed)
    stats = stats if stats is not None else SampleStats()
    return _draw_until_generic(
        lambda: _integer_matrix(rng, vec_dim, span.vector_dim, bound) @ span.basis,
        vec_dim, stats, accept, max_redraws,
    )


def random_codim_plane(
    ambient: int,
    codim: int,
    seed: Union[int, np.random.Generator, None] = None,
    bound: int = 10,
    stats: Optional[SampleStats] = None,
) -> Subspace:
    """Random projective plane of codimension ``codim`` (vector dim ambient − codim)."""
    return random_subspace(ambient, ambient - codim, seed, bound, stats)

"""Exact rational matrix arithmetic.

Dense matrices over ``fractions.Fraction``. Rank decisions use fraction-free
(Bareiss) elimination on integer-scaled rows, pivoting on the first nonzero
entry in column order, so every answer is exact and deterministic.

Values are immutable; all functions are pure.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from core.errors import NoSolution, ShapeMismatch, Singular

Scalar = Union[int, Fraction, str]


# ============================================================================
# Rationals
# ============================================================================

def to_fraction(value: Scalar) -> Fraction:
    """Coerce int / Fraction / "p/q" text to a Fraction. Floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"exact entries only (int, Fraction, 'p/q'), got {type(value).__name__}")


def parse_rational(text: str) -> Fraction:
    s = str(text).strip()
    if not s:
        raise ValueError("empty rational")
    num, sep, den = s.partition("/")
    try:
        if sep:
            return Fraction(int(num), int(den))
        return Fraction(int(num))
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational 'p/q': {text!r}") from e


def format_rational(q: Fraction) -> str:
    """'p/q' in lowest terms, or 'p' when q = 1."""
    q = to_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# ============================================================================
# Matrix value type
# ============================================================================

class RationalMatrix:
    """Immutable dense matrix of Fractions.

    A matrix with zero rows (and ``ncols`` columns) is a legal value; it is the
    sentinel returned for a trivial nullspace.
    """

    __slots__ = ("_rows", "_ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable[Scalar]], ncols: Optional[int] = None):
        data = tuple(tuple(to_fraction(x) for x in row) for row in rows)
        if data:
            width = len(data[0])
            if any(len(row) != width for row in data):
                raise ShapeMismatch("ragged rows")
            if ncols is not None and ncols != width:
                raise ShapeMismatch(f"expected {ncols} columns, got {width}")
        else:
            if ncols is None:
                raise ShapeMismatch("an empty matrix needs an explicit column count")
            width = ncols
        if width < 1:
            raise ShapeMismatch("matrices need at least one column")
        self._rows: Tuple[Tuple[Fraction, ...], ...] = data
        self._ncols = width
        self._hash: Optional[int] = None

    @classmethod
    def _trusted(cls, rows: Sequence[Sequence[Fraction]], ncols: int) -> "RationalMatrix":
        obj = cls.__new__(cls)
        obj._rows = tuple(tuple(row) for row in rows)
        obj._ncols = ncols
        obj._hash = None
        return obj

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        one, zero = Fraction(1), Fraction(0)
        return cls._trusted([[one if i == j else zero for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        return cls._trusted([[Fraction(0)] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def scalar(cls, n: int, value: Scalar) -> "RationalMatrix":
        lam = to_fraction(value)
        return cls._trusted(
            [[lam if i == j else Fraction(0) for j in range(n)] for i in range(n)], n
        )

    @classmethod
    def empty(cls, ncols: int) -> "RationalMatrix":
        return cls._trusted([], ncols)

    # -- shape / access ----------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self._rows), self._ncols)

    @property
    def rows(self) -> Tuple[Tuple[Fraction, ...], ...]:
        return self._rows

    def is_square(self) -> bool:
        return self.nrows == self._ncols

    def is_zero(self) -> bool:
        return all(x == 0 for row in self._rows for x in row)

    def __getitem__(self, key):
        if isinstance(key, tuple):
            i, j = key
            return self._rows[i][j]
        return self._rows[key]

    def columns(self, start: int, stop: int) -> "RationalMatrix":
        if not 0 <= start < stop <= self._ncols:
            raise ShapeMismatch(f"bad column range {start}:{stop} of {self._ncols}")
        return RationalMatrix._trusted([row[start:stop] for row in self._rows], stop - start)

    def select_rows(self, start: int, stop: int) -> "RationalMatrix":
        return RationalMatrix._trusted(self._rows[start:stop], self._ncols)

    def transpose(self) -> "RationalMatrix":
        if not self._rows:
            raise ShapeMismatch("cannot transpose a matrix with no rows")
        return RationalMatrix._trusted(list(zip(*self._rows)), len(self._rows))

    @property
    def T(self) -> "RationalMatrix":
        return self.transpose()

    # -- arithmetic --------------------------------------------------------

    def _check_same_shape(self, other: "RationalMatrix") -> None:
        if self.shape != other.shape:
            raise ShapeMismatch(f"shape {self.shape} vs {other.shape}")

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        self._check_same_shape(other)
        return RationalMatrix._trusted(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self._rows, other._rows)],
            self._ncols,
        )

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        self._check_same_shape(other)
        return RationalMatrix._trusted(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self._rows, other._rows)],
            self._ncols,
        )

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix._trusted([[-a for a in row] for row in self._rows], self._ncols)

    def __mul__(self, value) -> "RationalMatrix":
        if isinstance(value, RationalMatrix):
            return NotImplemented
        lam = to_fraction(value)
        return RationalMatrix._trusted([[lam * a for a in row] for row in self._rows], self._ncols)

    __rmul__ = __mul__

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self._ncols != other.nrows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other._rows))
        return RationalMatrix._trusted(
            [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols] for row in self._rows],
            other._ncols,
        )

    # -- comparison / text ---------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self._ncols == other._ncols and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._ncols, self._rows))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(x) for x in row) for row in self._rows)
        return f"RationalMatrix({self.nrows}x{self._ncols}: [{body}])"

    def to_text_rows(self) -> List[List[str]]:
        return [[format_rational(x) for x in row] for row in self._rows]

    @classmethod
    def from_text_rows(cls, rows: Sequence[Sequence[str]], ncols: Optional[int] = None) -> "RationalMatrix":
        return cls([[parse_rational(x) for x in row] for row in rows], ncols=ncols)


def vstack(*matrices: RationalMatrix) -> RationalMatrix:
    if not matrices:
        raise ShapeMismatch("vstack of nothing")
    ncols = matrices[0].ncols
    if any(m.ncols != ncols for m in matrices):
        raise ShapeMismatch("vstack needs equal column counts")
    rows: List[Tuple[Fraction, ...]] = []
    for m in matrices:
        rows.extend(m.rows)
    return RationalMatrix._trusted(rows, ncols)


def hstack(*matrices: RationalMatrix) -> RationalMatrix:
    if not matrices:
        raise ShapeMismatch("hstack of nothing")
    nrows = matrices[0].nrows
    if any(m.nrows != nrows for m in matrices):
        raise ShapeMismatch("hstack needs equal row counts")
    rows = [sum((m.rows[i] for m in matrices), ()) for i in range(nrows)]
    return RationalMatrix._trusted(rows, sum(m.ncols for m in matrices))


# ============================================================================
# Fraction-free elimination
# ============================================================================

def _integer_rows(m: RationalMatrix) -> List[List[int]]:
    """Scale every row by the lcm of its denominators (row space unchanged)."""
    out = []
    for row in m.rows:
        scale = math.lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * scale) for x in row])
    return out


def _bareiss(rows: List[List[int]], ncols: int) -> Tuple[List[List[int]], List[int], int]:
    """Fraction-free row echelon form.

    Returns (echelon rows, pivot columns, number of row swaps). Pivot is the
    first nonzero entry in column order. Every division below is exact.
    """
    m = [row[:] for row in rows]
    nrows = len(m)
    pivots: List[int] = []
    swaps = 0
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
            swaps += 1
        pivot_row = m[r]
        piv = pivot_row[c]
        for i in range(r + 1, nrows):
            row = m[i]
            lead = row[c]
            for j in range(c + 1, ncols):
                row[j] = (piv * row[j] - lead * pivot_row[j]) // prev
            row[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return m, pivots, swaps


def rref(m: RationalMatrix) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    if m.nrows == 0:
        return [], []
    echelon, pivots, _ = _bareiss(_integer_rows(m), m.ncols)
    rows = [[Fraction(x) for x in echelon[k]] for k in range(len(pivots))]
    for k in range(len(pivots) - 1, -1, -1):
        pc = pivots[k]
        piv = rows[k][pc]
        if piv != 1:
            rows[k] = [x / piv for x in rows[k]]
        pivot_row = rows[k]
        for i in range(k):
            f = rows[i][pc]
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], pivot_row)]
    return rows, pivots


def rank(m: RationalMatrix) -> int:
    if m.nrows == 0:
        return 0
    _, pivots, _ = _bareiss(_integer_rows(m), m.ncols)
    return len(pivots)


def determinant(m: RationalMatrix) -> Fraction:
    if not m.is_square():
        raise ShapeMismatch(f"determinant of non-square {m.shape}")
    n = m.nrows
    scaled = _integer_rows(m)
    echelon, pivots, swaps = _bareiss(scaled, n)
    if len(pivots) < n:
        return Fraction(0)
    scale = 1
    for row in m.rows:
        scale *= math.lcm(*(x.denominator for x in row))
    sign = -1 if swaps % 2 else 1
    return Fraction(sign * echelon[n - 1][n - 1], scale)


def nullspace(m: RationalMatrix) -> RationalMatrix:
    """Basis (as rows) of {v : m·vᵀ = 0}; zero rows when the kernel is trivial."""
    n = m.ncols
    rows, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for k, pc in enumerate(pivots):
            v[pc] = -rows[k][free]
        basis.append(v)
    return RationalMatrix._trusted(basis, n)


def solve_right(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    """One exact X with X·a = b (free variables set to zero)."""
    if a.ncols != b.ncols:
        raise ShapeMismatch(f"X·a = b needs equal column counts, got {a.shape} and {b.shape}")
    p = a.nrows
    s = b.nrows
    if s == 0:
        return RationalMatrix.empty(p)
    if p == 0:
        raise ShapeMismatch("X·a = b needs a to have at least one row")
    rows, pivots = rref(hstack(a.transpose(), b.transpose()))
    if any(pc >= p for pc in pivots):
        raise NoSolution("X·a = b is inconsistent")
    xt = [[Fraction(0)] * s for _ in range(p)]
    for k, pc in enumerate(pivots):
        xt[pc] = rows[k][p:]
    return RationalMatrix._trusted(xt, s).transpose()


def inverse(m: RationalMatrix) -> RationalMatrix:
    if not m.is_square():
        raise ShapeMismatch(f"inverse of non-square {m.shape}")
    n = m.nrows
    rows, pivots = rref(hstack(m, RationalMatrix.identity(n)))
    if pivots[:n] != list(range(n)):
        raise Singular(f"matrix of size {n} has rank {sum(1 for pc in pivots if pc < n)}")
    return RationalMatrix._trusted([row[n:] for row in rows[:n]], n)


def is_invertible(m: RationalMatrix) -> bool:
    return m.is_square() and rank(m) == m.nrows

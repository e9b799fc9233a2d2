"""Domain types, magic-square predicates, symmetry transforms, canonical forms.

Squares are stored row-major as flat tuples of the integers 1..n^2.  All
operations here are pure functions on immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class MsqError(Exception):
    """Base class for all errors raised by this package."""


class InvalidOrderError(MsqError):
    pass


class MalformedSquareError(MsqError):
    pass


class UnsupportedOrderError(MsqError):
    pass


class UnsupportedFamilyError(MsqError):
    pass


FAMILIES = ("general", "associative", "ultra", "franklin")

# (family, order) pairs this artifact enumerates.
SUPPORTED_PAIRS = frozenset(
    [("general", 3), ("general", 4), ("associative", 4), ("associative", 5),
     ("ultra", 5), ("franklin", 8)]
)

BLOCK_MODES = ("aligned", "overlapping", "wrapped")
BENT_MODES = ("wrapped", "plain")

# Defaults reproduce the published order-8 Franklin corpus size (368,640
# essentially different squares); see enumerate.count_match_report().
DEFAULT_FRANKLIN_BLOCKS = "aligned"
DEFAULT_FRANKLIN_BENTS = "wrapped"
DEFAULT_FRANKLIN_MAIN_DIAGONALS = False


def magic_constant(n: int) -> int:
    """Common row/column/diagonal sum for an order-n square over 1..n^2."""
    if n < 1:
        raise InvalidOrderError(f"order must be >= 1, got {n}")
    return n * (n * n + 1) // 2


@dataclass(frozen=True)
class Square:
    """An order-n grid holding each of 1..n^2 exactly once, row-major."""

    order: int
    cells: tuple[int, ...]

    def __post_init__(self):
        n = self.order
        if n < 3:
            raise InvalidOrderError(f"order must be >= 3, got {n}")
        cells = tuple(self.cells)
        object.__setattr__(self, "cells", cells)
        if len(cells) != n * n:
            raise MalformedSquareError(
                f"expected {n * n} cells for order {n}, got {len(cells)}")
        if sorted(cells) != list(range(1, n * n + 1)):
            raise MalformedSquareError(
                f"cells are not a permutation of 1..{n * n}")

    @classmethod
    def from_rows(cls, rows) -> "Square":
        rows = [list(r) for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise MalformedSquareError("grid is not square")
        return cls(n, tuple(v for row in rows for v in row))

    def rows(self) -> list[list[int]]:
        n = self.order
        return [list(self.cells[i * n:(i + 1) * n]) for i in range(n)]

    def __getitem__(self, rc: tuple[int, int]) -> int:
        i, j = rc
        return self.cells[i * self.order + j]


@dataclass(frozen=True)
class FamilySpec:
    """Which family to enumerate, plus the order-8 Franklin config knobs."""

    family: str
    order: int
    franklin_requires_main_diagonals: bool = DEFAULT_FRANKLIN_MAIN_DIAGONALS
    franklin_blocks: str = DEFAULT_FRANKLIN_BLOCKS
    franklin_bents: str = DEFAULT_FRANKLIN_BENTS

    def __post_init__(self):
        if (self.family, self.order) not in SUPPORTED_PAIRS:
            raise UnsupportedFamilyError(
                f"unsupported (family, order) pair: ({self.family}, {self.order}); "
                f"supported: {sorted(SUPPORTED_PAIRS)}")
        if self.franklin_blocks not in BLOCK_MODES:
            raise UnsupportedFamilyError(
                f"unknown block mode {self.franklin_blocks!r}; choose from {BLOCK_MODES}")
        if self.franklin_bents not in BENT_MODES:
            raise UnsupportedFamilyError(
                f"unknown bent mode {self.franklin_bents!r}; choose from {BENT_MODES}")

    def fingerprint(self) -> str:
        """Stable config identifier recorded in reports and cache names."""
        tag = f"{self.family}-{self.order}"
        if self.family == "franklin":
            diag = "diag" if self.franklin_requires_main_diagonals else "nodiag"
            tag += f"-{self.franklin_blocks}-{self.franklin_bents}-{diag}"
        return tag + "-canon1"


class D4Transform(Enum):
    """The eight rotations/reflections of the square grid."""

    IDENTITY = "identity"
    ROT90 = "rot90"
    ROT180 = "rot180"
    ROT270 = "rot270"
    FLIP_H = "flip_h"
    FLIP_V = "flip_v"
    FLIP_MAIN = "flip_main"
    FLIP_ANTI = "flip_anti"


def _source_index(t: D4Transform, n: int, i: int, j: int) -> int:
    """Row-major index in the input grid feeding output cell (i, j)."""
    if t is D4Transform.IDENTITY:
        si, sj = i, j
    elif t is D4Transform.ROT90:       # clockwise
        si, sj = n - 1 - j, i
    elif t is D4Transform.ROT180:
        si, sj = n - 1 - i, n - 1 - j
    elif t is D4Transform.ROT270:
        si, sj = j, n - 1 - i
    elif t is D4Transform.FLIP_H:      # reverse each row
        si, sj = i, n - 1 - j
    elif t is D4Transform.FLIP_V:      # reverse row order
        si, sj = n - 1 - i, j
    elif t is D4Transform.FLIP_MAIN:   # transpose
        si, sj = j, i
    elif t is D4Transform.FLIP_ANTI:
        si, sj = n - 1 - j, n - 1 - i
    else:  # pragma: no cover
        raise ValueError(t)
    return si * n + sj


def d4_index_maps(n: int) -> dict[D4Transform, tuple[int, ...]]:
    """For each transform, the source index of every output cell."""
    return {
        t: tuple(_source_index(t, n, i, j) for i in range(n) for j in range(n))
        for t in D4Transform
    }


def transform_cells(cells: tuple[int, ...], n: int, t: D4Transform) -> tuple[int, ...]:
    return tuple(cells[_source_index(t, n, i, j)] for i in range(n) for j in range(n))


def apply_d4(obj, t: D4Transform):
    """Transform a Square or ParityMatrix by one D4 element."""
    if isinstance(obj, Square):
        return Square(obj.order, transform_cells(obj.cells, obj.order, t))
    # duck-typed: parity.ParityMatrix carries .order and .bits
    from . import parity
    if isinstance(obj, parity.ParityMatrix):
        return parity.ParityMatrix(obj.order, transform_cells(obj.bits, obj.order, t))
    raise TypeError(f"cannot apply D4 transform to {type(obj).__name__}")


def d4_orbit(sq: Square) -> list[Square]:
    return [apply_d4(sq, t) for t in D4Transform]


def frenicle_form(sq: Square) -> Square:
    """Orbit representative: lexicographically smallest row-major sequence."""
    best = min(transform_cells(sq.cells, sq.order, t) for t in D4Transform)
    return Square(sq.order, best)


def complement(sq: Square) -> Square:
    """Replace every cell x by n^2+1-x; preserves magic and associativity."""
    m = sq.order * sq.order + 1
    return Square(sq.order, tuple(m - v for v in sq.cells))


# ---------------------------------------------------------------------------
# line geometry (shared with the search planner)

def row_lines(n: int) -> list[list[int]]:
    return [[i * n + j for j in range(n)] for i in range(n)]


def col_lines(n: int) -> list[list[int]]:
    return [[i * n + j for i in range(n)] for j in range(n)]


def diagonal_lines(n: int) -> list[list[int]]:
    return [[i * n + i for i in range(n)], [i * n + (n - 1 - i) for i in range(n)]]


def broken_diagonal_lines(n: int) -> list[list[int]]:
    """All 2n cyclically wrapping diagonals (includes the two main ones)."""
    out = []
    for s in range(n):
        out.append([r * n + (r + s) % n for r in range(n)])
        out.append([r * n + (s - r) % n for r in range(n)])
    return out


def half_lines(n: int) -> list[list[int]]:
    """The two halves of every row and every column."""
    h = n // 2
    out = []
    for i in range(n):
        out.append([i * n + j for j in range(h)])
        out.append([i * n + j for j in range(h, n)])
    for j in range(n):
        out.append([i * n + j for i in range(h)])
        out.append([i * n + j for i in range(h, n)])
    return out


def block_lines(n: int, mode: str) -> list[list[int]]:
    """2x2 block cell groups: aligned (n^2/4), overlapping ((n-1)^2) or wrapped (n^2)."""
    if mode == "aligned":
        anchors = [(r, c) for r in range(0, n, 2) for c in range(0, n, 2)]
    elif mode == "overlapping":
        anchors = [(r, c) for r in range(n - 1) for c in range(n - 1)]
    elif mode == "wrapped":
        anchors = [(r, c) for r in range(n) for c in range(n)]
    else:
        raise UnsupportedFamilyError(f"unknown block mode {mode!r}")
    return [
        [r * n + c, r * n + (c + 1) % n, ((r + 1) % n) * n + c, ((r + 1) % n) * n + (c + 1) % n]
        for r, c in anchors
    ]


def bent_diagonal_lines(n: int, mode: str) -> list[list[int]]:
    """V-shaped n-cell paths in all four orientations.

    ``wrapped`` includes every cyclic shift of each V (4n lines); ``plain``
    keeps only the shifts that fit without wrapping (4(n/2+1) lines).
    """
    h = n // 2
    vee = [h - 1 - c if c < h else c - h for c in range(n)]   # peak at top, e.g. 3,2,1,0,0,1,2,3
    wedge = [n - 1 - v for v in vee]                          # trough at bottom, e.g. 4,5,6,7,7,6,5,4
    out = []
    for offsets in (vee, wedge):
        if mode == "wrapped":
            shifts = range(n)
        else:  # slide each V only as far as the grid allows
            lo, hi = -min(offsets), n - 1 - max(offsets)
            shifts = range(lo, hi + 1)
        for s in shifts:
            out.append([((s + v) % n) * n + c for c, v in enumerate(offsets)])
    # column-oriented versions: transpose of the row-oriented ones
    for line in list(out):
        out.append([(idx % n) * n + idx // n for idx in line])
    return out


def franklin_lines(n: int, blocks: str, bents: str,
                   main_diagonals: bool) -> list[tuple[list[int], int]]:
    """All Franklin constraint lines as (cells, target sum) pairs."""
    if n % 4 != 0:
        raise UnsupportedOrderError(f"Franklin squares need order divisible by 4, got {n}")
    m = magic_constant(n)
    out = [(cells, m // 2) for cells in half_lines(n)]
    out += [(cells, 4 * m // n) for cells in block_lines(n, blocks)]
    out += [(cells, m) for cells in bent_diagonal_lines(n, bents)]
    if main_diagonals:
        out += [(cells, m) for cells in diagonal_lines(n)]
    return out


# ---------------------------------------------------------------------------
# predicates

def _sums_ok(sq: Square, lines: list[list[int]], target: int) -> bool:
    cells = sq.cells
    return all(sum(cells[i] for i in line) == target for line in lines)


def is_magic(sq: Square) -> bool:
    """All rows, columns, and both main diagonals sum to the magic constant."""
    n = sq.order
    m = magic_constant(n)
    return _sums_ok(sq, row_lines(n) + col_lines(n) + diagonal_lines(n), m)


def is_associative(sq: Square) -> bool:
    """Cells symmetric about the center sum to n^2+1."""
    n = sq.order
    target = n * n + 1
    c = sq.cells
    return all(c[i] + c[n * n - 1 - i] == target for i in range(n * n))


def is_pandiagonal(sq: Square) -> bool:
    """All 2n broken (cyclically wrapping) diagonals sum to the magic constant."""
    n = sq.order
    return _sums_ok(sq, broken_diagonal_lines(n), magic_constant(n))


def is_ultra(sq: Square) -> bool:
    """Associative and pandiagonal (and magic)."""
    return is_magic(sq) and is_associative(sq) and is_pandiagonal(sq)


def is_franklin(sq: Square, require_main_diagonals: bool = DEFAULT_FRANKLIN_MAIN_DIAGONALS,
                blocks: str = DEFAULT_FRANKLIN_BLOCKS,
                bents: str = DEFAULT_FRANKLIN_BENTS) -> bool:
    """Half-row/column, bent-diagonal, and 2x2-block sums all hold.

    Rows and columns must also carry the magic sum; the main diagonals are
    checked only when ``require_main_diagonals`` is set.
    """
    n = sq.order
    lines = franklin_lines(n, blocks, bents, require_main_diagonals)
    m = magic_constant(n)
    full = [(cells, m) for cells in row_lines(n) + col_lines(n)]
    return all(sum(sq.cells[i] for i in cells) == target
               for cells, target in lines + full)


def family_predicate(spec: FamilySpec):
    """Membership test for one enumeration family (beyond is_magic)."""
    if spec.family == "general":
        return is_magic
    if spec.family == "associative":
        return lambda sq: is_magic(sq) and is_associative(sq)
    if spec.family == "ultra":
        return is_ultra
    return lambda sq: is_magic(sq) and is_franklin(
        sq, spec.franklin_requires_main_diagonals,
        spec.franklin_blocks, spec.franklin_bents)

"""Search plans: the constraint systems executed by the backtracking kernels.

A plan describes one family's enumeration as data: weighted sum constraints
("lines"), a static branch order, and the canonical-form inequality checks
that restrict the search to lexicographically minimal D4 representatives.
Both kernel backends (compiled and pure Python) execute plans with identical
semantics, so their outputs are interchangeable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .. import core
from ..core import FamilySpec


@dataclass(frozen=True)
class Line:
    cells: tuple[int, ...]
    coeffs: tuple[int, ...]
    target: int

    @property
    def is_unit(self) -> bool:
        return all(c == 1 for c in self.coeffs)


@dataclass(frozen=True)
class SearchPlan:
    n: int
    ncells: int
    nvals: int
    lines: tuple[Line, ...]
    branch_order: tuple[int, ...]        # all cells; kernels skip assigned ones
    canon_pairs: tuple[tuple[int, int], ...]   # require value[a] < value[b]
    fingerprint: str

    def describe(self) -> dict:
        return {
            "order": self.n,
            "lines": len(self.lines),
            "fingerprint": self.fingerprint,
        }


def _unit_lines(cell_groups, target) -> list[Line]:
    return [Line(tuple(g), (1,) * len(g), target) for g in cell_groups]


def _canon_pairs(n: int) -> tuple[tuple[int, int], ...]:
    # Exact canonicity for all-distinct grids: the top-left corner is the
    # strict minimum of the four corners (kills the six transforms that move
    # another corner there) and cell (0,1) < cell (1,0) (kills the transpose).
    return ((0, n - 1), (0, n * (n - 1)), (0, n * n - 1), (1, n))


def _rref_derived(lines: list[Line], ncells: int, branch_order: tuple[int, ...],
                  max_support: int = 16, max_coeff: int = 16) -> list[Line]:
    """Implied constraints that complete earlier than the originals.

    Gaussian elimination over the rationals with columns ordered by
    descending branch position: each reduced row then involves the latest
    possible cells only, so it can force or reject a partial assignment long
    before any original line is fully assigned.  Only small rows are kept;
    large-support combinations cost more per node than they prune.
    """
    pos = {cell: i for i, cell in enumerate(branch_order)}
    col_of = sorted(range(ncells), key=lambda c: -pos[c])
    col_idx = {cell: i for i, cell in enumerate(col_of)}
    rows = []
    for ln in lines:
        vec = [Fraction(0)] * (ncells + 1)
        for c, w in zip(ln.cells, ln.coeffs):
            vec[col_idx[c]] += w
        vec[ncells] = Fraction(ln.target)
        rows.append(vec)

    # reduced row echelon form
    pivot_cols = []
    r = 0
    for col in range(ncells):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivot_cols.append(col)
        r += 1
        if r == len(rows):
            break

    known = {(ln.cells, ln.coeffs) for ln in lines}
    derived = []
    for row in rows[:r]:
        support = [i for i in range(ncells) if row[i] != 0]
        if not support or len(support) > max_support:
            continue
        denom = lcm(*(row[i].denominator for i in support + [ncells]))
        ints = [int(row[i] * denom) for i in support]
        tgt = int(row[ncells] * denom)
        if max(abs(x) for x in ints) > max_coeff:
            continue
        cells = tuple(col_of[i] for i in support)
        order = sorted(range(len(cells)), key=lambda k: cells[k])
        cells = tuple(cells[k] for k in order)
        coeffs = tuple(ints[k] for k in order)
        if coeffs[0] < 0:
            coeffs = tuple(-x for x in coeffs)
            tgt = -tgt
        if (cells, coeffs) in known:
            continue
        known.add((cells, coeffs))
        derived.append(Line(cells, coeffs, tgt))
    return derived


def build_plan(spec: FamilySpec, *, derive: bool = True) -> SearchPlan:
    """Assemble the constraint system and branch order for one family."""
    n = spec.order
    ncells = n * n
    m = core.magic_constant(n)
    lines: list[Line] = []

    if spec.family == "franklin":
        lines += [Line(tuple(cells), (1,) * len(cells), target)
                  for cells, target in core.franklin_lines(
                      n, spec.franklin_blocks, spec.franklin_bents,
                      spec.franklin_requires_main_diagonals)]
        # full rows/columns follow from the half sums, so they are omitted
    else:
        lines += _unit_lines(core.row_lines(n), m)
        lines += _unit_lines(core.col_lines(n), m)
        if spec.family == "ultra":
            lines += _unit_lines(core.broken_diagonal_lines(n), m)
        else:
            lines += _unit_lines(core.diagonal_lines(n), m)

    if spec.family in ("associative", "ultra"):
        pair_target = ncells + 1
        for i in range(ncells // 2):
            lines.append(Line((i, ncells - 1 - i), (1, 1), pair_target))
        if ncells % 2 == 1:
            lines.append(Line((ncells // 2,), (1,), pair_target // 2))

    branch_order = tuple(range(ncells))
    if derive:
        lines += _rref_derived(lines, ncells, branch_order)

    return SearchPlan(
        n=n,
        ncells=ncells,
        nvals=ncells,
        lines=tuple(lines),
        branch_order=branch_order,
        canon_pairs=_canon_pairs(n),
        fingerprint=spec.fingerprint(),
    )

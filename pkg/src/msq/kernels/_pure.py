"""Pure-Python execution of search plans.

Reference implementation of the kernel contract: depth-first search over the
plan's branch order with forced-value propagation (any constraint line with
one unassigned cell pins that cell), partial-sum bound pruning, and the
canonical-form inequality cuts.  The compiled backend implements the same
semantics; results are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

from .plan import SearchPlan

BACKEND_NAME = "pure"


@dataclass
class SearchResult:
    solutions: bytes          # count * ncells bytes, DFS emission order
    count: int
    nodes: int
    complete: bool


class _Engine:
    def __init__(self, plan: SearchPlan):
        self.plan = plan
        self.ncells = plan.ncells
        self.nvals = plan.nvals
        self.nlines = len(plan.lines)
        self.line_cells = [ln.cells for ln in plan.lines]
        self.line_unit = [ln.is_unit for ln in plan.lines]
        self.target = [ln.target for ln in plan.lines]
        self.cell_lines = [[] for _ in range(plan.ncells)]
        for li, ln in enumerate(plan.lines):
            for c, w in zip(ln.cells, ln.coeffs):
                self.cell_lines[c].append((li, w))
        self.canon = [[] for _ in range(plan.ncells)]
        for a, b in plan.canon_pairs:
            self.canon[a].append((b, True))    # value[a] must stay below value[b]
            self.canon[b].append((a, False))
        nv = self.nvals
        # achievable sum of k distinct values from 1..nv
        self.unit_lo = [k * (k + 1) // 2 for k in range(nv + 1)]
        self.unit_hi = [k * nv - k * (k - 1) // 2 for k in range(nv + 1)]

        self.val = [0] * self.ncells
        self.used = 0
        self.rem = [ln.target for ln in plan.lines]
        self.cnt = [len(ln.cells) for ln in plan.lines]
        self.lo = [0] * self.nlines
        self.hi = [0] * self.nlines
        for li, ln in enumerate(plan.lines):
            lo = hi = 0
            for w in ln.coeffs:
                if w > 0:
                    lo += w
                    hi += w * nv
                else:
                    lo += w * nv
                    hi += w
            self.lo[li], self.hi[li] = lo, hi
        self.trail: list[int] = []
        self.queue: list[int] = [li for li in range(self.nlines) if self.cnt[li] == 1]
        self.assigned = 0

    # -- state transitions ---------------------------------------------------

    def assign(self, cell: int, v: int) -> bool:
        """Commit one assignment; False if any constraint is violated."""
        if v < 1 or v > self.nvals:
            return False
        bit = 1 << (v - 1)
        if self.used & bit:
            return False
        for other, keep_below in self.canon[cell]:
            ov = self.val[other]
            if ov:
                if keep_below:
                    if v >= ov:
                        return False
                elif ov >= v:
                    return False
        self.used |= bit
        self.val[cell] = v
        self.trail.append(cell)
        self.assigned += 1
        nv = self.nvals
        ok = True
        for li, w in self.cell_lines[cell]:
            self.rem[li] -= w * v
            self.cnt[li] -= 1
            if w > 0:
                self.lo[li] -= w
                self.hi[li] -= w * nv
            else:
                self.lo[li] -= w * nv
                self.hi[li] -= w
            k = self.cnt[li]
            r = self.rem[li]
            if k == 0:
                if r != 0:
                    ok = False
            elif self.line_unit[li]:
                if r < self.unit_lo[k] or r > self.unit_hi[k]:
                    ok = False
                elif k == 1:
                    self.queue.append(li)
            else:
                if r < self.lo[li] or r > self.hi[li]:
                    ok = False
                elif k == 1:
                    self.queue.append(li)
        return ok

    def undo_to(self, mark: int):
        nv = self.nvals
        while len(self.trail) > mark:
            cell = self.trail.pop()
            v = self.val[cell]
            self.val[cell] = 0
            self.used &= ~(1 << (v - 1))
            self.assigned -= 1
            for li, w in self.cell_lines[cell]:
                self.rem[li] += w * v
                self.cnt[li] += 1
                if w > 0:
                    self.lo[li] += w
                    self.hi[li] += w * nv
                else:
                    self.lo[li] += w * nv
                    self.hi[li] += w
    def value_window(self, cell: int) -> tuple[int, int]:
        """Feasible value interval for a branch cell, intersected over its lines."""
        vmin, vmax = 1, self.nvals
        for li, w in self.cell_lines[cell]:
            k = self.cnt[li]
            r = self.rem[li]
            if self.line_unit[li]:
                a = r - self.unit_hi[k - 1]
                b = r - self.unit_lo[k - 1]
            else:
                if w > 0:
                    lo_o, hi_o = self.lo[li] - w, self.hi[li] - w * self.nvals
                else:
                    lo_o, hi_o = self.lo[li] - w * self.nvals, self.hi[li] - w
                ca, cb = r - hi_o, r - lo_o      # bounds for w * value
                if w > 0:
                    a, b = -((-ca) // w), cb // w
                else:
                    a, b = -((-cb) // w), ca // w
            if a > vmin:
                vmin = a
            if b < vmax:
                vmax = b
            if vmin > vmax:
                break
        return vmin, vmax

    def propagate(self, qmark: int) -> bool:
        """Assign every cell pinned by a one-cell-left line, transitively."""
        qi = qmark
        while qi < len(self.queue):
            li = self.queue[qi]
            qi += 1
            if self.cnt[li] != 1:
                continue
            cells = self.line_cells[li]
            cell = next(c for c in cells if not self.val[c])
            w = 1
            if not self.line_unit[li]:
                for c, wc in zip(cells, self.plan.lines[li].coeffs):
                    if c == cell:
                        w = wc
                        break
            r = self.rem[li]
            if r % w:
                return False
            if not self.assign(cell, r // w):
                return False
        del self.queue[qmark:]
        return True


def run_plan(plan: SearchPlan, prefix: tuple[int, ...] = (), *,
             max_solutions: int = 0, node_budget: int = 0) -> SearchResult:
    """Enumerate all solutions of a plan below one branch-value prefix."""
    eng = _Engine(plan)
    out = bytearray()
    state = {"count": 0, "nodes": 0, "aborted": False}
    branch_order = plan.branch_order

    if not eng.propagate(0):
        return SearchResult(b"", 0, 0, True)

    def descend(depth: int, next_pos: int):
        if state["aborted"]:
            return
        pos = next_pos
        while pos < len(branch_order) and eng.val[branch_order[pos]]:
            pos += 1
        if eng.assigned == eng.ncells:
            out.extend(eng.val)
            state["count"] += 1
            if max_solutions and state["count"] >= max_solutions:
                state["aborted"] = True
            return
        cell = branch_order[pos]
        if depth < len(prefix):
            candidates = (prefix[depth],)
        else:
            vmin, vmax = eng.value_window(cell)
            candidates = range(vmin, vmax + 1)
        for v in candidates:
            if eng.used & (1 << (v - 1)):
                continue
            mark = len(eng.trail)
            qmark = len(eng.queue)
            if eng.assign(cell, v) and eng.propagate(qmark):
                state["nodes"] += 1
                if node_budget and state["nodes"] > node_budget:
                    state["aborted"] = True
                else:
                    descend(depth + 1, pos + 1)
            del eng.queue[qmark:]
            eng.undo_to(mark)
            if state["aborted"]:
                return

    descend(0, 0)
    return SearchResult(bytes(out), state["count"], state["nodes"],
                        not state["aborted"])


def branch_prefixes(plan: SearchPlan, depth: int,
                    prefix: tuple[int, ...] = ()) -> list[tuple[int, ...]]:
    """All viable branch-value prefixes of the given depth, in DFS order.

    Prefix solution sets partition the full solution set: every solution
    extends exactly one returned prefix.  Depths beyond the branch count
    simply return the deepest available split.
    """
    eng = _Engine(plan)
    out: list[tuple[int, ...]] = []
    if not eng.propagate(0):
        return out
    branch_order = plan.branch_order
    chosen: list[int] = []

    def descend(d: int, next_pos: int):
        pos = next_pos
        while pos < len(branch_order) and eng.val[branch_order[pos]]:
            pos += 1
        if d >= depth or eng.assigned == eng.ncells:
            out.append(tuple(chosen))
            return
        cell = branch_order[pos]
        if d < len(prefix):
            source = (prefix[d],)
        else:
            vmin, vmax = eng.value_window(cell)
            source = range(vmin, vmax + 1)
        for v in source:
            if eng.used & (1 << (v - 1)):
                continue
            mark = len(eng.trail)
            qmark = len(eng.queue)
            if eng.assign(cell, v) and eng.propagate(qmark):
                chosen.append(v)
                descend(d + 1, pos + 1)
                chosen.pop()
            del eng.queue[qmark:]
            eng.undo_to(mark)

    descend(0, 0)
    return out

# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled execution of search plans.

Mirrors kernels._pure.run_plan exactly: same branch order, same ascending
value order, same propagation and pruning rules, so the two backends emit
byte-identical solution streams.
"""

from libc.stdlib cimport calloc, free, malloc, realloc
from libc.string cimport memcpy

from ._pure import SearchResult

BACKEND_NAME = "fast"


cdef struct Ctx:
    int ncells, nvals, nlines
    # line layout
    int *ls          # line start offsets, nlines+1
    int *lcell       # flattened line cells
    int *lcoeff      # flattened line coeffs
    int *unit        # per line: all coeffs == 1
    # per-cell adjacency
    int *cs          # cell start offsets, ncells+1
    int *cline
    int *ccoeff
    # canonicity: per cell pairs (other, keep_below)
    int *ks
    int *kother
    int *kbelow
    # distinct-value bound tables for unit lines
    long *unit_lo
    long *unit_hi
    # mutable state
    int *val
    long *rem
    int *cnt
    long *lo
    long *hi
    unsigned long long used
    int assigned
    int *trail
    int ntrail
    int *queue
    int nqueue
    # search control
    int *branch_order
    int nprefix
    int *prefix
    long long max_solutions
    long long node_budget
    long long count
    long long nodes
    int aborted
    # output buffer
    unsigned char *buf
    size_t cap


cdef int _assign(Ctx *c, int cell, int v):
    cdef unsigned long long bit
    cdef int i, li, w, k, ok, other
    cdef long r
    if v < 1 or v > c.nvals:
        return 0
    bit = (<unsigned long long>1) << (v - 1)
    if c.used & bit:
        return 0
    for i in range(c.ks[cell], c.ks[cell + 1]):
        other = c.kother[i]
        if c.val[other]:
            if c.kbelow[i]:
                if v >= c.val[other]:
                    return 0
            elif c.val[other] >= v:
                return 0
    c.used |= bit
    c.val[cell] = v
    c.trail[c.ntrail] = cell
    c.ntrail += 1
    c.assigned += 1
    ok = 1
    for i in range(c.cs[cell], c.cs[cell + 1]):
        li = c.cline[i]
        w = c.ccoeff[i]
        c.rem[li] -= w * v
        c.cnt[li] -= 1
        if w > 0:
            c.lo[li] -= w
            c.hi[li] -= w * c.nvals
        else:
            c.lo[li] -= w * c.nvals
            c.hi[li] -= w
        k = c.cnt[li]
        r = c.rem[li]
        if k == 0:
            if r != 0:
                ok = 0
        elif c.unit[li]:
            if r < c.unit_lo[k] or r > c.unit_hi[k]:
                ok = 0
            elif k == 1:
                c.queue[c.nqueue] = li
                c.nqueue += 1
        else:
            if r < c.lo[li] or r > c.hi[li]:
                ok = 0
            elif k == 1:
                c.queue[c.nqueue] = li
                c.nqueue += 1
    return ok


cdef void _undo_to(Ctx *c, int mark):
    cdef int cell, v, i, li, w
    while c.ntrail > mark:
        c.ntrail -= 1
        cell = c.trail[c.ntrail]
        v = c.val[cell]
        c.val[cell] = 0
        c.used &= ~((<unsigned long long>1) << (v - 1))
        c.assigned -= 1
        for i in range(c.cs[cell], c.cs[cell + 1]):
            li = c.cline[i]
            w = c.ccoeff[i]
            c.rem[li] += w * v
            c.cnt[li] += 1
            if w > 0:
                c.lo[li] += w
                c.hi[li] += w * c.nvals
            else:
                c.lo[li] += w * c.nvals
                c.hi[li] += w


cdef inline long _floordiv(long a, long b):
    cdef long q = a / b
    if a % b != 0 and ((a < 0) != (b < 0)):
        q -= 1
    return q

cdef inline long _ceildiv(long a, long b):
    return -_floordiv(-a, b)


cdef void _value_window(Ctx *c, int cell, int *vlo, int *vhi):
    """Feasible value interval for a branch cell, intersected over its lines."""
    cdef int i, li, w, k
    cdef long r, lo_o, hi_o, ca, cb, a, b
    vlo[0] = 1
    vhi[0] = c.nvals
    for i in range(c.cs[cell], c.cs[cell + 1]):
        li = c.cline[i]
        w = c.ccoeff[i]
        k = c.cnt[li]
        r = c.rem[li]
        if c.unit[li]:
            a = r - c.unit_hi[k - 1]
            b = r - c.unit_lo[k - 1]
        else:
            if w > 0:
                lo_o = c.lo[li] - w
                hi_o = c.hi[li] - w * c.nvals
            else:
                lo_o = c.lo[li] - w * c.nvals
                hi_o = c.hi[li] - w
            ca = r - hi_o
            cb = r - lo_o
            if w > 0:
                a = _ceildiv(ca, w)
                b = _floordiv(cb, w)
            else:
                a = _ceildiv(cb, w)
                b = _floordiv(ca, w)
        if a > vlo[0]:
            vlo[0] = <int>a
        if b < vhi[0]:
            vhi[0] = <int>b
        if vlo[0] > vhi[0]:
            return


cdef int _propagate(Ctx *c, int qmark):
    cdef int qi = qmark
    cdef int li, cell, w, j
    cdef long r
    while qi < c.nqueue:
        li = c.queue[qi]
        qi += 1
        if c.cnt[li] != 1:
            continue
        cell = -1
        w = 1
        for j in range(c.ls[li], c.ls[li + 1]):
            if c.val[c.lcell[j]] == 0:
                cell = c.lcell[j]
                w = c.lcoeff[j]
                break
        r = c.rem[li]
        if r % w:
            return 0
        if not _assign(c, cell, <int>(r / w)):
            return 0
    c.nqueue = qmark
    return 1


cdef int _emit(Ctx *c):
    cdef size_t need = (<size_t>(c.count + 1)) * c.ncells
    cdef unsigned char *nb
    cdef int i
    if need > c.cap:
        c.cap = c.cap * 2 if c.cap * 2 > need else need
        nb = <unsigned char *>realloc(c.buf, c.cap)
        if nb == NULL:
            return 0
        c.buf = nb
    for i in range(c.ncells):
        c.buf[c.count * c.ncells + i] = <unsigned char>c.val[i]
    c.count += 1
    if c.max_solutions and c.count >= c.max_solutions:
        c.aborted = 1
    return 1


cdef void _descend(Ctx *c, int depth, int next_pos):
    cdef int pos = next_pos
    cdef int cell, v, mark, qmark, vlo, vhi
    if c.aborted:
        return
    while pos < c.ncells and c.val[c.branch_order[pos]]:
        pos += 1
    if c.assigned == c.ncells:
        if not _emit(c):
            c.aborted = 1
        return
    cell = c.branch_order[pos]
    if depth < c.nprefix:
        vlo = c.prefix[depth]
        vhi = c.prefix[depth]
    else:
        _value_window(c, cell, &vlo, &vhi)
    for v in range(vlo, vhi + 1):
        if c.used & ((<unsigned long long>1) << (v - 1)):
            continue
        mark = c.ntrail
        qmark = c.nqueue
        if _assign(c, cell, v) and _propagate(c, qmark):
            c.nodes += 1
            if c.node_budget and c.nodes > c.node_budget:
                c.aborted = 1
            else:
                _descend(c, depth + 1, pos + 1)
        c.nqueue = qmark
        _undo_to(c, mark)
        if c.aborted:
            return


def run_plan(plan, prefix=(), *, max_solutions=0, node_budget=0):
    """Enumerate all solutions of a plan below one branch-value prefix."""
    cdef Ctx c
    cdef int i, j, n, total
    cdef list lines = list(plan.lines)
    cdef object result

    c.ncells = plan.ncells
    c.nvals = plan.nvals
    c.nlines = len(lines)
    c.used = 0
    c.assigned = 0
    c.ntrail = 0
    c.nqueue = 0
    c.max_solutions = max_solutions
    c.node_budget = node_budget
    c.count = 0
    c.nodes = 0
    c.aborted = 0

    total = 0
    for ln in lines:
        total += len(ln.cells)
    c.ls = <int *>malloc((c.nlines + 1) * sizeof(int))
    c.lcell = <int *>malloc(total * sizeof(int))
    c.lcoeff = <int *>malloc(total * sizeof(int))
    c.unit = <int *>malloc(c.nlines * sizeof(int))
    c.rem = <long *>malloc(c.nlines * sizeof(long))
    c.cnt = <int *>malloc(c.nlines * sizeof(int))
    c.lo = <long *>malloc(c.nlines * sizeof(long))
    c.hi = <long *>malloc(c.nlines * sizeof(long))
    j = 0
    for i, ln in enumerate(lines):
        c.ls[i] = j
        c.unit[i] = 1
        c.rem[i] = ln.target
        c.cnt[i] = len(ln.cells)
        c.lo[i] = 0
        c.hi[i] = 0
        for cell, w in zip(ln.cells, ln.coeffs):
            c.lcell[j] = cell
            c.lcoeff[j] = w
            if w != 1:
                c.unit[i] = 0
            if w > 0:
                c.lo[i] += w
                c.hi[i] += w * c.nvals
            else:
                c.lo[i] += w * c.nvals
                c.hi[i] += w
            j += 1
    c.ls[c.nlines] = j

    adj = [[] for _ in range(c.ncells)]
    for i, ln in enumerate(lines):
        for cell, w in zip(ln.cells, ln.coeffs):
            adj[cell].append((i, w))
    c.cs = <int *>malloc((c.ncells + 1) * sizeof(int))
    c.cline = <int *>malloc(total * sizeof(int))
    c.ccoeff = <int *>malloc(total * sizeof(int))
    j = 0
    for i in range(c.ncells):
        c.cs[i] = j
        for li, w in adj[i]:
            c.cline[j] = li
            c.ccoeff[j] = w
            j += 1
    c.cs[c.ncells] = j

    kadj = [[] for _ in range(c.ncells)]
    for a, b in plan.canon_pairs:
        kadj[a].append((b, 1))
        kadj[b].append((a, 0))
    npairs = 2 * len(plan.canon_pairs)
    c.ks = <int *>malloc((c.ncells + 1) * sizeof(int))
    c.kother = <int *>malloc(max(npairs, 1) * sizeof(int))
    c.kbelow = <int *>malloc(max(npairs, 1) * sizeof(int))
    j = 0
    for i in range(c.ncells):
        c.ks[i] = j
        for other, below in kadj[i]:
            c.kother[j] = other
            c.kbelow[j] = below
            j += 1
    c.ks[c.ncells] = j

    n = c.nvals
    c.unit_lo = <long *>malloc((n + 1) * sizeof(long))
    c.unit_hi = <long *>malloc((n + 1) * sizeof(long))
    for i in range(n + 1):
        c.unit_lo[i] = i * (i + 1) // 2
        c.unit_hi[i] = i * n - i * (i - 1) // 2

    c.val = <int *>calloc(c.ncells, sizeof(int))
    c.trail = <int *>malloc(c.ncells * sizeof(int))
    c.queue = <int *>malloc((c.nlines * (c.ncells + 1) + 16) * sizeof(int))
    c.branch_order = <int *>malloc(c.ncells * sizeof(int))
    for i in range(c.ncells):
        c.branch_order[i] = plan.branch_order[i]
    c.nprefix = len(prefix)
    c.prefix = <int *>malloc(max(c.nprefix, 1) * sizeof(int))
    for i in range(c.nprefix):
        c.prefix[i] = prefix[i]

    c.cap = 4096
    c.buf = <unsigned char *>malloc(c.cap)

    # seed propagation with single-cell lines, then search
    for i in range(c.nlines):
        if c.cnt[i] == 1:
            c.queue[c.nqueue] = i
            c.nqueue += 1
    if _propagate(&c, 0):
        _descend(&c, 0, 0)

    try:
        result = SearchResult(
            (<char *>c.buf)[:c.count * c.ncells] if c.count else b"",
            int(c.count), int(c.nodes), not bool(c.aborted))
    finally:
        free(c.ls); free(c.lcell); free(c.lcoeff); free(c.unit)
        free(c.rem); free(c.cnt); free(c.lo); free(c.hi)
        free(c.cs); free(c.cline); free(c.ccoeff)
        free(c.ks); free(c.kother); free(c.kbelow)
        free(c.unit_lo); free(c.unit_hi)
        free(c.val); free(c.trail); free(c.queue)
        free(c.branch_order); free(c.prefix)
        free(c.buf)
    return result

"""Deterministic, parallelizable enumeration of magic-square families.

Work is partitioned into disjoint search tasks keyed by branch-value
prefixes.  Each task is processed independently (optionally by a process
pool) and the merged result is sorted into ascending row-major order, so
output is byte-identical for any worker count.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from multiprocessing import get_context
from pathlib import Path
from typing import Iterator

import numpy as np

from . import kernels
from .core import FamilySpec, MsqError, Square

CANONICAL_FORM = "lexmin-rowmajor-v1"
DEFAULT_GRANULARITY = 2


class PartialResultError(MsqError):
    """Enumeration ran out of budget; carries a resumable checkpoint."""

    def __init__(self, message: str, checkpoint: dict):
        super().__init__(message)
        self.checkpoint = checkpoint


@dataclass(frozen=True)
class SearchTask:
    spec: FamilySpec
    branch_values: tuple[int, ...]
    prefix: dict[int, int] = field(compare=False)         # cell -> value, forced cells included
    used_mask: int = field(compare=False, default=0)


@dataclass
class EnumerationReport:
    spec: FamilySpec
    total_count: int
    elapsed: float
    config: str
    backend: str
    workers: int
    nodes: int

    def to_json(self) -> dict:
        return {
            "family": self.spec.family,
            "order": self.spec.order,
            "count": self.total_count,
            "elapsed_s": round(self.elapsed, 3),
            "config": self.config,
            "canonical_form": CANONICAL_FORM,
            "backend": self.backend,
            "workers": self.workers,
            "nodes": self.nodes,
        }


def partition_tasks(spec: FamilySpec, granularity: int = DEFAULT_GRANULARITY) -> list[SearchTask]:
    """Split one family's search into disjoint resumable tasks.

    Tasks are keyed by the first ``granularity`` branch decisions; their
    solution sets partition the full set.  A granularity deeper than the
    search tree falls back to the deepest available split.
    """
    if granularity < 1:
        raise ValueError(f"granularity must be >= 1, got {granularity}")
    plan = kernels.build_plan(spec)
    tasks = []
    for values in kernels.branch_prefixes(plan, granularity):
        assignment, used = _replay(plan, values)
        tasks.append(SearchTask(spec, values, assignment, used))
    return tasks


def _replay(plan, values):
    """Recover the full assignment (forced cells included) of a prefix."""
    res = kernels.branch_prefixes(plan, 0, prefix=tuple(values))
    # depth-0 call records nothing; use the engine state via a 1-solution probe
    # instead: assign the prefix and read back the assignment.
    from .kernels import _pure
    eng = _pure._Engine(plan)
    if not eng.propagate(0):
        return {}, 0
    pos = 0
    order = plan.branch_order
    for v in values:
        while pos < len(order) and eng.val[order[pos]]:
            pos += 1
        qmark = len(eng.queue)
        if not (eng.assign(order[pos], v) and eng.propagate(qmark)):
            raise MsqError(f"invalid task prefix {values!r}")
        pos += 1
    assignment = {c: eng.val[c] for c in range(plan.ncells) if eng.val[c]}
    return assignment, eng.used


_POOL_PLAN = None


def _pool_init(plan):
    global _POOL_PLAN
    _POOL_PLAN = plan


def _pool_run(prefix):
    res = kernels.run_plan(_POOL_PLAN, prefix=tuple(prefix))
    return res.solutions, res.count, res.nodes


def enumerate_array(spec: FamilySpec, workers: int = 1,
                    granularity: int = DEFAULT_GRANULARITY,
                    time_limit: float | None = None,
                    cache_dir: str | os.PathLike | None = None,
                    checkpoint: dict | None = None) -> tuple[np.ndarray, EnumerationReport]:
    """Enumerate one family into a sorted (count, n*n) uint8 array.

    Every row is the unique lexicographically-minimal representative of its
    D4 orbit; rows are in ascending row-major order.  With ``time_limit``
    set, an exceeded budget raises PartialResultError whose checkpoint can
    be passed back in to resume (completed tasks are re-read from
    ``cache_dir``).
    """
    t0 = time.monotonic()
    plan = kernels.build_plan(spec)
    prefixes = kernels.branch_prefixes(plan, granularity)
    fingerprint = spec.fingerprint()

    if checkpoint is not None:
        if checkpoint.get("config") != fingerprint:
            raise MsqError("checkpoint does not match this family configuration")
        if checkpoint.get("granularity") != granularity:
            raise MsqError("checkpoint granularity mismatch")
        done = int(checkpoint.get("completed", 0))
        cache_dir = cache_dir or checkpoint.get("cache_dir")
    else:
        done = 0

    cache = Path(cache_dir) if cache_dir is not None else None
    if cache is not None:
        cache.mkdir(parents=True, exist_ok=True)

    def task_file(i: int) -> Path:
        return cache / f"{fingerprint}.task{i:05d}.npy"

    buffers: list[bytes] = []
    counts = 0
    nodes = 0
    for i in range(done):
        part = np.load(task_file(i))
        buffers.append(part.tobytes())
        counts += len(part)

    def out_of_time() -> bool:
        return time_limit is not None and time.monotonic() - t0 > time_limit

    def handle(i: int, solutions: bytes, cnt: int):
        nonlocal counts
        if cache is not None:
            arr = np.frombuffer(solutions, dtype=np.uint8).reshape(-1, plan.ncells)
            np.save(task_file(i), arr)
        buffers.append(solutions)
        counts += cnt

    completed = done
    aborted = False
    todo = prefixes[done:]
    if workers <= 1:
        for off, prefix in enumerate(todo):
            sols, cnt, nd = _pool_init(plan) or _pool_run(prefix)
            handle(done + off, sols, cnt)
            nodes += nd
            completed += 1
            if out_of_time() and completed < len(prefixes):
                aborted = True
                break
    elif todo:
        ctx = get_context("fork")
        with ctx.Pool(workers, initializer=_pool_init, initargs=(plan,)) as pool:
            results = pool.imap(_pool_run, todo, chunksize=1)
            for off, (sols, cnt, nd) in enumerate(results):
                handle(done + off, sols, cnt)
                nodes += nd
                completed += 1
                if out_of_time() and completed < len(prefixes):
                    aborted = True
                    pool.terminate()
                    break

    if aborted:
        ckpt = {
            "config": fingerprint,
            "granularity": granularity,
            "completed": completed,
            "tasks": len(prefixes),
            "count_so_far": counts,
            "cache_dir": str(cache) if cache is not None else None,
        }
        raise PartialResultError(
            f"time budget exceeded after {completed}/{len(prefixes)} tasks", ckpt)

    arr = np.frombuffer(b"".join(buffers), dtype=np.uint8).reshape(-1, plan.ncells)
    order = np.lexsort(arr.T[::-1])
    arr = np.ascontiguousarray(arr[order])
    report = EnumerationReport(
        spec=spec, total_count=len(arr), elapsed=time.monotonic() - t0,
        config=fingerprint, backend=kernels.BACKEND, workers=workers, nodes=nodes)
    return arr, report


def enumerate_family(spec: FamilySpec, workers: int = 1,
                     **kwargs) -> tuple[Iterator[Square], EnumerationReport]:
    """Stream every square of the family once per D4 orbit, ascending."""
    arr, report = enumerate_array(spec, workers=workers, **kwargs)
    n = spec.order

    def stream():
        for row in arr:
            yield Square(n, tuple(int(v) for v in row))

    return stream(), report


def squares_to_array(squares, order: int) -> np.ndarray:
    rows = [sq.cells for sq in squares]
    return np.array(rows, dtype=np.uint8).reshape(-1, order * order)


def save_checkpoint(checkpoint: dict, path: str | os.PathLike):
    Path(path).write_text(json.dumps(checkpoint, indent=2) + "\n")


def load_checkpoint(path: str | os.PathLike) -> dict:
    return json.loads(Path(path).read_text())

"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the pure
Python twin is always available.  Set MSQ_KERNEL=pure (or fast) to force a
backend, e.g. for the equivalence tests and benchmarks.
"""

import os

from . import _pure
from ._pure import SearchResult, branch_prefixes
from .plan import Line, SearchPlan, build_plan

try:
    from . import _fast
except ImportError:
    _fast = None

_forced = os.environ.get("MSQ_KERNEL", "").strip().lower()
if _forced == "pure":
    _impl = _pure
elif _forced == "fast":
    if _fast is None:
        raise ImportError("MSQ_KERNEL=fast but the compiled kernel is not built")
    _impl = _fast
else:
    _impl = _fast if _fast is not None else _pure

BACKEND = _impl.BACKEND_NAME
run_plan = _impl.run_plan

run_plan_pure = _pure.run_plan
run_plan_fast = _fast.run_plan if _fast is not None else None

__all__ = [
    "BACKEND", "Line", "SearchPlan", "SearchResult", "branch_prefixes",
    "build_plan", "run_plan", "run_plan_fast", "run_plan_pure",
]

"""Import-time selection of the best-response solver kernel.

The compiled Cython kernel (`timeline_contest._fast`) is used when it built
successfully and every utility in the instance has a typed form (linear or
logarithmic).  Otherwise the pure-Python kernel in `iterative` runs; both
implement the same sweep semantics.  TIMELINE_CONTEST_BACKEND=python|compiled
overrides the automatic choice.
"""

from __future__ import annotations

import os

from .core import UsageError

try:
    from . import _fast  # type: ignore[attr-defined]

    HAVE_COMPILED = True
except ImportError:
    _fast = None
    HAVE_COMPILED = False


def requested_backend() -> str:
    mode = os.environ.get("TIMELINE_CONTEST_BACKEND", "auto").lower()
    if mode not in ("auto", "python", "compiled"):
        raise UsageError(
            f"TIMELINE_CONTEST_BACKEND must be auto, python or compiled, got {mode!r}"
        )
    return mode


def resolve_backend(typed: bool) -> str:
    """Actual backend for one solve: 'compiled' or 'python'."""
    mode = requested_backend()
    if mode == "python":
        return "python"
    if mode == "compiled":
        if not HAVE_COMPILED:
            raise UsageError("compiled backend requested but timeline_contest._fast is not built")
        if not typed:
            raise UsageError("compiled backend cannot handle custom utility callables")
        return "compiled"
    return "compiled" if (HAVE_COMPILED and typed) else "python"


def active_backend() -> str:
    """Backend that a typed instance would use right now."""
    try:
        return resolve_backend(typed=True)
    except UsageError:
        return "python"

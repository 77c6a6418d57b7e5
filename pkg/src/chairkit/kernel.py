"""Selects the active text kernel at import time.

The compiled extension (``_speedups``) is preferred when present; the
pure-Python fallback is used otherwise.  Set ``CHAIRKIT_PURE=1`` to force
the fallback (used by the parity tests and the kernel benchmark).
"""

from __future__ import annotations

import os

from . import _pykernel

if os.environ.get("CHAIRKIT_PURE", "") not in ("", "0"):
    _impl = _pykernel
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernel

KERNEL_NAME: str = _impl.KERNEL_NAME
singularize = _impl.singularize
tokenize_spans = _impl.tokenize_spans
extract = _impl.extract

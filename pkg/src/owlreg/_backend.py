"""Kernel backend selection.

Prefers the compiled ``owlreg._pav`` extension and falls back to the
pure-Python implementation when it is not available.  The choice can be
pinned with the OWLREG_BACKEND environment variable (``c`` or ``python``);
requesting ``c`` without a built extension raises ImportError.
"""

import os

_requested = os.environ.get("OWLREG_BACKEND", "").strip().lower()

if _requested == "python":
    from . import _pav_py as _impl

    BACKEND = "python"
elif _requested == "c":
    from . import _pav as _impl

    BACKEND = "c"
elif _requested:
    raise ValueError(f"OWLREG_BACKEND must be 'c' or 'python', got {_requested!r}")
else:
    try:
        from . import _pav as _impl

        BACKEND = "c"
    except ImportError:
        from . import _pav_py as _impl

        BACKEND = "python"

isotonic_nonincreasing = _impl.isotonic_nonincreasing
prox_on_sorted = _impl.prox_on_sorted

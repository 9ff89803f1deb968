"""Selects the simplex pivot kernel at import time.

The compiled Cython kernel is preferred; the pure-numpy fallback is used
when the extension is unavailable.  Set ``POLYREG_LP_BACKEND=py`` or
``=c`` to force a choice (forcing ``c`` without the extension raises).
"""

import os

from . import _simplex_py

_forced = os.environ.get("POLYREG_LP_BACKEND", "").strip().lower()

if _forced == "py":
    kernel = _simplex_py
elif _forced == "c":
    from . import _simplex_c as kernel  # noqa: F401  (ImportError is the answer)
else:
    try:
        from . import _simplex_c as kernel
    except ImportError:
        kernel = _simplex_py


def backend_name() -> str:
    """'c' when the compiled kernel is active, 'py' for the fallback."""
    return kernel.BACKEND

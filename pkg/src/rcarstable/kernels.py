"""Backend selection for the hot loops.

The compiled extension ``rcarstable._core`` is used when it imports;
otherwise, or when ``RCARSTABLE_PURE_PYTHON=1`` is set, the numpy
implementation in ``rcarstable._pycore`` takes over.  Both expose the
same functions and consume random numbers in the same order.
"""

import os

if os.environ.get("RCARSTABLE_PURE_PYTHON", "").strip() not in ("", "0"):
    from . import _pycore as _impl
else:
    try:
        from . import _core as _impl
    except ImportError:  # extension not built
        from . import _pycore as _impl

BACKEND = _impl.BACKEND

draw_increments = _impl.draw_increments
draw_innovations = _impl.draw_innovations
rcar_recursion = _impl.rcar_recursion
rcar_terminal = _impl.rcar_terminal
lepage_sum = _impl.lepage_sum


def backends():
    """Import every available backend module, keyed by name."""
    from . import _pycore

    found = {"python": _pycore}
    try:
        from . import _core
    except ImportError:
        pass
    else:
        found["cython"] = _core
    return found

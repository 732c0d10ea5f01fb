"""Hot numeric kernels with a compiled core and a numpy fallback.

The Cython extension ``_fast`` is used when it was built; otherwise the
pure numpy backend in ``_pure`` takes over transparently. Set
``YIELDCAST_KERNELS=pure`` or ``=compiled`` to force one backend (the
latter raises if the extension is missing). ``BACKEND`` reports the
active choice; ``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

from . import _pure

_requested = os.environ.get("YIELDCAST_KERNELS", "auto").strip().lower()
if _requested not in ("", "auto", "pure", "compiled"):
    raise ImportError(
        f"YIELDCAST_KERNELS must be 'auto', 'pure' or 'compiled', got {_requested!r}"
    )

BACKEND = "pure"
_impl = _pure
if _requested in ("", "auto", "compiled"):
    try:
        from . import _fast as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "compiled kernels requested but yieldcast.kernels._fast "
                "is not built; reinstall with a C compiler available"
            ) from None

lasso_cd = _impl.lasso_cd
best_split = _impl.best_split
svr_smo = _impl.svr_smo

__all__ = ["BACKEND", "lasso_cd", "best_split", "svr_smo"]

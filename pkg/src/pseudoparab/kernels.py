"""Backend selection for the array kernels.

Prefers the compiled Cython extension when it is importable; falls back to
the pure NumPy twin otherwise.  Set the environment variable
``PSEUDOPARAB_PURE=1`` (before import) to force the pure backend, e.g. for
benchmark comparisons.
"""

from __future__ import annotations

import os

if os.environ.get("PSEUDOPARAB_PURE", "") not in ("", "0"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as _impl  # type: ignore[no-redef]

BACKEND = _impl.BACKEND

cumtrapz1 = _impl.cumtrapz1
cumtrapz2_axis0 = _impl.cumtrapz2_axis0
cumtrapz2_axis1 = _impl.cumtrapz2_axis1
interp1 = _impl.interp1
interp_columns = _impl.interp_columns
interp_rows = _impl.interp_rows
bilinear = _impl.bilinear
deriv3 = _impl.deriv3

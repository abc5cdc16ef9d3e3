"""Select the compiled kernels when available.

Set ``FACTORNORM_PURE_PYTHON=1`` to force the numpy implementations.
"""

import os

from . import _kernels_py

BACKEND = "python"
schur_sdp = _kernels_py.schur_sdp

if os.environ.get("FACTORNORM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _ext
    except ImportError:
        pass
    else:
        BACKEND = "cython"

        def schur_sdp(X, Sinv, ptr, rows, cols, vals):
            import numpy as np

            return _ext.schur_sdp(
                np.ascontiguousarray(X, dtype=np.float64),
                np.ascontiguousarray(Sinv, dtype=np.float64),
                np.ascontiguousarray(ptr, dtype=np.int64),
                np.ascontiguousarray(rows, dtype=np.int64),
                np.ascontiguousarray(cols, dtype=np.int64),
                np.ascontiguousarray(vals, dtype=np.float64),
            )

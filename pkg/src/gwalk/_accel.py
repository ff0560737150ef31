"""Backend selection for the hot kernels.

The compiled extension is used when importable; set ``GWALK_PURE_PYTHON=1``
to force the numpy fallback.
"""

import os

from gwalk import _pykernels

if os.environ.get("GWALK_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from gwalk import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

iterate_walk = _impl.iterate_walk
count_forests = _impl.count_forests

BACKENDS = {"python": _pykernels}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl
else:
    try:
        from gwalk import _ckernels

        BACKENDS["cython"] = _ckernels
    except ImportError:
        pass

"""Select the compiled IPF kernel when available.

Set ``NMIPF_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from . import _ipf_kernel_py

BACKEND = "python"
ipf_loop = _ipf_kernel_py.ipf_loop

if os.environ.get("NMIPF_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._ipf_kernel import ipf_loop  # noqa: F811
    except ImportError:
        pass
    else:
        BACKEND = "cython"

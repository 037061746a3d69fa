"""Pick the Numerov kernel implementation at import time.

The compiled extension is used when it was built; set
``QUARKSPEC_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("QUARKSPEC_PURE_PYTHON", "") not in ("", "0"):
    from ._numerov_py import profile, shoot

    BACKEND = "python"
else:
    try:
        from ._numerov_core import profile, shoot

        BACKEND = "cython"
    except ImportError:
        from ._numerov_py import profile, shoot

        BACKEND = "python"

__all__ = ["BACKEND", "profile", "shoot"]

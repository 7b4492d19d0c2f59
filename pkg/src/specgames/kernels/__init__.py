"""Rate/utility kernels evaluated inside every game round.

The compiled extension is used when it was built; otherwise the numpy
implementation is used. Set ``SPECGAMES_PURE=1`` to force the fallback.
"""

import os

from . import _pure

BACKEND = "pure"
if os.environ.get("SPECGAMES_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _fast as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pure
else:
    _impl = _pure

user_rates = _impl.user_rates
pf_utility = _impl.pf_utility

__all__ = ["BACKEND", "user_rates", "pf_utility"]

"""Backend selection for the integer kernels.

Prefers the compiled extension when it was built; falls back to the pure
Python twin otherwise. Set CONECRAFTER_PURE=1 to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("CONECRAFTER_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND
imat_mul = _impl.imat_mul
berkowitz_charpoly = _impl.berkowitz_charpoly
poly_sign_at = _impl.poly_sign_at
sign_variations = _impl.sign_variations

__all__ = [
    "BACKEND",
    "imat_mul",
    "berkowitz_charpoly",
    "poly_sign_at",
    "sign_variations",
]

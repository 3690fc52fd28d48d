"""Backend selection for the hot kernels.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
pure-Python implementation is loaded.  Setting ``SUPERFLAG_PURE=1`` forces the
fallback.
"""

import os

if os.environ.get("SUPERFLAG_PURE") == "1":
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        from . import _pykernels as _impl

BACKEND = "cython" if _impl.__name__.endswith("_ckernels") else "python"

koszul_sign = _impl.koszul_sign
qdiv = _impl.qdiv
poly_mul = _impl.poly_mul
poly_add_scaled = _impl.poly_add_scaled
poly_divmod = _impl.poly_divmod
poly_nf = _impl.poly_nf
eliminate = _impl.eliminate

__all__ = [
    "BACKEND",
    "koszul_sign",
    "qdiv",
    "poly_mul",
    "poly_add_scaled",
    "poly_divmod",
    "poly_nf",
    "eliminate",
]

"""Backend selection for the sampling kernels.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set REFLECTWALK_PURE_PYTHON=1 to force the fallback.
"""
import os

import numpy as np

from . import _fallback

BACKEND = "python"
if os.environ.get("REFLECTWALK_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _accel as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
else:
    _impl = _fallback


def _as_tables(*arrays):
    out = []
    for a in arrays:
        dtype = np.float64 if a.dtype.kind == "f" else np.int64
        out.append(np.ascontiguousarray(a, dtype=dtype))
    return out


def coupled_paths(uniforms, down_lo, next_down_lo, next_up_lo,
                  down_hi, next_down_hi, next_up_hi, start_lo, start_hi, backend=None):
    impl = _pick(backend)
    args = _as_tables(uniforms, down_lo, next_down_lo, next_up_lo, down_hi, next_down_hi, next_up_hi)
    return impl.coupled_paths(*args, int(start_lo), int(start_hi))


def walk_functionals(z, drifts, scale, backend=None):
    impl = _pick(backend)
    z = np.ascontiguousarray(z, dtype=np.float64)
    drifts = np.ascontiguousarray(drifts, dtype=np.float64)
    return impl.walk_functionals(z, drifts, float(scale))


def available_backends():
    names = ["python"]
    if _impl is not _fallback or _has_accel():
        names.append("cython")
    return names


def _has_accel():
    try:
        from . import _accel  # noqa: F401
    except ImportError:
        return False
    return True


def _pick(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _fallback
    if backend == "cython":
        from . import _accel

        return _accel
    raise ValueError(f"unknown backend {backend!r}")

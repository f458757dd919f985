"""Kernel backend selection.

The compiled extension is used when it imported cleanly; otherwise the
numpy fallback takes over. Set WQNET_KERNELS=py to force the fallback or
WQNET_KERNELS=c to require the extension (raising if it is missing).
"""
import os

from . import _pykernels

_requested = os.environ.get("WQNET_KERNELS", "").strip().lower()
if _requested not in ("", "c", "py"):
    raise ValueError(f"WQNET_KERNELS must be 'c' or 'py', got {_requested!r}")

if _requested == "py":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        if _requested == "c":
            raise
        _impl = _pykernels

BACKEND = _impl.BACKEND_NAME

conv1d_forward = _impl.conv1d_forward
conv1d_backward = _impl.conv1d_backward
lstm_forward = _impl.lstm_forward
lstm_backward = _impl.lstm_backward


def available_backends() -> dict:
    """Importable backends by name; always includes 'py'."""
    found = {"py": _pykernels}
    try:
        from . import _ckernels
        found["c"] = _ckernels
    except ImportError:
        pass
    return found

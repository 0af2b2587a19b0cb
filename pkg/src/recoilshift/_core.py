"""Kernel selection.

The compiled extension is used when importable; setting ``RECOILSHIFT_PURE``
to a non-empty value other than ``0`` forces the numpy fallback.
"""

import os

from . import _fallback

PROFILE_CONSTANT = _fallback.PROFILE_CONSTANT
PROFILE_COSINE = _fallback.PROFILE_COSINE
PROFILE_GAUSSIAN = _fallback.PROFILE_GAUSSIAN
STATUS_OK = _fallback.STATUS_OK
STATUS_MAX_STEPS = _fallback.STATUS_MAX_STEPS
STATUS_STEP_UNDERFLOW = _fallback.STATUS_STEP_UNDERFLOW


def _want_pure():
    return os.environ.get("RECOILSHIFT_PURE", "") not in ("", "0")


def load_backend(pure=None):
    """Return the kernel module; ``pure=True`` always gives the fallback."""
    if pure is None:
        pure = _want_pure()
    if not pure:
        try:
            from . import _kernels
            return _kernels
        except ImportError:
            pass
    return _fallback


backend = load_backend()
BACKEND_NAME = "compiled" if backend is not _fallback else "python"

integrate_chains = backend.integrate_chains
# the packet sum is a small matrix product; numpy's BLAS path beat a compiled loop
packet_sum = _fallback.packet_sum

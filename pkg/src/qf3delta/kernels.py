"""Kernel backend selection: compiled extension when available, numpy fallback.

Set ``QF3DELTA_PURE=1`` to force the pure backend (used by the benchmark and
the backend-parity tests).
"""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("QF3DELTA_PURE") == "1":
    _impl = _fallback
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on build environment
        _impl = _fallback
        BACKEND = "pure"

count_sharp_range = _impl.count_sharp_range
count_weighted_range = _impl.count_weighted_range
generic_brute = _impl.generic_brute
generic_buckets = _impl.generic_buckets
quad_phase_sum = _impl.quad_phase_sum
hooley_phase_spectrum = _impl.hooley_phase_spectrum

pure = _fallback


def compiled_or_none():
    return _impl if BACKEND == "compiled" else None

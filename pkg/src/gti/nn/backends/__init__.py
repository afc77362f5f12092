"""Convolution kernel backend selection.

Two interchangeable implementations of the convolution primitives exist:

* ``numpy`` - im2col plus BLAS matmul. At the block sizes this package
  trains on (4..64 wide, few channels), vectorized GEMM wins every shape
  we benchmarked, so it is the default (see benchmarks/bench_backends.py).
* ``cython`` - compiled direct-loop kernels, built by setup.py when a
  compiler is available. Kept as an independent implementation for
  cross-checking and for environments without a fast BLAS.

Set GTI_NN_BACKEND=cython (or =numpy) to force a choice; forcing cython
raises if the extension was not built.
"""

from __future__ import annotations

import os

from gti.nn.backends import numpy_backend

_choice = os.environ.get("GTI_NN_BACKEND", "auto").strip().lower()

if _choice in ("auto", "", "numpy"):
    _impl = numpy_backend
elif _choice == "cython":
    from gti.nn.backends import _convkern as _impl  # type: ignore[no-redef]
else:
    raise ValueError(f"unknown GTI_NN_BACKEND value: {_choice!r}")

BACKEND = _impl.NAME
conv_fwd = _impl.conv_fwd
conv_bwd_data = _impl.conv_bwd_data
conv_bwd_kernel = _impl.conv_bwd_kernel
conv_out_hw = _impl.conv_out_hw


def available_backends() -> dict[str, object]:
    """Name -> module for every importable backend."""
    found: dict[str, object] = {"numpy": numpy_backend}
    try:
        from gti.nn.backends import _convkern
        found["cython"] = _convkern
    except ImportError:
        pass
    return found


__all__ = ["BACKEND", "conv_fwd", "conv_bwd_data", "conv_bwd_kernel",
           "conv_out_hw", "available_backends"]

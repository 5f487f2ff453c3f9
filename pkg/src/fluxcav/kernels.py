"""Backend selection for the hot grid kernel.

The compiled Cython extension is used when importable; otherwise (or when the
environment variable ``FLUXCAV_PURE`` is set to a non-empty value) the
pure-numpy implementation takes over.  Both expose the same functions with
identical semantics; ``tests/test_kernels.py`` checks their parity and
``benchmarks/benchmark_kernels.py`` compares their speed.
"""

import os

from . import _kernels_np as numpy_backend

try:
    from . import _kernels_cy as compiled_backend
except ImportError:  # extension not built; fall back silently
    compiled_backend = None

_force_pure = os.environ.get("FLUXCAV_PURE", "") not in ("", "0")
active = numpy_backend if (_force_pure or compiled_backend is None) else compiled_backend

BACKEND = active.BACKEND

susceptibility_grid = active.susceptibility_grid

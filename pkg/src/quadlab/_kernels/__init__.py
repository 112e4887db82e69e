"""Hot escape-time kernels: compiled extension with a pure-numpy fallback.

Importing this package selects the compiled Cython module when it built
successfully and silently falls back to the vectorized numpy twin otherwise;
``BACKEND`` records which one is active.  Both expose the same callables:
``lambert_w0``, ``teardrop_escape_grid``, ``exp_escape_grid``.
"""

from . import _impl_py

try:  # pragma: no cover - depends on the build environment
    from . import _impl_c as _impl
    BACKEND = "compiled"
except ImportError:  # pragma: no cover
    _impl = _impl_py
    BACKEND = "python"

lambert_w0 = _impl.lambert_w0
teardrop_escape_grid = _impl.teardrop_escape_grid
exp_escape_grid = _impl.exp_escape_grid

# always-available references for benchmarks and cross-checks
python_impl = _impl_py
active_impl = _impl

__all__ = ["BACKEND", "lambert_w0", "teardrop_escape_grid", "exp_escape_grid",
           "python_impl", "active_impl"]

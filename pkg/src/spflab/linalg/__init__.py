"""Exact linear algebra over F_p.

The elimination kernel is selected at import: the compiled `_fastgf`
extension when it built, otherwise the numpy fallback in `_pykernels`.
`BACKEND` records which one is active; `benchmarks/bench_elimination.py`
compares the two.
"""

from . import _pykernels

try:
    from . import _fastgf as _kernels

    BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on build environment
    _kernels = _pykernels
    BACKEND = "python"

from .dense import (
    BlockMatrix,
    FpMatrix,
    kernel_basis,
    quotient_basis,
    rank,
    rref,
    solve,
)

__all__ = [
    "BACKEND",
    "BlockMatrix",
    "FpMatrix",
    "kernel_basis",
    "quotient_basis",
    "rank",
    "rref",
    "solve",
]

"""Dense complex-matrix primitives and the real-Frobenius geometry.

Matrices are C-contiguous ``numpy.complex128`` arrays: row-major storage
where each entry is an interleaved (re, im) pair of 64-bit floats. Rows are
the unit of projection downstream, so row-contiguous access dominates.
Vectors of row norms, multipliers etc. are ``numpy.float64`` arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, InputError

# Type aliases used throughout the package. A ComplexMatrix is a validated
# 2-D complex128 ndarray; a RealVector is a finite 1-D float64 ndarray.
ComplexMatrix = np.ndarray
RealVector = np.ndarray


def cmatrix(data) -> ComplexMatrix:
    """Build a validated complex matrix.

    Accepts anything ``np.asarray`` does, normalizes to a C-contiguous
    complex128 2-D array, and rejects non-finite entries so a diverging
    caller fails loudly at a defined boundary instead of propagating NaN.
    """
    m = np.ascontiguousarray(np.asarray(data, dtype=np.complex128))
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise InputError("matrix entries must be finite (no NaN/Inf)")
    return m


def rvector(data) -> RealVector:
    """Build a validated 1-D float64 vector (finite entries only)."""
    v = np.ascontiguousarray(np.asarray(data, dtype=np.float64))
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got ndim={v.ndim}")
    if not np.all(np.isfinite(v)):
        raise InputError("vector entries must be finite (no NaN/Inf)")
    return v


def re_frob_inner(x: ComplexMatrix, y: ComplexMatrix) -> float:
    """Real part of the Frobenius inner product, Re(trace(x^H y)).

    Equals sum_ij [Re(x_ij)Re(y_ij) + Im(x_ij)Im(y_ij)]; symmetric in its
    arguments and bilinear over real scalars. This is the inner product
    under which the complex matrix space behaves as a real vector space.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise DimensionError(f"shape mismatch: {x.shape} vs {y.shape}")
    return float(np.vdot(x, y).real)


def frob_norm(x: ComplexMatrix) -> float:
    """Frobenius norm: sqrt of the summed squared moduli of all entries."""
    x = np.asarray(x)
    return float(np.sqrt(max(np.vdot(x, x).real, 0.0)))


def row_sq_norms(w: ComplexMatrix) -> RealVector:
    """Squared Euclidean norm of each row: entry n is sum_k |w[n,k]|^2."""
    w = np.asarray(w)
    re = np.ascontiguousarray(w.real)
    im = np.ascontiguousarray(w.imag)
    return np.einsum("ij,ij->i", re, re) + np.einsum("ij,ij->i", im, im)


def adjoint_product(x: ComplexMatrix, y: ComplexMatrix) -> ComplexMatrix:
    """Conjugate-transpose product x^H y.

    For x == y the result is Hermitian positive semidefinite; this is the
    building block for the cached normal-equation matrices.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.ndim != 2 or y.ndim != 2 or x.shape[0] != y.shape[0]:
        raise DimensionError(
            f"inner-dimension mismatch: {x.shape} adjoint-times {y.shape}"
        )
    return np.ascontiguousarray(x.conj().T @ y)

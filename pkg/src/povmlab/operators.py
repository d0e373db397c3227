"""Dense complex vectors and operators on finite-dimensional spaces.

Vectors are one-dimensional complex ndarrays, operators are square complex
ndarrays.  Everything here is a thin, validating layer over numpy so the
measurement layer can state its contracts in terms of a handful of named
operations.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch

__all__ = [
    "as_vector",
    "as_operator",
    "basis_vector",
    "identity",
    "inner",
    "norm",
    "outer",
    "projector",
    "adjoint",
    "tensor_vec",
    "tensor_op",
    "hermiticity_residual",
    "is_hermitian",
    "is_positive",
    "operator_norm",
    "commutator_norm",
]

# Hermiticity / positivity slack used when the caller does not override it.
DEFAULT_TOL = 1e-10


def as_vector(entries) -> np.ndarray:
    """Coerce to a 1-d complex array, rejecting anything of other rank."""
    v = np.asarray(entries, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise DimensionMismatch(f"expected a nonempty 1-d vector, got shape {v.shape}")
    return v


def as_operator(entries) -> np.ndarray:
    """Coerce to a square 2-d complex array."""
    a = np.asarray(entries, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatch(f"expected a square operator, got shape {a.shape}")
    return a


def basis_vector(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def inner(a, b) -> complex:
    """Inner product, conjugate-linear in the first argument."""
    a = as_vector(a)
    b = as_vector(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"vector dims {a.size} and {b.size} differ")
    return complex(np.vdot(a, b))


def norm(a) -> float:
    return float(np.linalg.norm(as_vector(a)))


def outer(a, b) -> np.ndarray:
    """Rank-one operator |a><b|."""
    a = as_vector(a)
    b = as_vector(b)
    return np.outer(a, b.conj())


def projector(a) -> np.ndarray:
    """Projector onto the line spanned by a unit vector."""
    return outer(a, a)


def adjoint(a) -> np.ndarray:
    return as_operator(a).conj().T


def tensor_vec(a, b) -> np.ndarray:
    """Kronecker product of vectors; index (i, j) maps to i*dim_b + j."""
    return np.kron(as_vector(a), as_vector(b))


def tensor_op(a, b) -> np.ndarray:
    """Kronecker product of operators, same index convention as tensor_vec."""
    return np.kron(as_operator(a), as_operator(b))


def hermiticity_residual(a) -> float:
    """Largest entry of |A - A*|; zero iff A is Hermitian."""
    a = as_operator(a)
    return float(np.max(np.abs(a - a.conj().T)))


def is_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    return hermiticity_residual(a) <= tol


def is_positive(a, tol: float = DEFAULT_TOL) -> bool:
    """True when A is Hermitian within tol and its spectrum is >= -tol."""
    a = as_operator(a)
    if not is_hermitian(a, tol):
        return False
    eigs = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    return bool(eigs.min() >= -tol)


def operator_norm(a) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(as_operator(a), 2))


def commutator_norm(a, b) -> float:
    """Operator norm of AB - BA."""
    a = as_operator(a)
    b = as_operator(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"operator dims {a.shape[0]} and {b.shape[0]} differ")
    return float(np.linalg.norm(a @ b - b @ a, 2))

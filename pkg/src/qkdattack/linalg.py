"""Small dense linear algebra helpers for low-dimensional quantum states.

Everything here works on explicit numpy arrays (complex128); dimensions
never exceed 16, so clarity and strict validation win over cleverness.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    """Central numerical policy used across the package."""

    hermiticity: float = 1e-10
    psd: float = 1e-9
    reconstruction: float = 1e-9
    unit_trace: float = 1e-12
    completeness: float = 1e-9
    probability_floor: float = 1e-14


TOL = Tolerances()


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def is_hermitian(a: np.ndarray, tol: float = TOL.hermiticity) -> bool:
    return bool(np.max(np.abs(a - dagger(a))) <= tol)


def is_psd(a: np.ndarray, tol: float = TOL.psd) -> bool:
    """Hermitian with all eigenvalues >= -tol."""
    if not is_hermitian(a):
        return False
    return bool(np.linalg.eigvalsh(a)[0] >= -tol)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, row-major subsystem ordering."""
    return np.kron(a, b)


def partial_trace(rho: np.ndarray, dims: list[int], keep: set[int] | list[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Parameters
    ----------
    rho : square matrix on the tensor product of subsystems with
        dimensions ``dims`` (row-major ordering).
    dims : subsystem dimensions, e.g. [2, 2, 4].
    keep : indices of the subsystems to retain, in original order.
    """
    n = len(dims)
    expected = prod(dims)
    if rho.shape != (expected, expected):
        raise ValueError(
            f"partial_trace: expected a {expected}x{expected} matrix for dims {dims}, "
            f"got {rho.shape[0]}x{rho.shape[1]}"
        )
    keep = sorted(set(keep))
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"partial_trace: keep indices {keep} out of range for {n} subsystems")
    t = rho.reshape(dims + dims)
    cur = n
    for i in [j for j in range(n) if j not in keep][::-1]:
        t = np.trace(t, axis1=i, axis2=i + cur)
        cur -= 1
    d_keep = prod(dims[k] for k in keep)
    return t.reshape(d_keep, d_keep)


def herm_eig(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues descending, eigenvectors as matching columns).
    """
    if not is_hermitian(a):
        raise ValueError("herm_eig: input is not Hermitian within tolerance")
    w, v = np.linalg.eigh(a)
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def inv_sqrt_psd(a: np.ndarray, epsilon: float = 1e-10) -> np.ndarray:
    """Inverse square root of a PSD matrix, pseudo-inverse convention.

    Eigenvalues below ``epsilon`` are treated as zero, so R @ a @ R is the
    projector onto the support of ``a``.
    """
    w, v = herm_eig(a)
    if w[-1] < -1e-8:
        raise ValueError(f"inv_sqrt_psd: negative eigenvalue {w[-1]:.3e}")
    inv = np.where(w > epsilon, 1.0 / np.sqrt(np.maximum(w, epsilon)), 0.0)
    return (v * inv) @ dagger(v)

"""Dense complex linear algebra for small multipartite operators.

Everything here works on plain numpy arrays; states.py adds the typed
wrappers. All functions are pure and never mutate their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Hard cap on operator dimension; desk scale tops out at three qubits (8)
# with headroom. Raise it module-wide if you genuinely need more.
MAX_DIM = 64

# Max entrywise asymmetry tolerated before a matrix is rejected as
# non-Hermitian; inside the band inputs are symmetrized instead.
HERMITICITY_TOL = 1e-10

# Eigenvalues in [-EIGENVALUE_CLIP, 0) are treated as rounding noise and
# clipped to zero; anything more negative is an error.
EIGENVALUE_CLIP = 1e-10

SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])

# sigma_y (x) sigma_y, the two-qubit spin-flip conjugator (a real matrix).
_SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y).real


def as_matrix(m) -> np.ndarray:
    """Validate and return `m` as a finite square complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {a.shape[0]} exceeds the cap of {MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two square matrices.

    Entry ((i*db + k), (j*db + l)) of the result is a[i, j] * b[k, l], so the
    first factor is the most significant subsystem.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise ValueError(
            f"tensor dimension {a.shape[0] * b.shape[0]} exceeds the cap of {MAX_DIM}"
        )
    return np.kron(a, b)


def partial_trace(m, dims, keep) -> np.ndarray:
    """Trace out every subsystem of `m` not listed in `keep`.

    `dims` lists the subsystem dimensions, most significant first; `keep` is
    a nonempty, strictly increasing collection of subsystem indices. The
    result acts on the kept subsystems in their original order, and has the
    same trace as `m`.
    """
    m = as_matrix(m)
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"subsystem dimensions must be positive, got {dims}")
    total = math.prod(dims)
    if total != m.shape[0]:
        raise ValueError(
            f"product of dims {dims} is {total} but the matrix has dimension {m.shape[0]}"
        )
    keep = tuple(int(i) for i in keep)
    if not keep:
        raise ValueError("keep set must not be empty")
    if list(keep) != sorted(set(keep)) or keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep must be a strictly increasing subset of 0..{len(dims) - 1}")

    n = len(dims)
    t = m.reshape(dims + dims)
    # Row axis i gets label i, column axis i gets label n+i when kept and the
    # row label when traced; einsum then contracts the traced pairs.
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    d_keep = math.prod(dims[i] for i in keep)
    return np.einsum(t, row + col, out).reshape(d_keep, d_keep)


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    `eigenvectors[:, i]` is the unit eigenvector paired with `eigenvalues[i]`.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eig_hermitian(m) -> HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix, sorted descending.

    Inputs asymmetric beyond HERMITICITY_TOL are rejected; smaller asymmetry
    is removed by averaging with the conjugate transpose. LinAlgError
    propagates if the iterative solver fails to converge.
    """
    m = as_matrix(m)
    asym = float(np.max(np.abs(m - m.conj().T)))
    if asym > HERMITICITY_TOL:
        raise ValueError(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    return HermitianSpectrum(w[::-1].copy(), v[:, ::-1].copy())


def sqrt_psd(m) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in [-EIGENVALUE_CLIP, 0) are clipped to zero; anything more
    negative raises.
    """
    spec = eig_hermitian(m)
    w = spec.eigenvalues
    if w[-1] < -EIGENVALUE_CLIP:
        raise ValueError(f"matrix has negative eigenvalue {w[-1]:.3e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    v = spec.eigenvectors
    return (v * root) @ v.conj().T


def spin_flip(rho) -> np.ndarray:
    """Two-qubit spin flip: (sigma_y (x) sigma_y) conj(rho) (sigma_y (x) sigma_y)."""
    rho = as_matrix(rho)
    if rho.shape[0] != 4:
        raise ValueError(f"spin flip needs a two-qubit (4x4) matrix, got dim {rho.shape[0]}")
    return _SIGMA_YY @ rho.conj() @ _SIGMA_YY

"""Dense complex linear algebra for finite-dimensional Hilbert spaces.

Operators are plain two-dimensional complex ``numpy`` arrays; states are
wrapped in :class:`State` so they can carry an optional bipartite factor
structure.  Every function here is pure and never mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

HERMITIAN_RTOL = 1e-12
NORM_TOL = 1e-12
PHASE_CUTOFF = 1e-8


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


def as_operator(m) -> np.ndarray:
    """Return ``m`` as a square complex matrix, raising ``ValueError`` otherwise."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"operator must be a non-empty square matrix, got shape {arr.shape}")
    return arr


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def adjoint(m) -> np.ndarray:
    return as_operator(m).conj().T


def norm(m) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(m)))


def is_hermitian(m, rtol: float = HERMITIAN_RTOL) -> bool:
    """True when ``max |M - M^dagger| <= rtol * ||M||`` (Frobenius)."""
    arr = as_operator(m)
    dev = np.max(np.abs(arr - arr.conj().T))
    return bool(dev <= rtol * max(norm(arr), np.finfo(float).tiny))


def is_projector(m, atol: float = 1e-10) -> bool:
    arr = as_operator(m)
    return bool(
        np.max(np.abs(arr @ arr - arr)) <= atol
        and np.max(np.abs(arr - arr.conj().T)) <= atol
    )


def multiply(a, b) -> np.ndarray:
    a, b = as_operator(a), as_operator(b)
    _check_same_dim(a, b)
    return a @ b


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b`` with ``a`` acting on the first factor."""
    return np.kron(as_operator(a), as_operator(b))


def commutator(a, b) -> np.ndarray:
    a, b = as_operator(a), as_operator(b)
    _check_same_dim(a, b)
    return a @ b - b @ a


def commutator_norm(a, b) -> float:
    """Frobenius norm of ``AB - BA``."""
    return norm(commutator(a, b))


def relative_commutator_norm(a, b) -> float:
    """``||[A, B]|| / (||A|| ||B||)``; zero when either operand vanishes."""
    na, nb = norm(a), norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return commutator_norm(a, b) / (na * nb)


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first entry with modulus > 1e-8 is real positive."""
    out = np.array(vectors, dtype=complex, copy=True)
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = np.flatnonzero(np.abs(col) > PHASE_CUTOFF)
        if idx.size:
            lead = col[idx[0]]
            out[:, k] = col * (abs(lead) / lead)
    return out


def hermitian_eig(a, rtol: float = HERMITIAN_RTOL) -> Tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary matrix whose columns are
    the matching eigenvectors, phase-fixed by :func:`fix_phases`.

    Raises
    ------
    ValueError
        If ``a`` is not Hermitian within ``rtol``.
    """
    arr = as_operator(a)
    if not is_hermitian(arr, rtol):
        raise ValueError("hermitian_eig requires a Hermitian matrix")
    # symmetrise so LAPACK sees exactly the Hermitian part
    herm = 0.5 * (arr + arr.conj().T)
    values, vectors = np.linalg.eigh(herm)
    return values, fix_phases(vectors)


def svd(m) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``M = U diag(s) V^dagger`` with ``s`` descending.

    Note that ``V`` (not ``V^dagger``) is returned, so its columns are the
    right singular vectors.
    """
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError("svd expects a matrix")
    u, s, vh = np.linalg.svd(arr, full_matrices=False)
    return u, s, vh.conj().T


@dataclass(frozen=True, eq=False)
class State:
    """Normalized pure state, optionally split as a ``d1 x d2`` bipartite vector.

    The amplitudes are stored in row-major order, so amplitude ``i * d2 + j``
    multiplies ``|i> ⊗ |j>``.
    """

    amplitudes: np.ndarray
    factor_dims: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.size == 0:
            raise ValueError("state must have positive dimension")
        sq = float(np.vdot(amps, amps).real)
        if abs(sq - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: |psi|^2 = {sq!r}")
        object.__setattr__(self, "amplitudes", amps)
        if self.factor_dims is not None:
            d1, d2 = (int(d) for d in self.factor_dims)
            if d1 < 1 or d2 < 1 or d1 * d2 != amps.size:
                raise ValueError(f"factor_dims {self.factor_dims} inconsistent with dim {amps.size}")
            object.__setattr__(self, "factor_dims", (d1, d2))

    @classmethod
    def from_vector(cls, vec, factor_dims=None, normalize: bool = True) -> "State":
        amps = np.asarray(vec, dtype=complex).ravel()
        if normalize:
            n = np.linalg.norm(amps)
            if n == 0.0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / n
        return cls(amps, factor_dims)

    @classmethod
    def product(cls, chi, zeta) -> "State":
        """``chi ⊗ zeta`` tagged with its factor dimensions."""
        chi = np.asarray(chi, dtype=complex).ravel()
        zeta = np.asarray(zeta, dtype=complex).ravel()
        chi = chi / np.linalg.norm(chi)
        zeta = zeta / np.linalg.norm(zeta)
        return cls.from_vector(np.kron(chi, zeta), (chi.size, zeta.size))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def coefficient_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to the ``d1 x d2`` matrix ``M[i, j]``."""
        if self.factor_dims is None:
            raise ValueError("state has no factor structure")
        return self.amplitudes.reshape(self.factor_dims)

    def projector(self) -> np.ndarray:
        """``|psi><psi|``."""
        return np.outer(self.amplitudes, self.amplitudes.conj())


def expectation(psi: State, a) -> complex:
    """``<psi, A psi>``."""
    arr = as_operator(a)
    if arr.shape[0] != psi.dim:
        raise ValueError(f"dimension mismatch: state {psi.dim} vs operator {arr.shape[0]}")
    return complex(np.vdot(psi.amplitudes, arr @ psi.amplitudes))

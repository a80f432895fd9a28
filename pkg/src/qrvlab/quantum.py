"""Quantum-side distributions: eigenvalue weights, marginals, Schmidt form, moments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distribution import DiscreteDistribution
from .linalg import State, as_operator, expectation, is_hermitian, svd
from .spectral import ScalarFunction, SpectralDecomposition, decompose

SCHMIDT_CUTOFF = 1e-10
MAX_MOMENT = 8


def _branch_weights(psi: State, decomp: SpectralDecomposition) -> np.ndarray:
    if decomp.dim != psi.dim:
        raise ValueError(f"dimension mismatch: state {psi.dim} vs decomposition {decomp.dim}")
    v = psi.amplitudes
    # <psi, P_a psi> for every branch at once
    return np.einsum("i,kij,j->k", v.conj(), decomp.projectors, v).real


def observable_distribution(psi: State, decomp: SpectralDecomposition) -> DiscreteDistribution:
    """Weights ``<psi, P_a psi>`` on the distinct eigenvalues ``a``."""
    w = _branch_weights(psi, decomp)
    keep = w >= 1e-12
    return DiscreteDistribution(decomp.values[keep], w[keep])


def qm_distribution_of_function(
    psi: State, c, eps_eig: Optional[float] = None, eps_bin: Optional[float] = None
) -> DiscreteDistribution:
    """Distribution of the eigenvalues of ``C`` in ``psi``.

    ``eps_eig`` groups the spectrum of ``C``; ``eps_bin`` then merges any
    support points still closer than it.
    """
    c = as_operator(c)
    if not is_hermitian(c):
        raise ValueError("C must be Hermitian")
    dist = observable_distribution(psi, decompose(c, eps_eig))
    if eps_bin is not None:
        dist = DiscreteDistribution.from_points(dist.support, dist.weights, eps_bin)
    return dist


def marginal_distribution(psi: State, decomp: SpectralDecomposition, which: int) -> DiscreteDistribution:
    """Distribution of a factor observable: ``<psi, (P_a ⊗ 1) psi>`` or ``<psi, (1 ⊗ P_b) psi>``.

    ``decomp`` lives on factor ``which`` (1 or 2) only.
    """
    if psi.factor_dims is None:
        raise ValueError("marginal_distribution needs a state with factor_dims")
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    m = psi.coefficient_matrix()
    d = psi.factor_dims[which - 1]
    if decomp.dim != d:
        raise ValueError(f"decomposition dim {decomp.dim} does not match factor {which} dim {d}")
    if which == 1:
        rho = m @ m.conj().T
    else:
        rho = m.T @ m.conj()
    # tr(P_a rho) with rho the reduced density matrix of that factor
    w = np.einsum("kij,ji->k", decomp.projectors, rho).real
    keep = w >= 1e-12
    return DiscreteDistribution(decomp.values[keep], w[keep])


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``psi = sum_k alpha_k chi_k ⊗ zeta_k`` with orthonormal ``chi`` and ``zeta``.

    ``left[:, k]`` is ``chi_k`` and ``right[:, k]`` is ``zeta_k``.
    """

    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.coefficients.size)

    @property
    def factorizable(self) -> bool:
        return self.rank == 1

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,ik,jk->ij", self.coefficients, self.left, self.right).ravel()


def schmidt(psi: State, cutoff: float = SCHMIDT_CUTOFF) -> SchmidtDecomposition:
    """Schmidt decomposition via the SVD of the ``d1 x d2`` amplitude matrix.

    Only singular values above ``cutoff`` are kept, so ``rank`` is the
    Schmidt rank.
    """
    if psi.factor_dims is None:
        raise ValueError("schmidt needs a state with factor_dims")
    u, s, v = svd(psi.coefficient_matrix())
    keep = s > cutoff
    # M = U S V^dagger, so psi = sum_k s_k u_k ⊗ conj(v_k)
    return SchmidtDecomposition(s[keep], u[:, keep], v[:, keep].conj())


def schmidt_qm_distribution(
    sd: SchmidtDecomposition,
    decomp_a: SpectralDecomposition,
    decomp_b: SpectralDecomposition,
    f: ScalarFunction,
    tol: Optional[float] = None,
) -> DiscreteDistribution:
    """Quantum law of ``F(A, B)`` from the Schmidt form, keeping all cross terms.

    Each pair ``(a, b)`` gets ``sum_{k,r} alpha_k alpha_r <chi_k, P_a chi_r> <zeta_k, P_b zeta_r>``.
    """
    al = sd.coefficients
    values, weights = [], []
    for a, pa, _ in decomp_a:
        ka = sd.left.conj().T @ pa @ sd.left
        for b, pb, _ in decomp_b:
            kb = sd.right.conj().T @ pb @ sd.right
            values.append(f(a, b))
            weights.append(float(np.einsum("k,r,kr,kr->", al, al, ka, kb).real))
    return DiscreteDistribution.from_points(values, weights, tol)


def schmidt_rv_distribution(
    sd: SchmidtDecomposition,
    decomp_a: SpectralDecomposition,
    decomp_b: SpectralDecomposition,
    f: ScalarFunction,
    tol: Optional[float] = None,
) -> DiscreteDistribution:
    """Independent-combination law of ``F(A, B)`` with marginals taken from the Schmidt form.

    Only diagonal terms survive: ``sum_{k,r} alpha_k^2 alpha_r^2 <chi_k, P_a chi_k> <zeta_r, P_b zeta_r>``.
    """
    p = sd.coefficients ** 2
    values, weights = [], []
    for a, pa, _ in decomp_a:
        ra = np.einsum("ik,ij,jk->k", sd.left.conj(), pa, sd.left).real
        for b, pb, _ in decomp_b:
            rb = np.einsum("ik,ij,jk->k", sd.right.conj(), pb, sd.right).real
            values.append(f(a, b))
            weights.append(float(np.dot(p, ra) * np.dot(p, rb)))
    return DiscreteDistribution.from_points(values, weights, tol)


def qm_moment(psi: State, c, n: int, max_order: int = MAX_MOMENT) -> float:
    """``<psi, C^n psi>`` for Hermitian ``C``, computed by repeated application."""
    c = as_operator(c)
    if not is_hermitian(c):
        raise ValueError("C must be Hermitian")
    if n < 0 or n > max_order:
        raise ValueError(f"moment order must be in [0, {max_order}]")
    if c.shape[0] != psi.dim:
        raise ValueError("dimension mismatch")
    v = psi.amplitudes
    w = v
    for _ in range(n):
        w = c @ w
    return float(np.vdot(v, w).real)


def qm_free_particle_variance(psi: State, x, p, t: float = 1.0, m: float = 1.0) -> float:
    """Width of ``X + (t/m) P`` from first and second moments of ``X`` and ``P``.

    ``dx^2 + r^2 dp^2 + r (<XP + PX> - 2 <X><P>)`` with ``r = t/m``.
    """
    if m == 0:
        raise ValueError("mass must be nonzero")
    x, p = as_operator(x), as_operator(p)
    if not (is_hermitian(x) and is_hermitian(p)):
        raise ValueError("X and P must be Hermitian")
    r = t / m
    mx, mp = expectation(psi, x).real, expectation(psi, p).real
    dx2 = expectation(psi, x @ x).real - mx ** 2
    dp2 = expectation(psi, p @ p).real - mp ** 2
    return dx2 + r ** 2 * dp2 + r * correlation_term(psi, x, p)


def correlation_term(psi: State, x, p) -> float:
    """``kappa = <XP + PX> - 2 <X><P>``."""
    x, p = as_operator(x), as_operator(p)
    sym = expectation(psi, x @ p + p @ x).real
    return sym - 2.0 * expectation(psi, x).real * expectation(psi, p).real

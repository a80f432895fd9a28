"""Spectral decompositions with degeneracy grouping, and spectral calculus.

A :class:`SpectralDecomposition` stores one branch per *distinct*
eigenvalue, each with the orthogonal projector onto its eigenspace.  Exact
degeneracy does not survive floating point, so eigenvalues closer than a
tolerance are chain-merged into one branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Optional, Tuple

import numpy as np

from .binning import default_tolerance, single_linkage
from .linalg import hermitian_eig

EIG_REL_TOL = 1e-8
BIN_REL_TOL = 1e-9


@dataclass(frozen=True)
class ScalarFunction:
    """A labelled real function of one or two real arguments.

    The evaluator is opaque; ``label`` is only used in reports.
    """

    func: Callable
    arity: int = 1
    label: str = ""

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise ValueError("arity must be 1 or 2")

    def __call__(self, *args):
        if len(args) != self.arity:
            raise TypeError(f"{self.label or 'function'} takes {self.arity} argument(s)")
        return self.func(*args)

    @classmethod
    def from_table(cls, table: Mapping[float, float], label: str = "G") -> "ScalarFunction":
        """Function defined on a finite set of points, looked up by nearest key."""
        keys = np.array(sorted(table), dtype=float)
        vals = np.array([table[k] for k in sorted(table)], dtype=float)

        def lookup(a):
            return float(vals[int(np.argmin(np.abs(keys - a)))])

        return cls(lookup, 1, label)


IDENTITY = ScalarFunction(lambda a: a, 1, "a")
SQUARE = ScalarFunction(lambda a: a * a, 1, "a^2")
FIRST = ScalarFunction(lambda a, b: a, 2, "a")
SECOND = ScalarFunction(lambda a, b: b, 2, "b")
SUM = ScalarFunction(lambda a, b: a + b, 2, "a+b")
PRODUCT = ScalarFunction(lambda a, b: a * b, 2, "a*b")


def _readonly(arr) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Distinct eigenvalues with their eigenspace projectors.

    Attributes
    ----------
    values : ndarray, shape (k,)
        Distinct eigenvalues, ascending.
    projectors : ndarray, shape (k, dim, dim)
        ``projectors[i]`` projects onto the eigenspace of ``values[i]``.
    multiplicities : ndarray of int, shape (k,)
    tol : float
        Grouping tolerance used to build the branches.
    """

    values: np.ndarray
    projectors: np.ndarray
    multiplicities: np.ndarray
    tol: float = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, dtype=float)))
        object.__setattr__(self, "projectors", _readonly(np.asarray(self.projectors, dtype=complex)))
        object.__setattr__(self, "multiplicities", _readonly(np.asarray(self.multiplicities, dtype=int)))
        if not (len(self.values) == len(self.projectors) == len(self.multiplicities)):
            raise ValueError("values, projectors and multiplicities must have equal length")

    @property
    def dim(self) -> int:
        return self.projectors.shape[-1]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Tuple[float, np.ndarray, int]]:
        return iter(zip(self.values.tolist(), self.projectors, self.multiplicities.tolist()))

    def projector_for(self, value: float, atol: Optional[float] = None) -> np.ndarray:
        """Projector of the branch nearest ``value`` (must lie within ``atol``)."""
        atol = self.tol if atol is None else atol
        i = int(np.argmin(np.abs(self.values - value)))
        if abs(self.values[i] - value) > max(atol, 0.0) + 1e-12 * max(1.0, abs(value)):
            raise KeyError(f"no eigenvalue near {value!r}")
        return self.projectors[i]

    def reconstruct(self) -> np.ndarray:
        """``sum_a a P_a``."""
        return np.einsum("k,kij->ij", self.values.astype(complex), self.projectors)


def _group_eigenpairs(values, vectors, tol) -> SpectralDecomposition:
    groups = single_linkage(values, tol)
    vals, projs, mults = [], [], []
    for g in groups:
        v = vectors[:, g]
        vals.append(float(np.mean(values[g])))
        projs.append(v @ v.conj().T)
        mults.append(len(g))
    return SpectralDecomposition(np.array(vals), np.array(projs), np.array(mults), tol)


def decompose(
    a, eps_eig: Optional[float] = None, rel_tol: float = EIG_REL_TOL
) -> SpectralDecomposition:
    """Group the spectrum of a Hermitian operator into distinct-eigenvalue branches.

    ``eps_eig`` is an absolute tolerance; when omitted it defaults to
    ``rel_tol`` (``1e-8``) times the spectral range.
    """
    values, vectors = hermitian_eig(a)
    tol = default_tolerance(values, rel_tol) if eps_eig is None else float(eps_eig)
    return _group_eigenpairs(values, vectors, tol)


def operator_function(decomp: SpectralDecomposition, g) -> np.ndarray:
    """``sum_a g(a) P_a``.

    ``g`` may return complex numbers (e.g. to build ``exp(-i t A)``), in
    which case the result is normal but not Hermitian.
    """
    if isinstance(g, ScalarFunction) and g.arity != 1:
        raise ValueError("operator_function needs a one-argument function")
    coeffs = np.array([g(a) for a in decomp.values], dtype=complex)
    return np.einsum("k,kij->ij", coeffs, decomp.projectors)


def joint_function_projectors(
    decomp_a: SpectralDecomposition,
    decomp_b: SpectralDecomposition,
    f: ScalarFunction,
    eps_bin: Optional[float] = None,
) -> SpectralDecomposition:
    """Spectral decomposition of ``F(A ⊗ 1, 1 ⊗ B)`` from the factor spectra.

    The projector for a value ``c`` is the sum of ``P_a ⊗ P_b`` over all
    pairs with ``F(a, b)`` within ``eps_bin`` of ``c`` (chain-merged).
    ``decomp_a`` acts on the first tensor factor and ``decomp_b`` on the
    second.
    """
    if isinstance(f, ScalarFunction) and f.arity != 2:
        raise ValueError("joint_function_projectors needs a two-argument function")
    nb = len(decomp_b)
    fvals = np.array(
        [float(f(a, b)) for a in decomp_a.values for b in decomp_b.values], dtype=float
    )
    tol = default_tolerance(fvals, BIN_REL_TOL) if eps_bin is None else float(eps_bin)
    dim = decomp_a.dim * decomp_b.dim
    vals, projs, mults = [], [], []
    for g in single_linkage(fvals, tol):
        proj = np.zeros((dim, dim), dtype=complex)
        mult = 0
        for idx in g:
            i, j = divmod(int(idx), nb)
            proj += np.kron(decomp_a.projectors[i], decomp_b.projectors[j])
            mult += int(decomp_a.multiplicities[i] * decomp_b.multiplicities[j])
        vals.append(float(np.mean(fvals[g])))
        projs.append(proj)
        mults.append(mult)
    return SpectralDecomposition(np.array(vals), np.array(projs), np.array(mults), tol)


def assemble_operator(
    decomp_a: SpectralDecomposition, decomp_b: SpectralDecomposition, f: ScalarFunction
) -> np.ndarray:
    """``sum_{a,b} F(a, b) P_a ⊗ P_b`` as an explicit matrix."""
    dim = decomp_a.dim * decomp_b.dim
    out = np.zeros((dim, dim), dtype=complex)
    for a, pa, _ in decomp_a:
        for b, pb, _ in decomp_b:
            out += f(a, b) * np.kron(pa, pb)
    return out

"""Decision tree for when quantum and random-variable laws of ``F(A, B)`` agree.

:func:`classify` places a pair of observables (plus a state) in one of four
branches; :func:`run_comparison` computes both laws and checks that the
measured distance is consistent with the branch's prediction.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .binning import default_tolerance
from .classical import (
    dependent_combine,
    independent_combine,
    pushforward,
    rv_moment,
    sample_oracle,
    total_variation,
    wasserstein1,
)
from .distribution import DiscreteDistribution
from .linalg import (
    State,
    as_operator,
    commutator_norm,
    is_hermitian,
    norm,
    relative_commutator_norm,
)
from .quantum import observable_distribution, qm_moment, schmidt
from .spectral import ScalarFunction, SpectralDecomposition, decompose, operator_function


class UnclassifiedError(ValueError):
    """Commuting pair that is neither functionally related nor split across tensor factors."""


class Branch(str, enum.Enum):
    NON_COMMUTING = "NonCommuting"
    COMMUTING_FUNCTIONAL = "CommutingFunctional"
    TENSOR_FACTORIZABLE = "TensorFactorizable"
    TENSOR_ENTANGLED = "TensorEntangled"


class Relation(str, enum.Enum):
    EQUAL_EXPECTED = "EqualExpected"
    GENERICALLY_UNEQUAL = "GenericallyUnequal"


PREDICTION = {
    Branch.NON_COMMUTING: Relation.GENERICALLY_UNEQUAL,
    Branch.COMMUTING_FUNCTIONAL: Relation.EQUAL_EXPECTED,
    Branch.TENSOR_FACTORIZABLE: Relation.EQUAL_EXPECTED,
    Branch.TENSOR_ENTANGLED: Relation.GENERICALLY_UNEQUAL,
}


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds for one comparison.

    ``*_rel`` entries scale with the relevant spectral range or norm;
    ``equal`` and ``exceptional`` are absolute.
    """

    eig_rel: float = 1e-8
    bin_rel: float = 1e-9
    snap_rel: float = 1e-9
    commutator_rel: float = 1e-8
    functional: float = 1e-8
    locality: float = 1e-9
    operator_match: float = 1e-8
    equal: float = 1e-9
    exceptional: float = 1e-10

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise ValueError(f"tolerance {name} must be positive")


@dataclass(frozen=True)
class CaseLabel:
    branch: Branch
    commutator_rel: float
    dependence: Optional[str] = None
    table: Optional[Dict[float, float]] = None
    schmidt_rank: Optional[int] = None

    @property
    def relation(self) -> Relation:
        return PREDICTION[self.branch]


def detect_functional_dependence(
    decomp_a: SpectralDecomposition, b, tol: float = 1e-8
) -> Optional[Dict[float, float]]:
    """Return ``{a: G(a)}`` when ``B = G(A)``, else ``None``.

    ``B`` must act as a scalar on every eigenspace of ``A``: the block-diagonal
    reconstruction ``sum_a b_a P_a`` with ``b_a = tr(P_a B) / mult_a`` has to
    reproduce ``B`` to within ``tol * max(||B||, 1)``.
    """
    b = as_operator(b)
    if b.shape[0] != decomp_a.dim:
        raise ValueError("dimension mismatch")
    coeffs = np.einsum("kij,ji->k", decomp_a.projectors, b).real / decomp_a.multiplicities
    rebuilt = np.einsum("k,kij->ij", coeffs.astype(complex), decomp_a.projectors)
    if norm(b - rebuilt) > tol * max(norm(b), 1.0):
        return None
    return {float(a): float(g) for a, g in zip(decomp_a.values, coeffs)}


def _factor_residual(m: np.ndarray, dims: Tuple[int, int], which: int) -> float:
    d1, d2 = dims
    t = m.reshape(d1, d2, d1, d2)
    if which == 1:
        local = np.kron(np.einsum("ijkj->ik", t) / d2, np.eye(d2))
    else:
        local = np.kron(np.eye(d1), np.einsum("ijil->jl", t) / d1)
    return norm(m - local)


def _acts_on_factor(m: np.ndarray, dims: Tuple[int, int], which: int, tol: float) -> bool:
    return _factor_residual(m, dims, which) <= tol * max(norm(m), 1.0)


def _is_eigenvector(psi: State, m: np.ndarray, tol: float) -> bool:
    v = psi.amplitudes
    mv = m @ v
    return bool(np.linalg.norm(mv - np.vdot(v, mv) * v) <= tol * max(norm(m), 1.0))


def _with_structure(psi: State, structure) -> State:
    if structure is None or psi.factor_dims == tuple(structure):
        return psi
    return State(psi.amplitudes, tuple(structure))


def classify(a, b, psi: State, structure=None, tolerances: Tolerances = Tolerances()) -> CaseLabel:
    """Assign the pair ``(A, B)`` in state ``psi`` to a branch of the decision tree.

    Raises
    ------
    UnclassifiedError
        If ``A`` and ``B`` commute, neither is a function of the other, and
        no tensor structure with ``A`` and ``B`` on different factors is
        available.
    """
    a, b = as_operator(a), as_operator(b)
    if not (is_hermitian(a) and is_hermitian(b)):
        raise ValueError("A and B must be Hermitian")
    if a.shape != b.shape or a.shape[0] != psi.dim:
        raise ValueError("dimension mismatch between A, B and the state")
    rel = relative_commutator_norm(a, b)
    if rel > tolerances.commutator_rel:
        return CaseLabel(Branch.NON_COMMUTING, rel)

    table = detect_functional_dependence(decompose(a, rel_tol=tolerances.eig_rel), b, tolerances.functional)
    if table is not None:
        return CaseLabel(Branch.COMMUTING_FUNCTIONAL, rel, "B=G(A)", table)
    table = detect_functional_dependence(decompose(b, rel_tol=tolerances.eig_rel), a, tolerances.functional)
    if table is not None:
        return CaseLabel(Branch.COMMUTING_FUNCTIONAL, rel, "A=G(B)", table)

    psi = _with_structure(psi, structure)
    if psi.factor_dims is None:
        raise UnclassifiedError("commuting observables with no functional dependence and no tensor structure")
    dims, tol = psi.factor_dims, tolerances.locality
    split = (_acts_on_factor(a, dims, 1, tol) and _acts_on_factor(b, dims, 2, tol)) or (
        _acts_on_factor(a, dims, 2, tol) and _acts_on_factor(b, dims, 1, tol)
    )
    if not split:
        raise UnclassifiedError("A and B do not act on different tensor factors")
    rank = schmidt(psi).rank
    branch = Branch.TENSOR_FACTORIZABLE if rank == 1 else Branch.TENSOR_ENTANGLED
    return CaseLabel(branch, rel, schmidt_rank=rank)


def trace_form_moments(
    psi: State,
    decomp_a: SpectralDecomposition,
    decomp_b: SpectralDecomposition,
    f: ScalarFunction,
    n: int,
) -> Tuple[float, float]:
    """Moments of both laws in trace form, valid for commuting ``A`` and ``B``.

    Returns ``(sum F^n Tr{P_a P_b P_psi}, sum F^n Tr{P_a P_psi P_b P_psi})``;
    both decompositions live on the full space.
    """
    p_psi = psi.projector()
    qm = rv = 0.0
    for a, pa, _ in decomp_a:
        for b, pb, _ in decomp_b:
            fn = float(f(a, b)) ** n
            qm += fn * np.trace(pa @ pb @ p_psi).real
            rv += fn * np.trace(pa @ p_psi @ pb @ p_psi).real
    return float(qm), float(rv)


def verdict(relation: Relation, w1: float, eps_equal: float, exceptional: bool) -> Tuple[bool, str]:
    """Consistency of a measured ``W1`` with the predicted relation."""
    if relation is Relation.EQUAL_EXPECTED:
        if w1 <= eps_equal:
            return True, "equal as predicted"
        return False, "expected equality but the laws differ"
    if w1 > eps_equal:
        return True, "laws differ as predicted"
    if exceptional:
        return True, "exceptional equality: the state is an eigenvector of A or B"
    return False, "laws coincide with no exceptional condition detected"


def _dist_pairs(d: Optional[DiscreteDistribution]):
    return None if d is None else [[v, w] for v, w in d.pairs()]


@dataclass
class ComparisonReport:
    """Everything computed by one :func:`run_comparison` call."""

    branch: str
    relation: str
    function: str
    dependence: Optional[str]
    functional_table: Optional[List[List[float]]]
    commutator_norm: float
    commutator_rel: float
    schmidt_rank: Optional[int]
    schmidt_coefficients: Optional[List[float]]
    rv_mode: str
    sigma_qm: DiscreteDistribution
    sigma_rv: DiscreteDistribution
    sigma_rv_independent: Optional[DiscreteDistribution]
    w1: float
    tv: float
    w1_independent: Optional[float]
    tv_independent: Optional[float]
    moments_qm: List[float]
    moments_rv: List[float]
    trace_moments_qm: Optional[List[float]]
    trace_moments_rv: Optional[List[float]]
    exceptional_equality: bool
    consistent: bool
    verdict: str
    seed: int
    samples: int
    oracle_tv: Optional[float]
    tolerances: Dict[str, float]
    extras: Dict[str, Any] = field(default_factory=dict)

    def recheck(self) -> bool:
        """Recompute the verdict from the stored numbers."""
        ok, _ = verdict(Relation(self.relation), self.w1, self.tolerances["equal"], self.exceptional_equality)
        return ok

    def to_dict(self) -> Dict[str, Any]:
        out = {}
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            if isinstance(value, DiscreteDistribution):
                value = _dist_pairs(value)
            out[name] = value
        return out


def run_comparison(
    a,
    b,
    f: ScalarFunction,
    psi: State,
    c=None,
    structure=None,
    tolerances: Tolerances = Tolerances(),
    samples: int = 0,
    seed: int = 0,
    max_moment: int = 4,
) -> ComparisonReport:
    """Compute the quantum and random-variable laws of ``C = F(A, B)`` and compare them.

    For commuting pairs ``C`` is synthesized by spectral calculus and, if
    ``c`` is also given, cross-checked against it.  Non-commuting pairs need
    ``c`` explicitly because operator ordering in ``F(A, B)`` is ambiguous.
    """
    a, b = as_operator(a), as_operator(b)
    psi = _with_structure(psi, structure)
    label = classify(a, b, psi, tolerances=tolerances)
    da = decompose(a, rel_tol=tolerances.eig_rel)
    db = decompose(b, rel_tol=tolerances.eig_rel)
    rho = observable_distribution(psi, da)
    pi = observable_distribution(psi, db)

    g = None
    if label.branch is Branch.COMMUTING_FUNCTIONAL:
        g = ScalarFunction.from_table(label.table)
        if label.dependence == "B=G(A)":
            c_syn = operator_function(da, lambda x: f(x, g(x)))
        else:
            c_syn = operator_function(db, lambda y: f(g(y), y))
    elif label.branch is Branch.NON_COMMUTING:
        c_syn = None
    else:
        c_syn = sum(f(x, y) * (pa @ pb) for x, pa, _ in da for y, pb, _ in db)

    if c is None:
        if c_syn is None:
            raise ValueError("non-commuting A and B need an explicit operator C")
        c = c_syn
    else:
        c = as_operator(c)
        if c.shape != a.shape:
            raise ValueError("dimension mismatch between C and A")
        if c_syn is not None and norm(c - c_syn) > tolerances.operator_match * max(norm(c), 1.0):
            raise ValueError("supplied C does not match F(A, B)")
    if not is_hermitian(c):
        raise ValueError("C must be Hermitian")

    sigma_qm = observable_distribution(psi, decompose(c, rel_tol=tolerances.eig_rel))

    pair_values = [float(f(x, y)) for x in rho.support for y in pi.support]
    indep = independent_combine(rho, pi, f, default_tolerance(pair_values, tolerances.bin_rel))
    if label.branch is Branch.COMMUTING_FUNCTIONAL:
        if label.dependence == "B=G(A)":
            vals = [float(f(x, g(x))) for x in rho.support]
            sigma_rv = dependent_combine(rho, g, f, default_tolerance(vals, tolerances.bin_rel))
        else:
            vals = [float(f(g(y), y)) for y in pi.support]
            sigma_rv = pushforward(pi, lambda y: f(g(y), y), default_tolerance(vals, tolerances.bin_rel))
        rv_mode = "dependent"
    else:
        sigma_rv = indep
        rv_mode = "independent"

    def snapped_tv(d1, d2):
        values = np.concatenate([d1.support, d2.support])
        return total_variation(d1, d2, default_tolerance(values, tolerances.snap_rel))

    w1 = wasserstein1(sigma_qm, sigma_rv)
    tv = snapped_tv(sigma_qm, sigma_rv)

    trace_qm = trace_rv = None
    if label.branch is not Branch.NON_COMMUTING:
        forms = [trace_form_moments(psi, da, db, f, n) for n in range(max_moment + 1)]
        trace_qm = [q for q, _ in forms]
        trace_rv = [r for _, r in forms]

    exceptional = _is_eigenvector(psi, a, tolerances.exceptional) or _is_eigenvector(psi, b, tolerances.exceptional)
    ok, note = verdict(label.relation, w1, tolerances.equal, exceptional)

    sd = schmidt(psi) if psi.factor_dims is not None else None
    oracle_tv = None
    if samples > 0:
        emp = sample_oracle(rho, pi, f, samples, seed)
        oracle_tv = snapped_tv(emp, indep)

    functional = label.branch is Branch.COMMUTING_FUNCTIONAL
    return ComparisonReport(
        branch=label.branch.value,
        relation=label.relation.value,
        function=f.label,
        dependence=label.dependence,
        functional_table=[[k, v] for k, v in sorted(label.table.items())] if label.table else None,
        commutator_norm=commutator_norm(a, b),
        commutator_rel=label.commutator_rel,
        schmidt_rank=None if sd is None else sd.rank,
        schmidt_coefficients=None if sd is None else sd.coefficients.tolist(),
        rv_mode=rv_mode,
        sigma_qm=sigma_qm,
        sigma_rv=sigma_rv,
        sigma_rv_independent=indep if functional else None,
        w1=w1,
        tv=tv,
        w1_independent=wasserstein1(sigma_qm, indep) if functional else None,
        tv_independent=snapped_tv(sigma_qm, indep) if functional else None,
        moments_qm=[qm_moment(psi, c, n) for n in range(max_moment + 1)],
        moments_rv=[rv_moment(sigma_rv, n) for n in range(max_moment + 1)],
        trace_moments_qm=trace_qm,
        trace_moments_rv=trace_rv,
        exceptional_equality=exceptional,
        consistent=ok,
        verdict=note,
        seed=int(seed),
        samples=int(samples),
        oracle_tv=oracle_tv,
        tolerances=asdict(tolerances),
    )

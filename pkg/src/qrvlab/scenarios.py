"""Operator and state builders, and the canonical comparison scenarios.

Units are natural (hbar = 1).  Time and mass only enter the free-particle
scenario through their ratio ``t_over_m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Callable, Dict, List, Tuple

import numpy as np

from .classical import pushforward, variance, wasserstein1
from .classifier import ComparisonReport, Tolerances, run_comparison
from .linalg import State, expectation, tensor_product
from .quantum import (
    correlation_term,
    observable_distribution,
    qm_free_particle_variance,
    schmidt,
    schmidt_qm_distribution,
    schmidt_rv_distribution,
)
from .spectral import PRODUCT, SQUARE, SUM, decompose, joint_function_projectors, operator_function

TRUNCATION_MASS = 1e-10
ODD_TOL = 1e-6
TENSOR_STATES = ("product", "bell", "partial")

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


# builders -----------------------------------------------------------------


def annihilation(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1).astype(complex)


def build_fock_xp(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Position and momentum on the ``n``-level truncated oscillator basis.

    ``X = (a + a^dagger)/sqrt(2)`` and ``P = i (a^dagger - a)/sqrt(2)``.  The
    commutator equals ``i`` on all levels except the last, where the cutoff
    shows up as ``-i (n - 1)``.
    """
    if n < 4:
        raise ValueError("Fock dimension must be at least 4")
    a = annihilation(n)
    ad = a.conj().T
    return (a + ad) / math.sqrt(2), 1j * (ad - a) / math.sqrt(2)


def build_grid_xp(n: int, length: float) -> Tuple[np.ndarray, np.ndarray]:
    """Position and momentum on a periodic grid of ``n`` points spanning ``length``.

    ``X`` is diagonal with ``x_j = (j - n/2) length / n``; ``P`` is diagonal in
    the discrete Fourier basis with wrapped momenta ``2 pi k / length``.
    """
    if n < 4:
        raise ValueError("grid size must be at least 4")
    if length <= 0:
        raise ValueError("grid length must be positive")
    x = (np.arange(n) - n / 2) * length / n
    k = np.fft.fftfreq(n, d=1.0 / n)
    p = 2 * np.pi * k / length
    dft = np.fft.fft(np.eye(n), norm="ortho")
    return np.diag(x).astype(complex), dft.conj().T @ np.diag(p) @ dft


def default_grid_length(n: int) -> float:
    # balances grid spacing against momentum cutoff for unit-width states
    return math.sqrt(2 * math.pi * n)


def fock_state(n_levels: int, k: int) -> State:
    v = np.zeros(n_levels, dtype=complex)
    v[k] = 1.0
    return State(v)


def vacuum(n_levels: int) -> State:
    return fock_state(n_levels, 0)


def check_truncation(psi: State, n_levels: int) -> None:
    """Reject states with more than ``1e-10`` of their mass above level ``n/2``."""
    upper = float(np.sum(np.abs(psi.amplitudes[n_levels // 2:]) ** 2))
    if upper > TRUNCATION_MASS:
        raise ValueError(
            f"state leaks {upper:.3g} of its mass into the upper half of the truncated basis; "
            "increase N"
        )


def coherent_state(n_levels: int, alpha: complex) -> State:
    """Number-basis coherent state ``e^{-|alpha|^2/2} sum alpha^n / sqrt(n!) |n>``."""
    if alpha == 0:
        return vacuum(n_levels)
    n = np.arange(n_levels)
    log_mag = n * math.log(abs(alpha)) - 0.5 * abs(alpha) ** 2 - 0.5 * np.array([math.lgamma(k + 1) for k in n])
    amps = np.exp(log_mag) * np.exp(1j * np.angle(alpha) * n)
    psi = State.from_vector(amps)
    check_truncation(psi, n_levels)
    return psi


def poisson_weights(mean: float, count: int) -> np.ndarray:
    k = np.arange(count)
    if mean == 0:
        return (k == 0).astype(float)
    return np.exp(k * math.log(mean) - mean - np.array([math.lgamma(i + 1) for i in k]))


def evolve(generator, angle: float, psi: State) -> State:
    """``exp(-i angle G) psi`` via the spectral decomposition of ``G``."""
    u = operator_function(decompose(generator), lambda g: np.exp(-1j * angle * g))
    return State.from_vector(u @ psi.amplitudes)


def correlated_state(x, p, psi0: State, squeeze: float, angle: float) -> State:
    """Squeeze ``psi0`` with ``(XP + PX)/2`` and rotate it with ``(X^2 + P^2)/2``.

    The resulting position-momentum correlation is measured afterwards, not
    assumed.
    """
    psi = evolve(0.5 * (x @ p + p @ x), squeeze, psi0)
    return evolve(0.5 * (x @ x + p @ p), angle, psi)


def gaussian_grid_state(x, width: float, center: float = 0.0, momentum: float = 0.0) -> State:
    """Gaussian amplitude with position standard deviation ``width`` on a grid."""
    xs = np.real(np.diag(x))
    amps = np.exp(-((xs - center) ** 2) / (4 * width ** 2) + 1j * momentum * xs)
    return State.from_vector(amps)


def plane_wave(n: int, k: int) -> State:
    j = np.arange(n)
    return State.from_vector(np.exp(2j * np.pi * k * j / n))


def spin1_z() -> np.ndarray:
    return np.diag([-1.0, 0.0, 1.0]).astype(complex)


def bell_state() -> State:
    return State.from_vector([1, 0, 0, 1], (2, 2))


def mass_near_odd(dist, tol: float = ODD_TOL) -> float:
    """Weight on support points within ``tol`` of an odd integer."""
    s = dist.support
    near = np.abs(s - (2 * np.round((s - 1) / 2) + 1)) <= tol
    return float(dist.weights[near].sum())


def mass_between_odd(dist, tol: float = ODD_TOL) -> float:
    """Weight strictly inside some interval ``(2k+1, 2k+3)``, ``k >= 0``."""
    s = dist.support
    off_odd = np.abs(s - (2 * np.round((s - 1) / 2) + 1)) > tol
    return float(dist.weights[(s > 1 + tol) & off_odd].sum())


# configuration ------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    name: str = ""
    N: int = 64
    alpha: float = 1.0
    t_over_m: float = 1.0
    squeeze: float = 0.0
    angle: float = 0.0
    basis: str = "fock"
    L: float = 0.0
    state: str = "bell"
    seed: int = 0
    samples: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if self.L < 0:
            raise ValueError("L must be positive (or 0 for the default)")
        if self.samples < 0 or self.seed < 0:
            raise ValueError("seed and samples must be nonnegative")
        if self.basis not in ("fock", "grid"):
            raise ValueError("basis must be 'fock' or 'grid'")
        if self.state not in TENSOR_STATES:
            raise ValueError(f"state must be one of {sorted(TENSOR_STATES)}")
        if not self.name:
            object.__setattr__(self, "name", self.scenario)


def _run(cfg: ScenarioConfig, a, b, f, psi, c, structure=None) -> ComparisonReport:
    return run_comparison(
        a, b, f, psi, c, structure=structure, tolerances=cfg.tolerances, samples=cfg.samples, seed=cfg.seed
    )


def scenario_harmonic(cfg: ScenarioConfig) -> ComparisonReport:
    """``A = X^2``, ``B = P^2``, ``C = X^2 + P^2`` on a truncated Fock space.

    ``alpha = 0`` selects the vacuum, otherwise a coherent state.
    """
    if cfg.N < 32:
        raise ValueError("harmonic scenario needs N >= 32")
    x, p = build_fock_xp(cfg.N)
    psi = coherent_state(cfg.N, cfg.alpha)
    a, b = x @ x, p @ p
    report = _run(cfg, a, b, SUM, psi, a + b)
    lam = abs(cfg.alpha) ** 2
    ref = poisson_weights(lam, 11)
    dev = max(abs(report.sigma_qm.weight_at(2 * n + 1, ODD_TOL) - ref[n]) for n in range(11))
    report.extras.update(
        qm_mass_near_odd=mass_near_odd(report.sigma_qm),
        rv_mass_near_odd=mass_near_odd(report.sigma_rv),
        rv_mass_between_odd=mass_between_odd(report.sigma_rv),
        poisson_mean=lam,
        poisson_max_deviation=float(dev),
    )
    return report


def _free_particle_ops(cfg: ScenarioConfig):
    if cfg.basis == "fock":
        x, p = build_fock_xp(cfg.N)
        psi0 = vacuum(cfg.N)
    else:
        x, p = build_grid_xp(cfg.N, cfg.L or default_grid_length(cfg.N))
        psi0 = gaussian_grid_state(x, 1 / math.sqrt(2))
    if cfg.squeeze or cfg.angle:
        psi = correlated_state(x, p, psi0, cfg.squeeze, cfg.angle)
    else:
        psi = psi0
    if cfg.basis == "fock":
        check_truncation(psi, cfg.N)
    return x, p, psi


def scenario_free_particle(cfg: ScenarioConfig) -> ComparisonReport:
    """``A = X``, ``B = (t/m) P``, ``C = X + (t/m) P``: free motion in closed form."""
    x, p, psi = _free_particle_ops(cfg)
    r = cfg.t_over_m
    report = _run(cfg, x, r * p, SUM, psi, x + r * p)
    mx, mp = expectation(psi, x).real, expectation(psi, p).real
    dx2 = expectation(psi, x @ x).real - mx ** 2
    dp2 = expectation(psi, p @ p).real - mp ** 2
    kappa = correlation_term(psi, x, p)
    var_qm = variance(report.sigma_qm)
    var_rv = variance(report.sigma_rv)
    report.extras.update(
        delta_x2=dx2,
        delta_p2=dp2,
        kappa=kappa,
        var_qm_numeric=var_qm,
        var_qm_closed=qm_free_particle_variance(psi, x, p, t=r, m=1.0),
        var_rv_numeric=var_rv,
        var_rv_closed=dx2 + r ** 2 * dp2,
        width_difference=var_qm - var_rv,
        expected_difference=r * kappa,
    )
    return report


def scenario_functional(cfg: ScenarioConfig) -> ComparisonReport:
    """Spin-1 ``A = diag(-1, 0, 1)``, ``B = A^2``, ``F(a, b) = a + b``."""
    a = spin1_z()
    b = a @ a
    psi = State.from_vector([1, 1, 1])
    report = _run(cfg, a, b, SUM, psi, a + b)
    da, db = decompose(a), decompose(b)
    merged = da.projector_for(1.0) + da.projector_for(-1.0)
    rho = observable_distribution(psi, da)
    pi = observable_distribution(psi, db)
    via_g = pushforward(rho, SQUARE)
    report.extras.update(
        projector_merge_residual=float(np.max(np.abs(db.projector_for(1.0) - merged))),
        pi=[[v, w] for v, w in pi.pairs()],
        pi_pushforward_w1=wasserstein1(pi, via_g),
    )
    return report


def _tensor_state(kind: str) -> State:
    plus = np.array([1, 1]) / math.sqrt(2)
    if kind == "product":
        return State.product(plus, plus)
    if kind == "bell":
        return bell_state()
    return State.from_vector([2, 0, 0, 1], (2, 2))



def scenario_tensor(cfg: ScenarioConfig) -> ComparisonReport:
    """Two qubits, ``A = sz ⊗ 1``, ``B = 1 ⊗ sz``, ``F(a, b) = a b``.

    ``state`` picks ``|+>|+>``, the Bell state or ``(2|00> + |11>)/sqrt(5)``.
    """
    psi = _tensor_state(cfg.state)
    one = np.eye(2)
    a, b = tensor_product(SIGMA_Z, one), tensor_product(one, SIGMA_Z)
    c = tensor_product(SIGMA_Z, SIGMA_Z)
    report = _run(cfg, a, b, PRODUCT, psi, c)
    dz = decompose(SIGMA_Z)
    sd = schmidt(psi)
    joint = joint_function_projectors(dz, dz, PRODUCT)
    direct = decompose(c)
    report.extras.update(
        schmidt_qm_w1=wasserstein1(schmidt_qm_distribution(sd, dz, dz, PRODUCT), report.sigma_qm),
        schmidt_rv_w1=wasserstein1(schmidt_rv_distribution(sd, dz, dz, PRODUCT), report.sigma_rv),
        joint_projector_residual=float(np.max(np.abs(joint.projectors - direct.projectors))),
    )
    return report


@dataclass(frozen=True)
class ScenarioInfo:
    run: Callable[[ScenarioConfig], ComparisonReport]
    params: Tuple[str, ...]
    summary: str


SCENARIOS: Dict[str, ScenarioInfo] = {
    "harmonic": ScenarioInfo(scenario_harmonic, ("N", "alpha"), "C = X^2 + P^2 on a truncated Fock basis"),
    "free_particle": ScenarioInfo(
        scenario_free_particle,
        ("N", "t_over_m", "squeeze", "angle", "basis", "L"),
        "C = X + (t/m) P, widths vs closed forms",
    ),
    "functional": ScenarioInfo(scenario_functional, (), "spin-1, B = A^2, F = a + b"),
    "tensor": ScenarioInfo(scenario_tensor, ("state",), "two qubits, C = sz ⊗ sz"),
}


def run_scenario(cfg: ScenarioConfig) -> ComparisonReport:
    try:
        info = SCENARIOS[cfg.scenario]
    except KeyError:
        raise KeyError(f"unknown scenario {cfg.scenario!r}") from None
    return info.run(cfg)


def canonical_configs(seed: int = 0, samples: int = 0) -> List[ScenarioConfig]:
    """The six scenario instances covering every branch of the decision tree."""
    base = dict(seed=seed, samples=samples)
    return [
        ScenarioConfig("harmonic", **base),
        ScenarioConfig("free_particle", squeeze=0.3, angle=math.pi / 8, **base),
        ScenarioConfig("functional", **base),
        ScenarioConfig("tensor", name="tensor_product", state="product", **base),
        ScenarioConfig("tensor", name="tensor_bell", state="bell", **base),
        ScenarioConfig("tensor", name="tensor_partial", state="partial", **base),
    ]


def config_defaults() -> Dict[str, object]:
    return {f.name: f.default for f in fields(ScenarioConfig) if f.name not in ("scenario", "name", "tolerances")}


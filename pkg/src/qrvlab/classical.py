"""Random-variable side: pushforward, combination rules, moments, distances.

All combination rules are exact finite sums over the supports; values
that coincide within a binning tolerance are merged.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .binning import default_tolerance, single_linkage
from .distribution import DiscreteDistribution
from .spectral import ScalarFunction

MAX_MOMENT = 8


def pushforward(rho: DiscreteDistribution, h, eps_bin: Optional[float] = None) -> DiscreteDistribution:
    """Image law of ``rho`` under ``h``: each atom ``a`` moves to ``h(a)``."""
    values = [float(h(a)) for a in rho.support]
    return DiscreteDistribution.from_points(values, rho.weights, eps_bin)


def independent_combine(
    rho: DiscreteDistribution,
    pi: DiscreteDistribution,
    f: ScalarFunction,
    eps_bin: Optional[float] = None,
) -> DiscreteDistribution:
    """Law of ``F(A, B)`` for independent ``A ~ rho`` and ``B ~ pi``."""
    values = [float(f(a, b)) for a in rho.support for b in pi.support]
    weights = np.outer(rho.weights, pi.weights).ravel()
    return DiscreteDistribution.from_points(values, weights, eps_bin)


def dependent_combine(
    rho: DiscreteDistribution,
    g,
    f: ScalarFunction,
    eps_bin: Optional[float] = None,
) -> DiscreteDistribution:
    """Law of ``F(A, G(A))``, a function of the single variable ``A ~ rho``."""
    return pushforward(rho, lambda a: f(a, g(a)), eps_bin)


def rv_moment(sigma: DiscreteDistribution, n: int, max_order: int = MAX_MOMENT) -> float:
    if n < 0 or n > max_order:
        raise ValueError(f"moment order must be in [0, {max_order}]")
    return float(np.dot(sigma.support ** n, sigma.weights))


def variance(sigma: DiscreteDistribution) -> float:
    """``E[c^2] - E[c]^2`` about the mean, clamped at zero."""
    mean = float(np.dot(sigma.support, sigma.weights))
    var = float(np.dot((sigma.support - mean) ** 2, sigma.weights))
    return max(var, 0.0)


def sample_oracle(
    rho: DiscreteDistribution,
    pi: DiscreteDistribution,
    f: ScalarFunction,
    n_samples: int,
    seed: int,
    eps_bin: Optional[float] = None,
) -> DiscreteDistribution:
    """Empirical law of ``F(a, b)`` from ``n_samples`` independent draws.

    Draws use ``numpy``'s PCG64 generator seeded with ``seed``; identical
    arguments give bit-identical results.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    ia = rng.choice(len(rho), size=n_samples, p=rho.weights / rho.weights.sum())
    ib = rng.choice(len(pi), size=n_samples, p=pi.weights / pi.weights.sum())
    nb = len(pi)
    counts = np.bincount(ia * nb + ib, minlength=len(rho) * nb)
    hit = np.flatnonzero(counts)
    values = [float(f(rho.support[k // nb], pi.support[k % nb])) for k in hit]
    return DiscreteDistribution.from_points(values, counts[hit] / n_samples, eps_bin)


def _shared_grid(d1: DiscreteDistribution, d2: DiscreteDistribution, eps: Optional[float]):
    values = np.concatenate([d1.support, d2.support])
    if eps is None:
        eps = default_tolerance(values, 1e-9)
    w1 = np.concatenate([d1.weights, np.zeros(len(d2))])
    w2 = np.concatenate([np.zeros(len(d1)), d2.weights])
    groups = single_linkage(values, eps)
    grid = np.array([float(np.mean(values[g])) for g in groups])
    return grid, np.array([w1[g].sum() for g in groups]), np.array([w2[g].sum() for g in groups])


def shared_support(d1: DiscreteDistribution, d2: DiscreteDistribution, eps: Optional[float] = None):
    """Snap both supports onto one grid; returns ``(grid, weights1, weights2)``."""
    return _shared_grid(d1, d2, eps)


def total_variation(d1: DiscreteDistribution, d2: DiscreteDistribution, eps: Optional[float] = None) -> float:
    _, w1, w2 = _shared_grid(d1, d2, eps)
    return 0.5 * float(np.abs(w1 - w2).sum())


def wasserstein1(d1: DiscreteDistribution, d2: DiscreteDistribution) -> float:
    """Earth-mover distance: integral of ``|F1 - F2|`` over the merged support."""
    values = np.concatenate([d1.support, d2.support])
    signed = np.concatenate([d1.weights, -d2.weights])
    order = np.argsort(values, kind="stable")
    values, signed = values[order], signed[order]
    cdf_gap = np.cumsum(signed)[:-1]
    return float(np.sum(np.abs(cdf_gap) * np.diff(values)))


def distance(d1: DiscreteDistribution, d2: DiscreteDistribution, metric: str = "W1", eps: Optional[float] = None) -> float:
    """``"TV"`` (on a snapped shared grid) or ``"W1"``."""
    metric = metric.upper()
    if metric == "TV":
        return total_variation(d1, d2, eps)
    if metric == "W1":
        return wasserstein1(d1, d2)
    raise ValueError(f"unknown metric {metric!r}")

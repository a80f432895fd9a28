"""Finite discrete probability laws on the real line."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .binning import default_tolerance, single_linkage

WEIGHT_FLOOR = 1e-12
MASS_TOL = 1e-9
MERGE_REL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Weighted finite support ``{(value, weight)}``.

    Build instances with :meth:`from_points` unless the support is already
    strictly ascending and clean; the plain constructor only validates.
    """

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        support = np.array(self.support, dtype=float, copy=True).ravel()
        weights = np.array(self.weights, dtype=float, copy=True).ravel()
        if support.shape != weights.shape:
            raise ValueError("support and weights must have the same length")
        if support.size == 0:
            raise ValueError("distribution needs at least one support point")
        if np.any(np.diff(support) <= 0):
            raise ValueError("support must be strictly ascending")
        if np.any(weights < -WEIGHT_FLOOR):
            raise ValueError(f"negative weight {weights.min()!r}")
        weights = np.clip(weights, 0.0, None)
        total = float(weights.sum())
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        support.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_points(cls, values, weights, tol: Optional[float] = None) -> "DiscreteDistribution":
        """Merge values within ``tol`` (chain-linked), summing their weights.

        A merged point sits at the weighted mean of its members.  Points
        whose merged weight falls below ``1e-12`` are dropped.  ``tol``
        defaults to ``1e-9`` times the spread of ``values``.
        """
        values = np.asarray(values, dtype=float).ravel()
        weights = np.asarray(weights, dtype=float).ravel()
        if values.shape != weights.shape:
            raise ValueError("values and weights must have the same length")
        if np.any(weights < -WEIGHT_FLOOR):
            raise ValueError(f"negative weight {weights.min()!r}")
        weights = np.clip(weights, 0.0, None)
        if tol is None:
            tol = default_tolerance(values, MERGE_REL_TOL)
        support, mass = [], []
        for g in single_linkage(values, tol):
            w = float(weights[g].sum())
            if w < WEIGHT_FLOOR:
                continue
            support.append(float(np.dot(values[g], weights[g]) / w) if len(g) > 1 else float(values[g[0]]))
            mass.append(w)
        if not support:
            raise ValueError("all weights are negligible")
        return cls(np.array(support), np.array(mass))

    @classmethod
    def point_mass(cls, value: float) -> "DiscreteDistribution":
        return cls(np.array([float(value)]), np.array([1.0]))

    def __len__(self) -> int:
        return self.support.size

    def pairs(self) -> List[Tuple[float, float]]:
        return list(zip(self.support.tolist(), self.weights.tolist()))

    def weight_at(self, value: float, atol: float = 1e-9) -> float:
        """Total weight within ``atol`` of ``value``."""
        return float(self.weights[np.abs(self.support - value) <= atol].sum())

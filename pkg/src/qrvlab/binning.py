"""Tolerance-based grouping of real values (single-linkage on the sorted line)."""

from __future__ import annotations

from typing import List

import numpy as np


def default_tolerance(values, rel: float) -> float:
    """``rel`` times the scale of ``values``.

    The scale is the larger of the spread and the largest magnitude (at
    least 1 when everything is zero), so floating-point noise on a nearly
    degenerate set cannot shrink the tolerance below the noise itself.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return rel
    scale = max(float(np.ptp(values)), float(np.max(np.abs(values))))
    return rel * (scale if scale > 0.0 else 1.0)


def single_linkage(values, tol: float) -> List[np.ndarray]:
    """Group indices of ``values`` into clusters whose neighbours lie within ``tol``.

    Clusters are returned in ascending order of value and each cluster's
    indices are in ascending order of value as well.  Chains merge: with
    ``tol = 1`` the values ``0, 0.9, 1.8`` form a single cluster.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return []
    order = np.argsort(values, kind="stable")
    gaps = np.diff(values[order])
    cuts = np.flatnonzero(gaps > tol) + 1
    return np.split(order, cuts)

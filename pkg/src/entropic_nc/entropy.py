"""Shannon entropy in bits, with ``0 log 0 = 0``.

Probabilities that spill outside [0, 1] by at most ``CLAMP_TOL`` (roundoff
from squared overlaps) are clamped; anything larger is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidDistribution, OutOfRange

CLAMP_TOL = 1e-12
SUM_TOL = 1e-9


def xlog2x(p):
    """Elementwise ``-p log2 p`` with the zero convention; works on arrays."""
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = -p[pos] * np.log2(p[pos])
    return out


def check_distribution(probabilities) -> np.ndarray:
    p = np.asarray(probabilities, dtype=float)
    if p.ndim == 0 or p.size == 0:
        raise InvalidDistribution("distribution must be a non-empty array")
    if not np.all(np.isfinite(p)):
        raise InvalidDistribution("distribution has non-finite entries")
    if np.any(p < -CLAMP_TOL) or np.any(p > 1 + CLAMP_TOL):
        raise InvalidDistribution(f"entries outside [0, 1]: {p.ravel().tolist()}")
    total = p.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise InvalidDistribution(f"entries sum to {total!r}, not 1")
    return np.clip(p, 0.0, 1.0)


def shannon_entropy(probabilities) -> float:
    """Entropy of a discrete distribution given as any array of cell masses."""
    p = check_distribution(probabilities)
    return float(xlog2x(p).sum())


def binary_entropy(p: float) -> float:
    if not np.isfinite(p) or p < -CLAMP_TOL or p > 1 + CLAMP_TOL:
        raise OutOfRange(f"probability {p!r} outside [0, 1]")
    p = min(max(float(p), 0.0), 1.0)
    return float(xlog2x(p) + xlog2x(1.0 - p))


def binary_entropy_array(p) -> np.ndarray:
    """Vectorized binary entropy; assumes ``p`` already lies in [0, 1]."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    return xlog2x(p) + xlog2x(1.0 - p)


@dataclass(frozen=True)
class PairDistribution:
    """Outcome table of two cyclically adjacent observables ``(X_i, X_{i+1})``.

    ``p_mm``, ``p_mp`` and ``p_pm`` are the masses of (-1,-1), (-1,+1) and
    (+1,-1); the (+1,+1) outcome is excluded by construction.
    """

    p_mm: float
    p_mp: float
    p_pm: float
    index: int = 1

    def __post_init__(self):
        p = check_distribution([self.p_mm, self.p_mp, self.p_pm])
        object.__setattr__(self, "p_mm", float(p[0]))
        object.__setattr__(self, "p_mp", float(p[1]))
        object.__setattr__(self, "p_pm", float(p[2]))

    @property
    def p_pp(self) -> float:
        return 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.p_mm, self.p_mp, self.p_pm])

    def table(self) -> np.ndarray:
        """2x2 table indexed ``[x_i, x_{i+1}]`` with 0 for -1 and 1 for +1."""
        return np.array([[self.p_mm, self.p_mp], [self.p_pm, 0.0]])


def pair_entropy(pd: PairDistribution) -> float:
    return shannon_entropy(pd.as_array())


# -- joint-table identities ---------------------------------------------------


def marginal(table, axis: int) -> np.ndarray:
    """Marginal of a 2-D joint table along ``axis`` (0 keeps rows, 1 keeps columns)."""
    t = np.asarray(table, dtype=float)
    return t.sum(axis=1 - axis)


def joint_entropy(table) -> float:
    return shannon_entropy(np.asarray(table, dtype=float).ravel())


def conditional_entropy(table, given: int = 1) -> float:
    """H(X | Y) for a joint table ``table[x, y]``; ``given`` is Y's axis.

    Computed as the average of the entropies of the conditional rows, not as a
    difference of joint and marginal entropies.
    """
    t = check_distribution(table)
    if given == 0:
        t = t.T
    py = t.sum(axis=0)
    h = 0.0
    for y, mass in enumerate(py):
        if mass > 0:
            h += mass * float(xlog2x(t[:, y] / mass).sum())
    return h

"""Quantum outcome statistics and the entropic inequality functional.

For a cycle of ``n`` observables the functional is

    M = H(X_n X_1) - sum_{i=1}^{n-1} H(X_i X_{i+1}) + sum_{i=2}^{n-1} H(X_i)

and every non-contextual model satisfies ``M <= 0``. For ``n = 5`` this is
H(X5X1) - H(X1X2) - H(X2X3) - H(X3X4) - H(X4X5) + H(X2) + H(X3) + H(X4).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .entropy import (
    CLAMP_TOL,
    PairDistribution,
    binary_entropy,
    binary_entropy_array,
    pair_entropy,
    xlog2x,
)
from .exceptions import ExclusivityViolation
from .model import CyclicObservableSet, StateVector

EXCLUSIVITY_TOL = 1e-9


@dataclass(frozen=True)
class InequalityReport:
    m_value: float
    pair_entropies: Tuple[float, ...]
    single_entropies: Tuple[float, ...]
    single_probabilities: Tuple[float, ...]

    @property
    def violated(self) -> bool:
        return self.m_value > 0

    def recompute_m(self) -> float:
        h = self.pair_entropies
        return h[-1] - sum(h[:-1]) + sum(self.single_entropies)

    def to_dict(self) -> dict:
        return {
            "m_bits": self.m_value,
            "pair_entropies": list(self.pair_entropies),
            "single_entropies": list(self.single_entropies),
            "single_probabilities": list(self.single_probabilities),
            "violated": self.violated,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InequalityReport":
        return cls(
            float(d["m_bits"]),
            tuple(map(float, d["pair_entropies"])),
            tuple(map(float, d["single_entropies"])),
            tuple(map(float, d["single_probabilities"])),
        )


def _clamp_probability(p: float) -> float:
    if p < -CLAMP_TOL or p > 1 + CLAMP_TOL:
        raise ValueError(f"probability {p!r} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def outcome_probability(obs: CyclicObservableSet, i: int, state: StateVector) -> float:
    """p(+1 | X_i) = |<v_i|psi>|^2."""
    amp = np.vdot(obs.direction(i), state.amplitudes)
    return _clamp_probability(float(abs(amp) ** 2))


def single_probabilities(obs: CyclicObservableSet, state: StateVector) -> np.ndarray:
    return np.array([outcome_probability(obs, i, state) for i in range(1, obs.n + 1)])


def pair_from_singles(p_i: float, p_next: float, index: int) -> PairDistribution:
    """Exclusive pair table: (-1,+1) has mass p_next, (+1,-1) has mass p_i."""
    total = p_i + p_next
    if total > 1 + EXCLUSIVITY_TOL:
        raise ExclusivityViolation(
            f"p(+1|X_i) + p(+1|X_i+1) = {total!r} > 1 for pair {index}; "
            "the observables are not exclusive"
        )
    return PairDistribution(max(1.0 - total, 0.0), p_next, p_i, index)


def pair_distribution(obs: CyclicObservableSet, i: int, state: StateVector) -> PairDistribution:
    j = i % obs.n + 1
    return pair_from_singles(
        outcome_probability(obs, i, state), outcome_probability(obs, j, state), i
    )


def assemble_report(pairs, singles) -> InequalityReport:
    """Build the report from the n pair tables and the n probabilities p(+1|X_i)."""
    n = len(singles)
    pair_h = tuple(pair_entropy(pd) for pd in pairs)
    single_h = tuple(binary_entropy(singles[i]) for i in range(1, n - 1))
    m = pair_h[-1] - sum(pair_h[:-1]) + sum(single_h)
    return InequalityReport(float(m), pair_h, single_h, tuple(float(p) for p in singles))


def evaluate_m(obs: CyclicObservableSet, state: StateVector) -> InequalityReport:
    singles = single_probabilities(obs, state)
    pairs = [pair_from_singles(singles[i - 1], singles[i % obs.n], i) for i in range(1, obs.n + 1)]
    return assemble_report(pairs, singles)


def m_from_probabilities(p) -> np.ndarray:
    """Vectorized M from an array ``p[..., n]`` of probabilities p(+1|X_i).

    Applies the same formulas as :func:`evaluate_m` without per-call
    validation; exclusivity is assumed. Rows containing NaN give NaN.
    """
    p = np.asarray(p, dtype=float)
    holes = np.isnan(p).any(axis=-1)
    p = np.clip(np.nan_to_num(p), 0.0, 1.0)
    q = np.roll(p, -1, axis=-1)
    mm = np.clip(1.0 - p - q, 0.0, 1.0)
    pair_h = xlog2x(p) + xlog2x(q) + xlog2x(mm)
    single_h = binary_entropy_array(p[..., 1:-1])
    m = pair_h[..., -1] - pair_h[..., :-1].sum(axis=-1) + single_h.sum(axis=-1)
    return np.where(holes, np.nan, m)


def batch_probabilities(obs: CyclicObservableSet, states) -> np.ndarray:
    """p(+1|X_i) for each row of ``states`` (shape (..., 4), assumed normalized)."""
    amps = np.asarray(states, dtype=np.complex128) @ obs.directions.conj().T
    return np.abs(amps) ** 2


def batch_m(obs: CyclicObservableSet, states) -> np.ndarray:
    return m_from_probabilities(batch_probabilities(obs, states))


def estimate_m_sampled(
    obs: CyclicObservableSet, state: StateVector, shots_per_pair: int, seed: int
) -> InequalityReport:
    """Plug-in estimate of M from simulated finite statistics.

    Each adjacent pair is an independent experiment of ``shots_per_pair``
    joint measurements, drawn in order 1..n from ``numpy.random.default_rng(seed)``
    (PCG64). X_i appears in two experiments, (X_{i-1}, X_i) and (X_i, X_{i+1});
    its p(+1|X_i) estimate pools the +1 counts of both.
    """
    if shots_per_pair < 1:
        raise ValueError("shots_per_pair must be >= 1")
    rng = np.random.default_rng(seed)
    counts = np.array(
        [rng.multinomial(shots_per_pair, pair_distribution(obs, i, state).as_array())
         for i in range(1, obs.n + 1)]
    )
    freqs = counts / shots_per_pair
    pairs = [PairDistribution(*f, index=i + 1) for i, f in enumerate(freqs)]
    # (+1,-1) of experiment i and (-1,+1) of experiment i-1 both count X_i = +1
    singles = (counts[:, 2] + np.roll(counts[:, 1], 1)) / (2 * shots_per_pair)
    return assemble_report(pairs, singles)

__all__ = [
    "InequalityReport",
    "outcome_probability",
    "single_probabilities",
    "pair_distribution",
    "pair_from_singles",
    "evaluate_m",
    "m_from_probabilities",
    "batch_probabilities",
    "batch_m",
    "estimate_m_sampled",
]

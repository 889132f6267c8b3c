"""States, projector directions and the cyclic observable set.

Every observable is dichotomic, ``X_i = 2|v_i><v_i| - I``, so it is fully
described by its unit direction ``v_i``. Adjacent directions (indices taken
cyclically) must be orthogonal, which makes adjacent observables commute and
forbids the joint outcome ``(+1, +1)``.

Indices are 1-based in every public signature and message.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .exceptions import ConfigError, CyclicityViolation, DegenerateState, ZeroVector

DIM = 4
N_OBSERVABLES = 5

ZERO_NORM_TOL = 1e-14
UNIT_NORM_TOL = 1e-12
ORTHOGONALITY_TOL = 1e-10

Number = Union[int, float, complex, Fraction, str]

DEFAULT_VECTORS = (
    (Fraction(3), Fraction(1), Fraction(0), Fraction(-3)),
    (Fraction(1), Fraction(1, 2), Fraction(3, 2), Fraction(7, 6)),
    (Fraction(4), Fraction(1), Fraction(-2), Fraction(-9, 7)),
    (Fraction(1), Fraction(1, 2), Fraction(1), Fraction(35, 18)),
    (Fraction(2), Fraction(0), Fraction(-53, 9), Fraction(2)),
)
DEFAULT_LABEL = "default"


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


def as_vec4(v) -> np.ndarray:
    """Coerce ``v`` to a finite complex 4-vector (no normalization)."""
    a = np.asarray(v, dtype=np.complex128)
    if a.shape != (DIM,):
        raise ValueError(f"expected {DIM} components, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector components must be finite")
    return a


@dataclass(frozen=True)
class StateVector:
    """A normalized pure state of a four-level system."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = _frozen(as_vec4(self.amplitudes))
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm!r}); use normalize()")
        object.__setattr__(self, "amplitudes", a)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.amplitudes, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return bool(np.array_equal(self.amplitudes, other.amplitudes))

    def __hash__(self):
        return hash(self.amplitudes.tobytes())

    def with_phase(self, phi: float) -> "StateVector":
        return StateVector(self.amplitudes * np.exp(1j * phi))

    def amplitude_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to the 2x2 two-qubit coefficient matrix."""
        return self.amplitudes.reshape(2, 2)

    def schmidt_rank(self, tol: float = 1e-12) -> int:
        s = np.linalg.svd(self.amplitude_matrix(), compute_uv=False)
        return int(np.sum(s > tol))


def normalize(v) -> StateVector:
    a = as_vec4(v)
    norm = np.linalg.norm(a)
    if norm <= ZERO_NORM_TOL:
        raise ZeroVector(f"cannot normalize a vector of norm {norm:.3e}")
    return StateVector(a / norm)


def _normalize_exact(v: Sequence[Fraction]) -> np.ndarray:
    # squared norm is summed exactly; each component is rounded once at the end
    norm = math.sqrt(sum(x * x for x in v))
    return np.array([float(x) / norm for x in v], dtype=np.complex128)


@dataclass(frozen=True)
class CyclicObservableSet:
    """Unit directions ``v_1..v_n`` with ``<v_i|v_{i+1}> = 0`` cyclically."""

    directions: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        d = _frozen(self.directions)
        if d.ndim != 2 or d.shape[1] != DIM or d.shape[0] < 3:
            raise ValueError(f"directions must have shape (n, {DIM}) with n >= 3, got {d.shape}")
        if not np.all(np.isfinite(d)):
            raise ValueError("direction components must be finite")
        norms = np.linalg.norm(d, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)
        if bad.size:
            raise ValueError(f"direction v{bad[0] + 1} is not unit norm ({norms[bad[0]]!r})")
        n = d.shape[0]
        for i in range(n):
            overlap = abs(np.vdot(d[i], d[(i + 1) % n]))
            if overlap > ORTHOGONALITY_TOL:
                raise CyclicityViolation(i + 1, overlap, n)
        object.__setattr__(self, "directions", d)

    @property
    def n(self) -> int:
        return self.directions.shape[0]

    def _row(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(f"observable index must be in 1..{self.n}, got {i}")
        return i - 1

    def direction(self, i: int) -> np.ndarray:
        return self.directions[self._row(i)]

    def projector(self, i: int) -> np.ndarray:
        v = self.direction(i)
        return np.outer(v, v.conj())

    def observable(self, i: int) -> np.ndarray:
        return 2 * self.projector(i) - np.eye(DIM)

    def gram(self) -> np.ndarray:
        return self.directions.conj() @ self.directions.T

    def adjacent_overlaps(self) -> np.ndarray:
        d = self.directions
        return np.abs(np.einsum("ij,ij->i", d.conj(), np.roll(d, -1, axis=0)))

    def rotated(self, k: int = 1) -> "CyclicObservableSet":
        """Relabel the cycle so that the new ``v_1`` is the old ``v_{1+k}``."""
        return CyclicObservableSet(np.roll(self.directions, -k, axis=0), f"{self.label}+rot{k}")


def build_observables(vectors, label: str = "custom") -> CyclicObservableSet:
    """Normalize five (or more) vectors and validate cyclic orthogonality.

    Raises ``ZeroVector`` for a vanishing input and ``CyclicityViolation``
    naming the first adjacent pair whose overlap exceeds 1e-10.
    """
    rows = []
    for k, v in enumerate(vectors):
        if len(v) and all(isinstance(x, Fraction) for x in v):
            if all(x == 0 for x in v):
                raise ZeroVector(f"vector v{k + 1} is zero")
            rows.append(_normalize_exact(v))
            continue
        try:
            rows.append(normalize(v).amplitudes)
        except ZeroVector:
            raise ZeroVector(f"vector v{k + 1} has (near-)zero norm") from None
    return CyclicObservableSet(np.array(rows), label)


def default_observables() -> CyclicObservableSet:
    return build_observables(DEFAULT_VECTORS, DEFAULT_LABEL)


def standard_basis_cycle() -> CyclicObservableSet:
    """e1, e2, e3, e4, e2: the fifth direction must be orthogonal to both e4 and e1."""
    e = np.eye(DIM)
    return build_observables([e[0], e[1], e[2], e[3], e[1]], "standard-basis")


class FamilyKind(str, Enum):
    ENTANGLED = "entangled"
    PRODUCT = "product"
    CUSTOM = "custom"


@dataclass(frozen=True)
class StateFamily:
    kind: FamilyKind
    alpha: float = 0.0
    beta: float = 0.0
    amplitudes: Optional[tuple] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        if self.kind is FamilyKind.CUSTOM and self.amplitudes is None:
            raise ValueError("custom family requires amplitudes")


def family_amplitudes(kind, alpha, beta) -> np.ndarray:
    """Unnormalized family vectors, broadcast over ``alpha`` and ``beta``.

    Entangled: (sin a, -sin b, cos b, cos a). Product: (sin a, sin a, cos b, cos b).
    """
    kind = FamilyKind(kind)
    alpha, beta = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(beta, float))
    sa, ca, sb, cb = np.sin(alpha), np.cos(alpha), np.sin(beta), np.cos(beta)
    if kind is FamilyKind.ENTANGLED:
        return np.stack([sa, -sb, cb, ca], axis=-1)
    if kind is FamilyKind.PRODUCT:
        return np.stack([sa, sa, cb, cb], axis=-1)
    raise ValueError("family_amplitudes only covers the built-in families")


def product_is_degenerate(alpha, beta):
    return np.sin(alpha) ** 2 + np.cos(beta) ** 2 <= ZERO_NORM_TOL


def make_state(family: StateFamily) -> StateVector:
    if family.kind is FamilyKind.CUSTOM:
        return normalize(family.amplitudes)
    if family.kind is FamilyKind.PRODUCT and product_is_degenerate(family.alpha, family.beta):
        raise DegenerateState(
            f"product family vanishes at alpha={family.alpha!r}, beta={family.beta!r}"
        )
    return normalize(family_amplitudes(family.kind, family.alpha, family.beta))


def entangled_state(alpha: float, beta: float) -> StateVector:
    return make_state(StateFamily(FamilyKind.ENTANGLED, alpha, beta))


def product_state(alpha: float, beta: float) -> StateVector:
    return make_state(StateFamily(FamilyKind.PRODUCT, alpha, beta))


# -- observable configuration files ------------------------------------------


def parse_number(x) -> Fraction:
    """Parse a config number: a JSON int/float or a string such as ``"7/6"``."""
    if isinstance(x, bool):
        raise ConfigError(f"not a number: {x!r}")
    if isinstance(x, (int, float)):
        if not math.isfinite(x):
            raise ConfigError(f"non-finite number: {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot parse number {x!r}: {exc}") from None
    raise ConfigError(f"not a number: {x!r}")


def parse_observable_config(data: dict) -> tuple:
    """Return ``(label, vectors)`` with vectors as lists of exact Fractions."""
    if not isinstance(data, dict):
        raise ConfigError("observable config must be a JSON object")
    label = data.get("label", "custom")
    if not isinstance(label, str):
        raise ConfigError("'label' must be a string")
    vectors = data.get("vectors")
    if not isinstance(vectors, list) or len(vectors) != N_OBSERVABLES:
        raise ConfigError(f"'vectors' must be an array of {N_OBSERVABLES} vectors")
    parsed = []
    for k, v in enumerate(vectors):
        if not isinstance(v, list) or len(v) != DIM:
            raise ConfigError(f"vector {k + 1} must be an array of {DIM} numbers")
        parsed.append([parse_number(x) for x in v])
    return label, parsed


def read_observable_config(path) -> tuple:
    """Read and parse a JSON config; ``OSError`` propagates for missing files."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_observable_config(data)


def load_observables(path=None) -> CyclicObservableSet:
    if path is None:
        return default_observables()
    label, vectors = read_observable_config(path)
    return build_observables(vectors, label)


def observable_config_dict(obs: CyclicObservableSet) -> dict:
    if np.any(obs.directions.imag != 0):
        raise ValueError("config files carry real components only")
    return {"label": obs.label, "vectors": obs.directions.real.tolist()}

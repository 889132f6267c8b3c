"""Classical side of the inequality.

A non-contextual model assigns a single joint distribution to all five
dichotomic variables. This module evaluates the functional on such joint
distributions (where it must be <= 0), samples them at random to try to
falsify that bound, and decides by linear programming whether five given pair
tables admit any joint extension at all.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .entropy import SUM_TOL, PairDistribution, binary_entropy_array, xlog2x
from .exceptions import ExclusivityViolation, InvalidDistribution, MalformedTargets

N_VARS = 5
N_ATOMS = 2**N_VARS

#: Outcome tuples in atom order; variable X_1 is the most significant.
OUTCOMES = tuple(itertools.product((-1, 1), repeat=N_VARS))

#: Atoms with no cyclically adjacent (+1, +1); these are the only atoms a
#: model respecting exclusivity may populate.
EXCLUSIVE_SUPPORT = tuple(
    k
    for k, x in enumerate(OUTCOMES)
    if not any(x[i] == 1 and x[(i + 1) % N_VARS] == 1 for i in range(N_VARS))
)

FEASIBILITY_TOL = 1e-6
WITNESS_TOL = 1e-7
CLASSICAL_BOUND_TOL = 1e-12


@dataclass(frozen=True)
class JointDistribution5:
    """Distribution over (x_1..x_5) in {-1,+1}^5, stored as a (2,)*5 array.

    Axis ``k`` belongs to X_{k+1}; index 0 is outcome -1 and index 1 is +1.
    """

    atoms: np.ndarray

    def __post_init__(self):
        a = np.array(self.atoms, dtype=float).reshape((2,) * N_VARS)
        if not np.all(np.isfinite(a)) or np.any(a < -1e-12) or np.any(a > 1 + 1e-12):
            raise InvalidDistribution("atoms must lie in [0, 1]")
        if abs(a.sum() - 1.0) > SUM_TOL:
            raise InvalidDistribution(f"atoms sum to {a.sum()!r}, not 1")
        a = np.clip(a, 0.0, 1.0)
        a.setflags(write=False)
        object.__setattr__(self, "atoms", a)

    @classmethod
    def point_mass(cls, outcome) -> "JointDistribution5":
        a = np.zeros(N_ATOMS)
        a[OUTCOMES.index(tuple(outcome))] = 1.0
        return cls(a)

    @classmethod
    def uniform(cls) -> "JointDistribution5":
        return cls(np.full(N_ATOMS, 1.0 / N_ATOMS))

    def flat(self) -> np.ndarray:
        return self.atoms.reshape(N_ATOMS)


def _check_index(i: int) -> None:
    if not 1 <= i <= N_VARS:
        raise IndexError(f"pair index must be in 1..{N_VARS}, got {i}")


def _pair_tables(atoms: np.ndarray) -> np.ndarray:
    """Pair tables of a batch: ``atoms[..., 2,2,2,2,2] -> [..., 5, 2, 2]``."""
    lead = atoms.ndim - N_VARS
    out = []
    for k in range(N_VARS):
        j = (k + 1) % N_VARS
        others = tuple(lead + m for m in range(N_VARS) if m not in (k, j))
        t = atoms.sum(axis=others)
        if j < k:
            t = np.swapaxes(t, -1, -2)
        out.append(t)
    return np.stack(out, axis=-3)


def pair_table(jd: JointDistribution5, i: int) -> np.ndarray:
    """Full 2x2 marginal table ``[x_i, x_{i+1}]`` of the pair starting at X_i."""
    _check_index(i)
    return _pair_tables(jd.atoms)[i - 1]


def marginalize_pair(jd: JointDistribution5, i: int, exclusive: bool = True):
    """Pair marginal of (X_i, X_{i+1}).

    With ``exclusive=True`` returns a :class:`PairDistribution` and raises
    ``ExclusivityViolation`` if the (+1,+1) cell carries more than 1e-9.
    Otherwise returns the plain 2x2 table.
    """
    t = pair_table(jd, i)
    if not exclusive:
        return t
    if t[1, 1] > 1e-9:
        raise ExclusivityViolation(f"pair {i} has (+1,+1) mass {t[1, 1]!r}")
    return PairDistribution(t[0, 0], t[0, 1], t[1, 0] + t[1, 1], i)


def single_marginal(jd: JointDistribution5, i: int) -> float:
    """p(+1 | X_i) under ``jd``."""
    _check_index(i)
    return float(np.take(jd.atoms, 1, axis=i - 1).sum())


def classical_m_batch(atoms) -> np.ndarray:
    """M for a batch of joint distributions given as ``(N, 32)`` atom arrays."""
    a = np.asarray(atoms, dtype=float)
    a = a.reshape(a.shape[:-1] + (2,) * N_VARS)
    tables = _pair_tables(a)
    pair_h = xlog2x(tables).sum(axis=(-1, -2))
    p_plus = tables[..., 1, :].sum(axis=-1)
    single_h = binary_entropy_array(p_plus[..., 1:-1])
    return pair_h[..., -1] - pair_h[..., :-1].sum(axis=-1) + single_h.sum(axis=-1)


def classical_m(jd: JointDistribution5) -> float:
    return float(classical_m_batch(jd.flat()))


def sample_joint_distributions(rng, count: int, concentration: float, exclusive: bool = False):
    """Dirichlet-random atom arrays of shape ``(count, 32)``.

    With ``exclusive=True`` only the atoms of ``EXCLUSIVE_SUPPORT`` are
    populated.
    """
    support = EXCLUSIVE_SUPPORT if exclusive else tuple(range(N_ATOMS))
    out = np.zeros((count, N_ATOMS))
    out[:, support] = rng.dirichlet(np.full(len(support), concentration), size=count)
    return out


@dataclass(frozen=True)
class OracleSummary:
    samples: int
    point_masses: int
    max_m_observed: float
    violations_found: int
    seed: int
    concentrations: tuple
    exclusive: bool

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "point_masses": self.point_masses,
            "max_m_observed": self.max_m_observed,
            "violations_found": self.violations_found,
            "seed": self.seed,
            "concentrations": list(self.concentrations),
            "exclusive": self.exclusive,
        }


_CHUNK = 10_000


def run_classical_oracle(
    samples: int = 100_000,
    seed: int = 0,
    concentrations: Sequence[float] = (0.1, 1.0, 10.0),
    exclusive: bool = False,
    include_point_masses: bool = True,
    workers: int = 1,
) -> OracleSummary:
    """Try to falsify ``M <= 0`` on random and extreme joint distributions.

    Samples are split evenly across ``concentrations`` and into fixed-size
    chunks, each with its own spawned seed, so the result does not depend on
    ``workers``.
    """
    per = np.full(len(concentrations), samples // len(concentrations))
    per[: samples % len(concentrations)] += 1
    tasks = []
    for alpha, n in zip(concentrations, per):
        for start in range(0, int(n), _CHUNK):
            tasks.append((float(alpha), min(_CHUNK, int(n) - start)))
    seeds = np.random.SeedSequence(seed).spawn(len(tasks))

    def run(task, ss):
        alpha, n = task
        m = classical_m_batch(sample_joint_distributions(np.random.default_rng(ss), n, alpha, exclusive))
        return float(m.max()), int(np.sum(m > CLASSICAL_BOUND_TOL))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(run, tasks, seeds))

    vertex_count = 0
    if include_point_masses:
        support = EXCLUSIVE_SUPPORT if exclusive else range(N_ATOMS)
        vertices = np.eye(N_ATOMS)[list(support)]
        m = classical_m_batch(vertices)
        results.append((float(m.max()), int(np.sum(m > CLASSICAL_BOUND_TOL))))
        vertex_count = len(vertices)

    return OracleSummary(
        samples=int(samples),
        point_masses=vertex_count,
        max_m_observed=max(r[0] for r in results),
        violations_found=sum(r[1] for r in results),
        seed=int(seed),
        concentrations=tuple(float(c) for c in concentrations),
        exclusive=exclusive,
    )


# -- joint extension ------------------------------------------------------------


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    witness: Optional[JointDistribution5]
    residual: float


def _marginal_matrix() -> np.ndarray:
    """Rows map atoms to the 20 pair cells (pair i, cell (a, b)) in order."""
    rows = []
    for i in range(N_VARS):
        j = (i + 1) % N_VARS
        for a, b in ((-1, -1), (-1, 1), (1, -1), (1, 1)):
            rows.append([1.0 if x[i] == a and x[j] == b else 0.0 for x in OUTCOMES])
    return np.array(rows)


MARGINAL_MATRIX = _marginal_matrix()


def _coerce_targets(targets) -> list:
    targets = list(targets)
    if len(targets) != N_VARS:
        raise MalformedTargets(f"expected {N_VARS} pair tables, got {len(targets)}")
    out = []
    for k, t in enumerate(targets):
        if isinstance(t, PairDistribution):
            out.append(t)
            continue
        try:
            out.append(PairDistribution(*map(float, t), index=k + 1))
        except (InvalidDistribution, TypeError, ValueError) as exc:
            raise MalformedTargets(f"target {k + 1}: {exc}") from None
    return out


def target_vector(targets) -> np.ndarray:
    targets = _coerce_targets(targets)
    return np.concatenate([[t.p_mm, t.p_mp, t.p_pm, 0.0] for t in targets])


def check_joint_extension(targets) -> FeasibilityVerdict:
    """Decide whether five exclusive pair tables have a joint extension.

    Solves ``min t`` subject to ``|A x - b| <= t`` cellwise, ``x >= 0`` and
    ``sum(x) = 1`` over the 32 atoms. The optimum ``t*`` is the smallest
    achievable worst-cell marginal error, so ``t* > 1e-6`` certifies that no
    joint distribution reproduces the targets.
    """
    b = target_vector(targets)
    A = MARGINAL_MATRIX
    m = A.shape[0]
    ones = np.ones((m, 1))
    A_ub = np.block([[A, -ones], [-A, -ones]])
    b_ub = np.concatenate([b, -b])
    c = np.zeros(N_ATOMS + 1)
    c[-1] = 1.0
    A_eq = np.concatenate([np.ones(N_ATOMS), [0.0]])[None, :]
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=[1.0],
        bounds=[(0, None)] * (N_ATOMS + 1),
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise RuntimeError(f"linear program did not converge: {res.message}")
    t_star = float(res.x[-1])
    x = np.clip(res.x[:N_ATOMS], 0.0, None)
    x /= x.sum()
    err = float(np.max(np.abs(A @ x - b)))
    if t_star > FEASIBILITY_TOL:
        return FeasibilityVerdict(False, None, t_star)
    return FeasibilityVerdict(True, JointDistribution5(x), err)

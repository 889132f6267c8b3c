"""Scans over the (alpha, beta) plane of a state family, maximization of M,
and CSV/JSON export of the resulting heatmaps."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy import ndimage
from scipy.optimize import minimize

from .inequality import batch_m, evaluate_m
from .model import (
    CyclicObservableSet,
    FamilyKind,
    StateFamily,
    default_observables,
    family_amplitudes,
    make_state,
    product_is_degenerate,
)

TWO_PI = 2 * math.pi

DEFAULT_WINDOWS = {
    FamilyKind.ENTANGLED: ((0.0, TWO_PI), (0.0, TWO_PI)),
    FamilyKind.PRODUCT: ((-TWO_PI, TWO_PI), (-TWO_PI, TWO_PI)),
}


@dataclass(frozen=True)
class ScanGrid:
    """Lattice over ``[start, stop)`` on each axis with ``steps`` points (radians)."""

    alpha_range: Tuple[float, float, int]
    beta_range: Tuple[float, float, int]
    family: FamilyKind = FamilyKind.ENTANGLED
    observables: str = "default"

    def __post_init__(self):
        object.__setattr__(self, "family", FamilyKind(self.family))
        if self.family is FamilyKind.CUSTOM:
            raise ValueError("scans need a built-in state family")
        for name, (start, stop, steps) in (("alpha", self.alpha_range), ("beta", self.beta_range)):
            if int(steps) != steps or steps < 2:
                raise ValueError(f"{name} axis needs at least 2 integer steps, got {steps!r}")
            if not start < stop:
                raise ValueError(f"{name} axis needs start < stop, got [{start}, {stop})")
        object.__setattr__(self, "alpha_range", (float(self.alpha_range[0]), float(self.alpha_range[1]), int(self.alpha_range[2])))
        object.__setattr__(self, "beta_range", (float(self.beta_range[0]), float(self.beta_range[1]), int(self.beta_range[2])))

    @classmethod
    def default(cls, family, steps: int = 200, observables: str = "default") -> "ScanGrid":
        family = FamilyKind(family)
        (a0, a1), (b0, b1) = DEFAULT_WINDOWS[family]
        return cls((a0, a1, steps), (b0, b1, steps), family, observables)

    def alphas(self) -> np.ndarray:
        start, stop, steps = self.alpha_range
        return np.linspace(start, stop, steps, endpoint=False)

    def betas(self) -> np.ndarray:
        start, stop, steps = self.beta_range
        return np.linspace(start, stop, steps, endpoint=False)

    def to_dict(self) -> dict:
        return {
            "alpha_range": list(self.alpha_range),
            "beta_range": list(self.beta_range),
            "family": self.family.value,
            "observables": self.observables,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScanGrid":
        return cls(tuple(d["alpha_range"]), tuple(d["beta_range"]), d["family"], d["observables"])


@dataclass(frozen=True)
class ScanResult:
    grid: ScanGrid
    m_values: np.ndarray  # [alpha_index, beta_index]; NaN marks a degenerate point
    max_point: Tuple[float, float, float]
    violation_fraction: float

    @property
    def missing(self) -> int:
        return int(np.isnan(self.m_values).sum())

    def nearest_cell(self, alpha: float, beta: float) -> Tuple[int, int]:
        a, b = self.grid.alphas(), self.grid.betas()
        return int(np.argmin(np.abs(a - alpha))), int(np.argmin(np.abs(b - beta)))

    def violation_region(self, alpha: float, beta: float) -> np.ndarray:
        """Mask of the connected M > 0 region (8-neighbour) holding the cell
        nearest to ``(alpha, beta)``; all False if that cell is not violating."""
        labels, _ = ndimage.label(np.nan_to_num(self.m_values, nan=-1.0) > 0, structure=np.ones((3, 3)))
        lab = labels[self.nearest_cell(alpha, beta)]
        return labels == lab if lab else np.zeros_like(labels, dtype=bool)


def _family_m(obs, family, alphas, betas) -> np.ndarray:
    """M on a broadcast set of parameters, NaN where the product family vanishes."""
    alphas, betas = np.broadcast_arrays(np.asarray(alphas, float), np.asarray(betas, float))
    vecs = family_amplitudes(family, alphas, betas)
    norms = np.linalg.norm(vecs, axis=-1)
    bad = product_is_degenerate(alphas, betas) if family is FamilyKind.PRODUCT else np.zeros(alphas.shape, bool)
    safe = np.where(bad, 1.0, norms)
    m = batch_m(obs, vecs / safe[..., None])
    return np.where(bad, np.nan, m)


def _summarize(grid: ScanGrid, m: np.ndarray) -> ScanResult:
    valid = ~np.isnan(m)
    if not valid.any():
        raise ValueError("every lattice point is degenerate")
    # np.nanargmax returns the first maximum in alpha-major order, i.e. the
    # lexicographically smallest (alpha, beta) among ties
    k = np.unravel_index(np.nanargmax(m), m.shape)
    max_point = (float(grid.alphas()[k[0]]), float(grid.betas()[k[1]]), float(m[k]))
    frac = float(np.sum(m[valid] > 0) / valid.sum())
    m.setflags(write=False)
    return ScanResult(grid, m, max_point, frac)


def scan(grid: ScanGrid, observables: Optional[CyclicObservableSet] = None, workers: int = 1) -> ScanResult:
    """Evaluate M at every lattice point.

    Rows (fixed alpha) are split across ``workers`` threads and written into
    disjoint slots, so the output does not depend on the worker count.
    """
    obs = observables if observables is not None else default_observables()
    grid = replace(grid, observables=obs.label)
    alphas, betas = grid.alphas(), grid.betas()
    m = np.empty((alphas.size, betas.size))

    def fill(rows):
        m[rows] = _family_m(obs, grid.family, alphas[rows, None], betas[None, :])

    chunks = np.array_split(np.arange(alphas.size), max(1, min(workers, alphas.size)))
    if len(chunks) == 1:
        fill(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            list(pool.map(fill, chunks))
    return _summarize(grid, m)


class Optimum(NamedTuple):
    alpha: float
    beta: float
    m: float


def _refine(obs, family, start, step, xatol):
    def neg_m(x):
        v = _family_m(obs, family, x[0], x[1])
        return math.inf if np.isnan(v) else -float(v)

    # terminate on simplex size alone; M carries ~1e-15 roundoff noise
    simplex = np.array([start, start + [step, 0.0], start + [0.0, step]])
    res = minimize(
        neg_m,
        start,
        method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": xatol, "fatol": math.inf, "maxiter": 20_000, "maxfev": 40_000},
    )
    return res.x


def optimize(
    family,
    observables: Optional[CyclicObservableSet] = None,
    coarse_steps: int = 60,
    restarts: int = 4,
    seed: int = 0,
    window=None,
    xatol: float = 1e-8,
    workers: int = 1,
) -> Optimum:
    """Maximize M over (alpha, beta) for a built-in family.

    A coarse ``coarse_steps`` x ``coarse_steps`` scan picks the best
    ``restarts`` cells; each is jittered inside its cell (seeded) and refined
    with Nelder-Mead until the simplex is smaller than ``xatol`` radians. A
    refinement never replaces its starting point unless it improves on it, so
    the returned M is at least the coarse-grid maximum. The final value is
    recomputed with :func:`evaluate_m` at the returned angles.
    """
    family = FamilyKind(family)
    if coarse_steps < 10:
        raise ValueError("coarse_steps must be >= 10")
    obs = observables if observables is not None else default_observables()
    (a0, a1), (b0, b1) = window if window is not None else DEFAULT_WINDOWS[family]
    grid = ScanGrid((a0, a1, coarse_steps), (b0, b1, coarse_steps), family, obs.label)
    coarse = scan(grid, obs)
    m = np.nan_to_num(coarse.m_values, nan=-np.inf).ravel()
    order = np.argsort(-m, kind="stable")[: max(1, restarts)]
    alphas, betas = grid.alphas(), grid.betas()
    step = min((a1 - a0), (b1 - b0)) / coarse_steps
    rng = np.random.default_rng(seed)
    jitter = rng.uniform(-0.5, 0.5, size=(order.size, 2)) * step

    def run(k):
        ia, ib = np.unravel_index(order[k], coarse.m_values.shape)
        cell = np.array([alphas[ia], betas[ib]])
        start = cell + jitter[k]
        x = _refine(obs, family, start, step / 2, xatol)
        candidates = [(float(m[order[k]]), *cell)]
        m_start = float(_family_m(obs, family, *start))
        if not np.isnan(m_start):
            candidates.append((m_start, *start))
        m_x = float(_family_m(obs, family, *x))
        if not np.isnan(m_x):
            candidates.append((m_x, *x))
        best = max(candidates, key=lambda c: c[0])
        return float(best[1]), float(best[2])

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        points = list(pool.map(run, range(order.size)))

    scored = [Optimum(a, b, evaluate_m(obs, make_state(StateFamily(family, a, b))).m_value) for a, b in points]
    # deterministic reduction: highest M, then lexicographically smallest (alpha, beta)
    return min(scored, key=lambda o: (-o.m, o.alpha, o.beta))


# -- export ----------------------------------------------------------------------


def _header(result: ScanResult, metadata: Optional[dict]) -> dict:
    head = {"grid": result.grid.to_dict()}
    if metadata:
        head["config"] = metadata
    return head


def scan_to_dict(result: ScanResult, metadata: Optional[dict] = None) -> dict:
    d = _header(result, metadata)
    d.update(
        {
            "alphas": result.grid.alphas().tolist(),
            "betas": result.grid.betas().tolist(),
            "m_values": [[None if np.isnan(v) else float(v) for v in row] for row in result.m_values],
            "max_point": {"alpha": result.max_point[0], "beta": result.max_point[1], "m_bits": result.max_point[2]},
            "violation_fraction": result.violation_fraction,
            "missing": result.missing,
        }
    )
    return d


def scan_from_dict(d: dict) -> ScanResult:
    grid = ScanGrid.from_dict(d["grid"])
    m = np.array([[np.nan if v is None else v for v in row] for row in d["m_values"]], dtype=float)
    mp = d["max_point"]
    m.setflags(write=False)
    return ScanResult(grid, m, (mp["alpha"], mp["beta"], mp["m_bits"]), d["violation_fraction"])


def write_scan(result: ScanResult, fmt: str, fh, metadata: Optional[dict] = None) -> None:
    """Write a scan to an open text stream as ``csv`` or ``json``.

    CSV: ``# ``-prefixed JSON header lines (grid, optional config), then
    ``alpha,beta,m_bits`` with one row per lattice point in alpha-major order.
    Degenerate points have an empty ``m_bits`` field. Floats use ``repr`` so
    they round-trip exactly.
    """
    if fmt == "json":
        fh.write(json.dumps(scan_to_dict(result, metadata), indent=1) + "\n")
    elif fmt == "csv":
        for key, value in _header(result, metadata).items():
            fh.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha", "beta", "m_bits"])
        for a, row in zip(result.grid.alphas(), result.m_values):
            for b, v in zip(result.grid.betas(), row):
                w.writerow([repr(float(a)), repr(float(b)), "" if np.isnan(v) else repr(float(v))])
    else:
        raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'json'")


def export_scan(result: ScanResult, fmt: str, path, metadata: Optional[dict] = None) -> None:
    """Write a scan file; the ``fmt`` flag decides the format, never the extension."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'json'")
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            write_scan(result, fmt, fh, metadata)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write scan to {path}: {exc.strerror}") from exc


def load_scan_json(path) -> ScanResult:
    return scan_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def read_scan_csv(path):
    """Return ``(header, rows)``; rows are ``(alpha, beta, m_bits or None)``."""
    header, rows = {}, []
    with open(path, newline="", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            header[key] = json.loads(value)
        else:
            body.append(line)
    reader = csv.reader(body)
    if next(reader) != ["alpha", "beta", "m_bits"]:
        raise ValueError(f"{path}: unexpected CSV header")
    for a, b, m in reader:
        rows.append((float(a), float(b), float(m) if m else None))
    return header, rows

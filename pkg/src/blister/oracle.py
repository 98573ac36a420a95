"""Direct minimization of the discretized film energy on a periodic grid.

This is an independent check on the closed-form theory: it never evaluates
the auxiliary function.  The objective is the reduced energy, where the
horizontal displacement has been eliminated,

    E(z) = |{z > 0}| + (alpha/L_bar) (int z'^2)^2 + (4 alpha/3) int z''^2
           - 2 theta_bar int z'^2,

discretized with periodic central (z') and three-point (z'') differences.
The delamination term has no gradient, so it enters through the seeds: each
seed confines ``z`` to an interval mask of a given width and a projected
gradient descent minimizes the smooth part inside it.  A width scan then
picks the best total energy.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .core import GAMMA, PhysicalParams
from .profile import smallest_blister

log = logging.getLogger(__name__)

DEFAULT_SEED = 20240611
ARMIJO = 1e-4


@dataclass
class DiscreteField:
    n: int
    h: float
    zeta1: np.ndarray
    zeta2: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 128 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 128, got {self.n}")
        self.zeta1 = np.asarray(self.zeta1, dtype=float)
        self.zeta2 = np.asarray(self.zeta2, dtype=float)
        if self.zeta1.shape != (self.n,) or self.zeta2.shape != (self.n,):
            raise ValueError("field arrays must have length n")
        if np.any(self.zeta2 < 0):
            raise ValueError("zeta2 must be non-negative")

    @property
    def L_bar(self) -> float:
        return self.n * self.h

    @property
    def x(self) -> np.ndarray:
        return -0.5 * self.L_bar + self.h * np.arange(self.n)

    @classmethod
    def zeros(cls, n: int, L_bar: float) -> "DiscreteField":
        return cls(n, L_bar / n, np.zeros(n), np.zeros(n))

    def shifted(self, k: int) -> "DiscreteField":
        return DiscreteField(self.n, self.h, np.roll(self.zeta1, k), np.roll(self.zeta2, k))


# --- periodic difference operators -------------------------------------------

def d_forward(z: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(z, -1) - z) / h


def d_central(z: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(z, -1) - np.roll(z, 1)) / (2 * h)


def d_second(z: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(z, -1) - 2 * z + np.roll(z, 1)) / (h * h)


def default_threshold(z: np.ndarray) -> float:
    return 1e-9 * max(1.0, float(np.max(z)) if z.size else 0.0)


def support_size(z: np.ndarray, threshold: Optional[float] = None) -> int:
    thr = default_threshold(z) if threshold is None else threshold
    return int(np.count_nonzero(z > thr))


# --- energies -------------------------------------------------------------------

def discrete_energy(fld: DiscreteField, p: PhysicalParams, support_threshold: Optional[float] = None) -> float:
    """Full two-field energy: forward difference for zeta1, central for zeta2'."""
    h, a, tb = fld.h, p.alpha, p.theta_bar
    z1, z2 = fld.zeta1, fld.zeta2
    dz2 = d_central(z2, h)
    strain = d_forward(z1, h) + 0.5 * dz2**2
    smooth = 4 * a * strain**2 + (4 * a / 3) * d_second(z2, h) ** 2 - 2 * tb * dz2**2
    return GAMMA * h * support_size(z2, support_threshold) + h * float(np.sum(smooth))


def _smooth_parts(z: np.ndarray, h: float) -> tuple[float, float, np.ndarray, np.ndarray]:
    dz = d_central(z, h)
    d2z = d_second(z, h)
    return h * float(dz @ dz), h * float(d2z @ d2z), dz, d2z


def smooth_reduced_energy(z: np.ndarray, p: PhysicalParams, h: float) -> float:
    S, B, _, _ = _smooth_parts(z, h)
    L_bar = h * z.size
    return p.alpha / L_bar * S * S + 4 * p.alpha / 3 * B - 2 * p.theta_bar * S


def smooth_reduced_gradient(z: np.ndarray, p: PhysicalParams, h: float) -> tuple[float, np.ndarray]:
    """Value and gradient of the smooth part of the reduced energy."""
    S, B, dz, d2z = _smooth_parts(z, h)
    L_bar = h * z.size
    a = p.alpha
    grad_S = -2 * h * d_central(dz, h)  # central difference is skew-adjoint
    grad_B = 2 * h * d_second(d2z, h)
    val = a / L_bar * S * S + 4 * a / 3 * B - 2 * p.theta_bar * S
    return val, (2 * a * S / L_bar - 2 * p.theta_bar) * grad_S + (4 * a / 3) * grad_B


def reduced_discrete_energy(zeta2: np.ndarray, p: PhysicalParams, h: float,
                            support_threshold: Optional[float] = None) -> float:
    z = np.asarray(zeta2, dtype=float)
    return GAMMA * h * support_size(z, support_threshold) + smooth_reduced_energy(z, p, h)


def reconstruct_zeta1(zeta2: np.ndarray, h: float) -> np.ndarray:
    """Horizontal displacement with constant membrane strain, ``zeta1[0] = 0``."""
    dz = d_central(zeta2, h)
    K = h * float(dz @ dz) / (h * zeta2.size)
    inc = h * (0.5 * K - 0.5 * dz**2)
    return np.concatenate(([0.0], np.cumsum(inc[:-1])))


def measured_strain(zeta2: np.ndarray, h: float) -> float:
    dz = d_forward(zeta2, h)
    return h * float(dz @ dz) / (h * zeta2.size)


# --- projected gradient on a fixed mask ----------------------------------------

def _preconditioner(n: int, h: float, p: PhysicalParams) -> sp.csc_matrix:
    """SPD periodic operator ``h[(8a/3) D2^T D2 + 4 theta_bar (-D2) + mu]``."""
    a, tb = p.alpha, p.theta_bar
    L_bar = n * h
    mu = (8 * a / 3) * (2 * math.pi / L_bar) ** 4 + 4 * tb * (2 * math.pi / L_bar) ** 2
    c4 = (8 * a / 3) / h**4
    c2 = 4 * tb / h**2
    diag = {0: 6 * c4 + 2 * c2 + mu, 1: -4 * c4 - c2, 2: c4}
    rows, cols, vals = [], [], []
    idx = np.arange(n)
    for off, v in diag.items():
        for s in ({0} if off == 0 else {off, -off}):
            rows.append(idx)
            cols.append((idx + s) % n)
            vals.append(np.full(n, v))
    M = sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    M.sum_duplicates()
    return h * M


@dataclass
class DescentResult:
    zeta2: np.ndarray
    smooth_energy: float
    iterations: int
    converged: bool
    history: list[float]
    min_after_projection: float


def projected_descent(z0: np.ndarray, mask: np.ndarray, p: PhysicalParams, h: float,
                      max_iter: int = 100_000, rtol: float = 1e-10, window: int = 50,
                      keep_history: bool = False) -> DescentResult:
    """Minimize the smooth reduced energy over ``{z >= 0, z = 0 off mask}``.

    Two-metric projection: bound-active nodes get a diagonally scaled step,
    free nodes a step preconditioned by the bending/compression operator plus
    a rank-one term for the nonlocal strain energy.  Backtracking Armijo line
    search along the projection arc.
    """
    n = z0.size
    mask = np.asarray(mask, dtype=bool)
    z = np.where(mask, np.maximum(z0, 0.0), 0.0)
    P = _preconditioner(n, h, p)
    Pdiag = P.diagonal()
    L_bar = n * h
    cache: dict[bytes, tuple[np.ndarray, object]] = {}

    E, g = smooth_reduced_gradient(z, p, h)
    hist = [E]
    min_proj = float(z.min())
    t = 1.0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        # projected-gradient stationarity measure sets the active tolerance
        pg = z - np.where(mask, np.maximum(z - g / Pdiag, 0.0), 0.0)
        eps_act = min(1e-8, float(np.max(np.abs(pg))))
        active = mask & (z <= eps_act) & (g > 0)
        free = mask & ~active
        d = np.zeros(n)
        d[active] = -g[active] / Pdiag[active]
        if free.any():
            key = np.packbits(free).tobytes()
            if key not in cache:
                fi = np.flatnonzero(free)
                cache.clear()
                cache[key] = (fi, spla.splu(P[fi][:, fi].tocsc()))
            fi, lu = cache[key]
            # rank-one curvature of (alpha/L_bar) S^2 along grad S
            dz = d_central(z, h)
            u = (-2 * h * d_central(dz, h))[fi]
            w = 2 * p.alpha / L_bar
            Pg = lu.solve(g[fi])
            Pu = lu.solve(u)
            d[fi] = -(Pg - Pu * (w * (u @ Pg)) / (1.0 + w * (u @ Pu)))
        if not np.any(d):
            converged = True
            break

        t = min(1.0, 2.0 * t)
        while True:
            zt = np.where(mask, np.maximum(z + t * d, 0.0), 0.0)
            Et = smooth_reduced_energy(zt, p, h)
            if Et <= E + ARMIJO * float(g @ (zt - z)):
                break
            t *= 0.5
            if t < 1e-20:
                break
        if t < 1e-20 or np.array_equal(zt, z):
            converged = True
            break
        min_proj = min(min_proj, float(zt.min()))
        z = zt
        E, g = smooth_reduced_gradient(z, p, h)
        hist.append(E)
        if len(hist) > window:
            ref = hist[-1 - window]
            if abs(ref - E) <= rtol * max(abs(E), GAMMA * L_bar):
                converged = True
                break
    return DescentResult(z, E, it, converged, hist if keep_history else hist[-1:], min_proj)


# --- seeds and the width scan ---------------------------------------------------

@dataclass
class SeedOutcome:
    label: str
    width_cells: int
    energy: float
    T_measured: float
    converged: bool
    iterations: int


@dataclass
class OracleResult:
    energy: float
    K_measured: float
    T_measured: float
    field: DiscreteField
    converged: bool
    iterations: int
    support_threshold: float
    seed_label: str
    seeds: list[SeedOutcome] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "K_measured": self.K_measured,
            "T_measured": self.T_measured,
            "n": self.field.n,
            "h": self.field.h,
            "L_bar": self.field.L_bar,
            "converged": self.converged,
            "iterations": self.iterations,
            "support_threshold": self.support_threshold,
            "seed": self.seed_label,
            "seeds": [vars(s) for s in self.seeds],
        }


def interval_mask(n: int, m: int) -> np.ndarray:
    """``m`` consecutive nodes centred on ``x = 0`` (node ``n//2``)."""
    mask = np.zeros(n, dtype=bool)
    if m >= n:
        mask[:] = True
        return mask
    start = n // 2 - m // 2
    mask[start:start + m] = True
    return mask


def bump_seed(n: int, h: float, m: int) -> np.ndarray:
    """Cosine bump vanishing one cell outside an ``m``-node mask."""
    x = -0.5 * n * h + h * np.arange(n)
    if m >= n:
        w = n * h
        return 0.1 * w * (np.cos(2 * math.pi * x / w) + 1.0 + 1e-3)
    w = (m + 1) * h
    centre = (n // 2 - m // 2 + 0.5 * (m - 1)) * h - 0.5 * n * h
    s = x - centre
    z = 0.1 * w * (np.cos(2 * math.pi * s / w) + 1.0)
    return np.where(np.abs(s) < 0.5 * w, z, 0.0)


class _Runner:
    def __init__(self, p: PhysicalParams, n: int, max_iter: int, rtol: float):
        self.p, self.n, self.h = p, n, p.L_bar / n
        self.max_iter, self.rtol = max_iter, rtol
        self.cache: dict[int, tuple[float, DescentResult]] = {}

    def total(self, res: DescentResult) -> float:
        return GAMMA * self.h * support_size(res.zeta2) + res.smooth_energy

    def width(self, m: int) -> float:
        m = max(1, min(m, self.n))
        if m not in self.cache:
            res = projected_descent(bump_seed(self.n, self.h, m), interval_mask(self.n, m),
                                    self.p, self.h, self.max_iter, self.rtol)
            self.cache[m] = (self.total(res), res)
        return self.cache[m][0]


def oracle_minimize(p: PhysicalParams, n: int = 4096, seeds: Sequence[str] = ("zero", "bump", "noise"),
                    n_widths: int = 16, rng_seed: int = DEFAULT_SEED, max_iter: int = 100_000,
                    rtol: float = 1e-10) -> OracleResult:
    """Best discrete minimizer over a family of seeds.

    ``zero``: the trivial field.  ``bump``: cosine bumps confined to masks of
    ``n_widths`` widths spanning ``[T*/2, L_bar]``, then an integer
    golden-section refinement of the best width.  ``noise``: small positive
    uniform noise on the whole circle.
    """
    if n < 128 or n & (n - 1):
        raise ValueError("n must be a power of two >= 128")
    h = p.L_bar / n
    run = _Runner(p, n, max_iter, rtol)
    outcomes: list[tuple[float, str, DescentResult]] = []

    if "zero" in seeds:
        res = projected_descent(np.zeros(n), np.ones(n, bool), p, h, max_iter, rtol)
        outcomes.append((run.total(res), "zero", res))

    if "bump" in seeds:
        t_star = smallest_blister(p.alpha)[0]
        lo = max(3, min(n, int(round(0.5 * t_star / h))))
        widths = sorted(set(np.linspace(lo, n, n_widths).round().astype(int).tolist()))
        vals = [run.width(m) for m in widths]
        j = int(np.argmin(vals))
        a = widths[max(j - 1, 0)]
        b = widths[min(j + 1, len(widths) - 1)]
        _golden_int(run.width, a, b)
        for m, (e, res) in sorted(run.cache.items()):
            outcomes.append((e, f"bump:{m}", res))

    if "noise" in seeds:
        rng = np.random.default_rng(rng_seed)
        z0 = rng.uniform(0.0, 1e-3, n)
        res = projected_descent(z0, np.ones(n, bool), p, h, max_iter, rtol)
        outcomes.append((run.total(res), "noise", res))

    if not outcomes:
        raise ValueError("no seeds requested")
    best_e, best_label, best = min(outcomes, key=lambda o: o[0])
    z = best.zeta2
    thr = default_threshold(z)
    fld = DiscreteField(n, h, reconstruct_zeta1(z, h), z)
    summary = [
        SeedOutcome(lbl, _width_of(lbl, n), e, h * support_size(r.zeta2), r.converged, r.iterations)
        for e, lbl, r in outcomes
    ]
    log.debug("oracle best %s energy %.12g", best_label, best_e)
    return OracleResult(
        energy=best_e,
        K_measured=measured_strain(z, h),
        T_measured=h * support_size(z, thr),
        field=fld,
        converged=best.converged,
        iterations=best.iterations,
        support_threshold=thr,
        seed_label=best_label,
        seeds=summary,
    )


def _width_of(label: str, n: int) -> int:
    if label.startswith("bump:"):
        return int(label.split(":")[1])
    return 0 if label == "zero" else n


def _golden_int(fn, a: int, b: int) -> None:
    """Integer golden-section search on ``[a, b]``; results land in ``fn``'s cache."""
    invphi = (math.sqrt(5) - 1) / 2
    while b - a > 3:
        c = int(round(b - invphi * (b - a)))
        d = int(round(a + invphi * (b - a)))
        if c == d:
            d = c + 1
        if fn(c) <= fn(d):
            b = d
        else:
            a = c
    for m in range(a, b + 1):
        fn(m)

"""Closed-form minimizing profiles and their energies.

A profile is fixed by the membrane strain constant ``K``.  The blister is
centred at ``x = 0``, ``inf zeta2 = 0`` and ``zeta1(-L_bar/2) = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import io
from .classifier import MinimizerResult, Region, minimize_aux
from .core import (
    DEFAULT_TOL,
    GAMMA,
    LENGTH_FACTOR,
    DomainError,
    PhysicalParams,
    ReducedParams,
    f_value,
    reduce,
    unreduce,
)

# Slack for K sitting on the right end of the admissible interval.
_K_SLACK = 1e-12


@dataclass(frozen=True)
class BlisterProfile:
    K: float
    beta: float
    A: float
    T: float
    params: PhysicalParams
    branch: Optional[str] = None

    @property
    def trivial(self) -> bool:
        return self.K == 0.0

    @property
    def fully_delaminated(self) -> bool:
        return self.T == self.params.L_bar

    def to_dict(self) -> dict:
        p = self.params
        return {
            "alpha": p.alpha,
            "theta_bar": p.theta_bar,
            "L_bar": p.L_bar,
            "K": self.K,
            "beta": self.beta,
            "A": self.A,
            "T": self.T,
            "branch": self.branch,
        }


def _check_K(K: float, r: ReducedParams) -> None:
    if not (0.0 <= K <= r.d_upper + _K_SLACK * max(1.0, r.theta)):
        raise DomainError(f"K={K} outside the admissible interval [0, {r.d_upper}]")


def build_profile(K: float, p: PhysicalParams, branch: Optional[str] = None) -> BlisterProfile:
    r = reduce(p)
    _check_K(K, r)
    beta = math.sqrt(3.0 * (p.theta_bar - p.alpha * K) / (2.0 * p.alpha))
    if K == 0.0:
        return BlisterProfile(0.0, beta, 0.0, 0.0, p, branch)
    if K >= r.theta_tilde:
        T = p.L_bar
    else:
        T = 2.0 * math.pi / beta
    A = math.sqrt(K * p.L_bar / (math.pi * beta))
    return BlisterProfile(K, beta, A, T, p, branch)


def _wrap(x, L_bar: float):
    x = np.asarray(x, dtype=float)
    return (x + 0.5 * L_bar) % L_bar - 0.5 * L_bar


def eval_profile(bp: BlisterProfile, x):
    """Return ``(zeta1, zeta2, zeta1', zeta2', zeta2'')`` at ``x``.

    Accepts scalars or arrays; points are wrapped into ``[-L_bar/2, L_bar/2)``.
    """
    Lb = bp.params.L_bar
    xw = _wrap(x, Lb)
    scalar = xw.ndim == 0
    xw = np.atleast_1d(xw)
    K, b, A, T = bp.K, bp.beta, bp.A, bp.T

    z1 = np.where(xw < 0.0, 0.5 * K * (xw + 0.5 * Lb), 0.5 * K * (xw - 0.5 * Lb))
    dz1 = np.full_like(xw, 0.5 * K)
    z2 = np.zeros_like(xw)
    dz2 = np.zeros_like(xw)
    d2z2 = np.zeros_like(xw)
    if T > 0.0:
        inside = np.abs(xw) < 0.5 * T
        xi = xw[inside]
        z1[inside] = K * Lb / (8.0 * math.pi) * np.sin(2 * b * xi) + 0.5 * K * (1 - Lb / T) * xi
        dz1[inside] = K * Lb * b / (4.0 * math.pi) * np.cos(2 * b * xi) + 0.5 * K * (1 - Lb / T)
        z2[inside] = A * (np.cos(b * xi) + 1.0)
        dz2[inside] = -A * b * np.sin(b * xi)
        d2z2[inside] = -A * b * b * np.cos(b * xi)
    out = (z1, z2, dz1, dz2, d2z2)
    if scalar:
        return tuple(float(v[0]) for v in out)
    return out


def ode_residual(bp: BlisterProfile, x):
    """``zeta2'''' + beta^2 zeta2''`` inside the support (zero analytically)."""
    if bp.K <= 0.0:
        raise DomainError("ODE residual needs a nontrivial profile")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= 0.5 * bp.T):
        raise DomainError("ODE residual only defined inside the support")
    b, A = bp.beta, bp.A
    d4 = A * b**4 * np.cos(b * x)
    d2 = -A * b * b * np.cos(b * x)
    res = d4 + b * b * d2
    return float(res) if res.ndim == 0 else res


def closed_form_energy(K: float, r: ReducedParams) -> float:
    _check_K(K, r)
    return LENGTH_FACTOR * f_value(K, r)


def _derivs(bp: BlisterProfile, x: np.ndarray, inside: bool):
    """``(zeta1', zeta2', zeta2'')`` using one piece's formula on a closed interval."""
    K, b, A, T, Lb = bp.K, bp.beta, bp.A, bp.T, bp.params.L_bar
    if not inside:
        return np.full_like(x, 0.5 * K), np.zeros_like(x), np.zeros_like(x)
    dz1 = K * Lb * b / (4.0 * math.pi) * np.cos(2 * b * x) + 0.5 * K * (1 - Lb / T)
    return dz1, -A * b * np.sin(b * x), -A * b * b * np.cos(b * x)


def _pieces(bp: BlisterProfile, n: int) -> list[tuple[np.ndarray, bool]]:
    """Node sets for the support and its complement, both ending on ``+-T/2``."""
    Lb, T = bp.params.L_bar, bp.T
    if T == 0.0:
        return [(np.linspace(-0.5 * Lb, 0.5 * Lb, n + 1), False)]
    if T >= Lb:
        return [(np.linspace(-0.5 * Lb, 0.5 * Lb, n + 1), True)]
    n_in = min(max(4, round(n * T / Lb)), n - 2)
    n_out = n - n_in
    # the complement is contiguous on the circle: [T/2, L_bar - T/2]
    inner = np.linspace(-0.5 * T, 0.5 * T, n_in + 1)
    outer = np.linspace(0.5 * T, Lb - 0.5 * T, n_out + 1)
    return [(inner, True), (outer, False)]


def profile_energy_quadrature(bp: BlisterProfile, n: int = 1 << 16) -> float:
    """Energy of the profile by composite trapezoidal quadrature on ``n`` cells.

    The delamination term is added as ``GAMMA * T`` exactly.
    """
    if n < 64:
        raise ValueError("need at least 64 quadrature cells")
    a, tb = bp.params.alpha, bp.params.theta_bar
    total = GAMMA * bp.T
    for xs, inside in _pieces(bp, n):
        dz1, dz2, d2z2 = _derivs(bp, xs, inside)
        g = 4 * a * (dz1 + 0.5 * dz2**2) ** 2 + (4 * a / 3) * d2z2**2 - 2 * tb * dz2**2
        total += float(np.trapezoid(g, xs))
    return total


def strain_budget(bp: BlisterProfile, n: int = 1 << 16) -> float:
    """``(1/L_bar) * int zeta2'^2`` by the same quadrature; equals ``K``."""
    total = 0.0
    for xs, inside in _pieces(bp, n):
        dz2 = _derivs(bp, xs, inside)[1]
        total += float(np.trapezoid(dz2**2, xs))
    return total / bp.params.L_bar


def smallest_blister(alpha: float) -> tuple[float, float]:
    """Infimum of support width and amplitude over not-fully-delaminated blisters."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    return 4.0 * math.pi * math.sqrt(2.0 / 3.0) * alpha**0.25, 4.0 / math.sqrt(3.0)


# --- global minimizers --------------------------------------------------------

def global_profiles(p: PhysicalParams, tol: float = DEFAULT_TOL) -> tuple[MinimizerResult, list[BlisterProfile]]:
    """All global minimizers at ``p``: one profile per element of the argmin."""
    r = reduce(p)
    res = minimize_aux(r, tol)
    profiles = [build_profile(K, p, res.branch if K > 0 else None) for K in res.argmin]
    return res, profiles


def blister_size(r: ReducedParams, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """``(T, A)`` of the nontrivial global minimizer (``(0, 0)`` if trivial)."""
    res = minimize_aux(r, tol)
    bp = build_profile(res.K, unreduce(r))
    return bp.T, bp.A


# --- p-blister local branches ------------------------------------------------
# Exploration of candidate local minimizers made of p equal bumps; these are
# not global results.

def p_branch_energy(K: float, p: int, pp: PhysicalParams) -> float:
    if not (isinstance(p, int) and p >= 1):
        raise ValueError("p must be a positive integer")
    a, tb, Lb = pp.alpha, pp.theta_bar, pp.L_bar
    if not (0.0 < K < tb / a):
        raise DomainError(f"K must lie in (0, theta), got {K}")
    T = 2.0 * math.pi * math.sqrt(2.0 * a / (3.0 * (tb - a * K)))
    if p * T > Lb * (1.0 + 1e-12):
        raise DomainError(f"{p} bumps of width {T} do not fit in L_bar={Lb}")
    return p * T - a * K * K * Lb


def optimize_p_branch(p: int, pp: PhysicalParams, tol: float = DEFAULT_TOL) -> Optional[tuple[float, float]]:
    """Best ``K`` for ``p`` equal bumps, or ``None`` when only the trivial state is left.

    Equivalent to the one-bump problem with ``L`` replaced by ``L/p``.
    """
    if not (isinstance(p, int) and p >= 1):
        raise ValueError("p must be a positive integer")
    r = reduce(pp)
    rp = ReducedParams(r.alpha, r.theta, r.L / p)
    res = minimize_aux(rp, tol)
    if res.trivial_only:
        return None
    K = res.K
    return K, p_branch_energy(K, p, pp)


# --- output -------------------------------------------------------------------

def sample(bp: BlisterProfile, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    Lb = bp.params.L_bar
    x = -0.5 * Lb + Lb * np.arange(n) / n
    z1, z2 = eval_profile(bp, x)[:2]
    return x, z1, z2


def write_profile_csv(path: str | Path, bp: BlisterProfile, n: int) -> Path:
    x, z1, z2 = sample(bp, n)
    return io.write_csv(path, ["x", "zeta1", "zeta2"], zip(x.tolist(), z1.tolist(), z2.tolist()))


def region_admits_blister(region: Region) -> bool:
    return region is not Region.D0

"""Interior critical point of the auxiliary function, phase-diagram strata and
the argmin of ``f`` over the admissible interval."""
from __future__ import annotations

import enum
import logging
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    DEFAULT_TOL,
    DomainError,
    ReducedParams,
    curve_L01,
    curve_L02,
    curve_L12,
    curve_Ld,
    f_prime,
    f_second,
    f_value,
    theta_star,
)

log = logging.getLogger(__name__)

# Runs the grid cross-check inside minimize_aux when set.
DEBUG_CHECK = bool(os.environ.get("BLISTER_DEBUG"))


class Region(str, enum.Enum):
    D0 = "D0"
    D1 = "D1"
    D2 = "D2"
    Gamma01 = "Gamma01"
    Gamma02 = "Gamma02"
    Gamma12 = "Gamma12"
    TriplePoint = "TriplePoint"

    @property
    def is_tie(self) -> bool:
        return self in (Region.Gamma01, Region.Gamma02, Region.TriplePoint)


INTERIOR = "interior"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class MinimizerResult:
    region: Region
    argmin: tuple[float, ...]
    f_at_argmin: float
    branch: Optional[str]
    x_bar: Optional[float]

    @property
    def K(self) -> float:
        """The nonzero minimizer if there is one, else 0."""
        return self.argmin[-1]

    @property
    def trivial_only(self) -> bool:
        return self.argmin == (0.0,)


def find_Xm(r: ReducedParams) -> Optional[float]:
    """Return the interior local minimizer of ``f`` on ``(2 theta/5, theta)``.

    ``None`` when ``L <= L_d(theta)``: ``f`` is then increasing on ``(0, theta)``.
    The root of ``f'`` is bracketed (``f'(2theta/5) < 0``, ``f' -> +inf`` at
    ``theta``), bisected to width ``1e-13 theta`` and polished by Newton.
    """
    theta, L = r.theta, r.L
    if L <= curve_Ld(theta):
        return None
    eps = 1e-15
    lo = 0.4 * theta * (1.0 + eps)
    hi = theta * (1.0 - eps)
    if f_prime(lo, r) >= 0.0:
        # L is within rounding of L_d: the double root sits at 2 theta/5
        return lo
    while f_prime(hi, r) <= 0.0:
        eps *= 10.0
        hi = theta * (1.0 - eps)
        if eps > 1e-3:
            raise ArithmeticError(f"cannot bracket the root of f' for {r}")

    width = 1e-13 * theta
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if f_prime(mid, r) < 0.0:
            lo = mid
        else:
            hi = mid

    x = 0.5 * (lo + hi)
    scale = max(1.0, 2.0 * L * x)
    for _ in range(8):
        g = f_prime(x, r)
        if abs(g) <= 1e-12 * scale:
            break
        step = g / f_second(x, r)
        x_new = x - step
        if not (lo <= x_new <= hi):
            break
        x = x_new
    return x


def xm_sensitivities(r: ReducedParams) -> tuple[float, float]:
    """Closed-form partial derivatives ``(dX_m/dtheta, dX_m/dL)``."""
    xm = find_Xm(r)
    if xm is None:
        raise DomainError(f"no interior minimizer: L={r.L} <= L_d({r.theta})")
    denom = 0.75 * (r.theta - xm) ** -2.5 - 2.0 * r.L
    return 0.75 * (r.theta - xm) ** -2.5 / denom, 2.0 * xm / denom


def _near(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * abs(b)


def classify(r: ReducedParams, tol: float = DEFAULT_TOL) -> Region:
    """Locate ``(theta, L)`` among the seven strata of the phase diagram.

    Curve membership uses relative tolerance ``tol`` on ``L`` (and on theta for
    the triple point); ``tol=0`` gives open-region semantics.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    theta, L = r.theta, r.L
    ts = theta_star(r.alpha)
    if _near(theta, ts, tol):
        l_star = curve_L01(ts)
        if _near(L, l_star, tol):
            return Region.TriplePoint
    if theta <= ts:
        l01 = curve_L01(theta)
        if _near(L, l01, tol):
            return Region.Gamma01
        return Region.D0 if L < l01 else Region.D1
    l02 = curve_L02(theta, r.alpha)
    if _near(L, l02, tol):
        return Region.Gamma02
    if L < l02:
        return Region.D0
    l12 = curve_L12(theta, r.alpha)
    if _near(L, l12, tol):
        return Region.Gamma12
    return Region.D2 if L < l12 else Region.D1


def minimize_aux(r: ReducedParams, tol: float = DEFAULT_TOL) -> MinimizerResult:
    """Global minimizers of ``f`` on ``[0, max(theta_tilde, 0)]``.

    The argmin is read off the region, not searched for numerically.  Ties
    list zero first.
    """
    region = classify(r, tol)
    xm = find_Xm(r)
    x_bar = min(r.d_upper, xm) if xm is not None else None

    if region is Region.D0 or r.theta_tilde <= 0.0:
        res = MinimizerResult(region, (0.0,), 0.0, None, x_bar)
    elif region is Region.D1 or region is Region.Gamma01:
        # X_m < theta_tilde here; the min() guards rounding right at Gamma12
        K = x_bar if x_bar is not None else r.d_upper
        fk = f_value(K, r)
        if region is Region.Gamma01:
            res = MinimizerResult(region, (0.0, K), 0.0, INTERIOR, x_bar)
        else:
            res = MinimizerResult(region, (K,), fk, INTERIOR, x_bar)
    else:
        K = r.theta_tilde
        if region.is_tie:
            res = MinimizerResult(region, (0.0, K), 0.0, BOUNDARY, x_bar)
        else:
            res = MinimizerResult(region, (K,), f_value(K, r), BOUNDARY, x_bar)

    if DEBUG_CHECK:
        _grid_check(r, res)
    return res


def _grid_check(r: ReducedParams, res: MinimizerResult, n: int = 200) -> None:
    if r.d_upper == 0.0:
        return
    xs = np.linspace(0.0, r.d_upper, n)
    fmin = min(f_value(float(x), r) for x in xs)
    if res.f_at_argmin > fmin + 1e-9 * max(1.0, abs(fmin)):
        log.warning("grid beats closed form at %s: %g < %g", r, fmin, res.f_at_argmin)
        raise AssertionError(f"grid value {fmin} below f_at_argmin {res.f_at_argmin}")


def interior_local_max(r: ReducedParams) -> Optional[float]:
    """The root of ``f'`` in ``(0, 2 theta/5)`` when ``L > L_d``.  Test helper."""
    if r.L <= curve_Ld(r.theta):
        return None
    lo, hi = r.theta * 1e-300, 0.4 * r.theta
    if f_prime(hi, r) >= 0.0:
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f_prime(mid, r) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * r.theta:
            break
    return 0.5 * (lo + hi)

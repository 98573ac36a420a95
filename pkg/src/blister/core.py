"""Model parameters, the reduced-variable map, the auxiliary function and the
boundary curves of the (theta, L) phase diagram.

Physical inputs are ``(alpha, theta_bar, L_bar)``; the delamination cost is
fixed to one.  Everything downstream works in the reduced variables

    theta = theta_bar / alpha,    L = sqrt(3/2) * alpha * L_bar / (2 pi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

#: Delamination cost per unit length.  Absorbed by the rescaling, never configured.
GAMMA = 1.0

#: L_bar = LENGTH_FACTOR * L / alpha, and E = LENGTH_FACTOR * f(K).
LENGTH_FACTOR = 2.0 * math.pi * math.sqrt(2.0 / 3.0)

DEFAULT_TOL = 1e-9


class DomainError(ValueError):
    """An argument lies outside the set where a formula is defined."""


def _check_positive(**values: float) -> None:
    for name, v in values.items():
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise DomainError(f"{name} must be a finite positive number, got {v!r}")


@dataclass(frozen=True)
class PhysicalParams:
    alpha: float
    theta_bar: float
    L_bar: float

    def __post_init__(self) -> None:
        _check_positive(alpha=self.alpha, theta_bar=self.theta_bar, L_bar=self.L_bar)


@dataclass(frozen=True)
class ReducedParams:
    """Rescaled parameters.  ``theta_tilde`` and ``d_upper`` are derived."""

    alpha: float
    theta: float
    L: float
    theta_tilde: float = field(init=False)
    d_upper: float = field(init=False)

    def __post_init__(self) -> None:
        _check_positive(alpha=self.alpha, theta=self.theta, L=self.L)
        tt = self.theta - self.alpha**2 / self.L**2
        object.__setattr__(self, "theta_tilde", tt)
        object.__setattr__(self, "d_upper", max(tt, 0.0))

    @property
    def domain(self) -> tuple[float, float]:
        """The admissible strain interval ``[0, max(theta_tilde, 0)]``."""
        return (0.0, self.d_upper)


def reduce(p: PhysicalParams) -> ReducedParams:
    return ReducedParams(
        alpha=p.alpha,
        theta=p.theta_bar / p.alpha,
        L=p.alpha * p.L_bar / LENGTH_FACTOR,
    )


def unreduce(r: ReducedParams) -> PhysicalParams:
    return PhysicalParams(
        alpha=r.alpha,
        theta_bar=r.alpha * r.theta,
        L_bar=LENGTH_FACTOR * r.L / r.alpha,
    )


# --- auxiliary function -----------------------------------------------------

def f_value(X: float, r: ReducedParams) -> float:
    """Auxiliary energy ``(theta - X)^(-1/2) - L X^2``, with ``f(0) = 0``.

    The value at zero is a separate branch: ``f`` jumps at the origin.
    """
    if X == 0.0:
        return 0.0
    if not (0.0 < X < r.theta):
        raise DomainError(f"f is defined on [0, theta={r.theta}), got X={X}")
    return (r.theta - X) ** -0.5 - r.L * X * X


def _check_open(X: float, r: ReducedParams) -> None:
    if not (0.0 < X < r.theta):
        raise DomainError(f"derivative defined on (0, theta={r.theta}), got X={X}")


def f_prime(X: float, r: ReducedParams) -> float:
    _check_open(X, r)
    return 0.5 * (r.theta - X) ** -1.5 - 2.0 * r.L * X


def f_second(X: float, r: ReducedParams) -> float:
    _check_open(X, r)
    return 0.75 * (r.theta - X) ** -2.5 - 2.0 * r.L


# --- phase-diagram curves ---------------------------------------------------
# theta**-2.5 overflows to +inf for tiny theta; that is left to propagate.

def theta_star(alpha: float) -> float:
    """Abscissa of the triple point."""
    _check_positive(alpha=alpha)
    return 1.25 / math.sqrt(alpha)


def curve_Ld(theta: float) -> float:
    """Tangency threshold: above it ``f`` has an interior local minimum."""
    _check_positive(theta=theta)
    return 25.0 / 24.0 * math.sqrt(5.0 / 3.0) * _pow(theta, -2.5)


def curve_L01(theta: float) -> float:
    """Trivial/blister boundary (used for theta <= theta_star)."""
    _check_positive(theta=theta)
    return 5.0**2.5 / 16.0 * _pow(theta, -2.5)


def _check_right_branch(theta: float, alpha: float) -> None:
    _check_positive(theta=theta, alpha=alpha)
    if theta < theta_star(alpha):
        raise DomainError(
            f"curve only defined for theta >= theta_star={theta_star(alpha)}, got {theta}"
        )


def curve_L02(theta: float, alpha: float) -> float:
    """Trivial/fully-delaminated boundary (theta >= theta_star)."""
    _check_right_branch(theta, alpha)
    return alpha**1.25 / math.sqrt(math.sqrt(alpha) * theta - 1.0)


def curve_L12(theta: float, alpha: float) -> float:
    """Blister/fully-delaminated boundary (theta >= theta_star)."""
    _check_right_branch(theta, alpha)
    return math.sqrt(
        2.0 * alpha**3 * theta
        + 2.0 * alpha**2 * math.sqrt(alpha * (alpha * theta * theta - 1.0))
    )


def _pow(x: float, e: float) -> float:
    try:
        return x**e
    except OverflowError:
        return math.inf

"""Variational model of a thin film blister on a compressed substrate."""
from .core import (
    DEFAULT_TOL,
    GAMMA,
    LENGTH_FACTOR,
    DomainError,
    PhysicalParams,
    ReducedParams,
    curve_L01,
    curve_L02,
    curve_L12,
    curve_Ld,
    f_prime,
    f_second,
    f_value,
    reduce,
    theta_star,
    unreduce,
)
from .classifier import MinimizerResult, Region, classify, find_Xm, minimize_aux
from .profile import (
    BlisterProfile,
    build_profile,
    closed_form_energy,
    eval_profile,
    global_profiles,
    profile_energy_quadrature,
    smallest_blister,
)

__version__ = "0.1.0"

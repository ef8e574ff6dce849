"""Hyperbolic numbers, hyperbolic-valued metrics and fixed-point solvers."""

from .errors import *  # noqa: F401,F403
from .hypnum import (
    BC, E1, E2, K, ONE, ZERO, Cone, ConeClass, Hyp, OrderRel, classify_cone,
    from_canonical, hyp_mod, inf_set, inv, partial_cmp, precedes, strictly_precedes,
    sup_set, to_canonical,
)
from .dmetric import (
    CANONICAL, HYPMOD, REAL_LINE, DBall, DInterval, DMetric, ball_mask, ball_membership,
    check_axioms, cover_greedy, diameter, product_metric, seq_analyze, sphere_vertices,
    summable_check,
)
from .fixedpoint import (
    ContractionReport, Grid, MapSpec, solve_banach, solve_contractive_compact,
    solve_inexact, solve_power,
)
from .funcspace import (
    SampledFunction, continuity_modulus, evt_extrema, sigma_sup, uniform_limit_check,
)

__version__ = "0.1.0"

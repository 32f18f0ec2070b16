"""Rational approximation of groups of commuting real matrices (MCRS-groups).

The main entry points are :func:`best_approx` for plane groups,
:func:`best_simul` for simultaneous approximation in dimension three,
and :func:`k_sail` / :func:`geometric_cf` for lattice sails.
"""
from .approx2d import ApproxQuery, ApproxResult, best_approx, brute_force_best, lagrange_sweep
from .approx3d import (OrbitFamily, SimulTarget, best_simul, best_simul_records, rate_probe,
                       verify_table)
from .cf import best_dioph_in_box, cf_expand
from .mcrs import MCRSGroup, NotRegular, discrepancy, group_from_matrix, md_form, size
from .numeric import BallReal, PrecisionExhausted, QuadraticSurd, set_precision
from .sails2d import Cone2, DegenerateCone, geometric_cf, k_sail

__version__ = "0.1.0"

__all__ = [
    "ApproxQuery", "ApproxResult", "BallReal", "Cone2", "DegenerateCone", "MCRSGroup",
    "NotRegular", "OrbitFamily", "PrecisionExhausted", "QuadraticSurd", "SimulTarget",
    "best_approx", "best_dioph_in_box", "best_simul", "best_simul_records", "brute_force_best",
    "cf_expand", "discrepancy", "geometric_cf", "group_from_matrix", "k_sail", "lagrange_sweep",
    "md_form", "rate_probe", "set_precision", "size", "verify_table",
]

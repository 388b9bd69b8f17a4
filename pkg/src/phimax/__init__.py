"""Attractors of iterated function systems of phi-max-contractions.

Two independent fixed-point routes are provided and cross-checked: the
Hutchinson operator on finite point sets, and the code-space operator on
cylinder functions of infinite words.
"""
from .comparison import ComparisonFunction, certify
from .engines import (
    CodeFunction,
    canonical_projection,
    code_fixed_point,
    code_iterate,
    code_step,
    hutchinson_attractor,
    hutchinson_step,
    open_problem_experiment,
    picard,
    project,
    verify_conjugacy,
)
from .geometry import PointSet, directed_distance, distance, hausdorff, within_expansion
from .ifs import (
    Affine,
    Box,
    ConvexCoefficients,
    IfsSystem,
    PairSampler,
    Poly1d,
    apply,
    apply_word,
    check_convex,
    check_phi_max,
    check_piifs_conditions,
    system_from_dict,
    to_phi_max,
)
from .shiftspace import PeriodicWord, parse_word, periodic

__version__ = "0.1.0"

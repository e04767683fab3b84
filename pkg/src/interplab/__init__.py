"""Numerical complex interpolation of finite-dimensional Banach couples."""

from .banach import (Couple, NormedSpace, cap2_norm, custom_space, dual_norm_eval, lp_space,
                     norm_eval, sum2_norm)
from .config import ExperimentConfig, load_config
from .daher import daher_map, gamma, mazur_map, modulus_experiment, round_trip_error, sphere_defect
from .duality import dual_couple, duality_gap, g_function, max_modulus_pairing, minus_norm
from .hardy import PeriodicFunction, fourier_extract, pf_eval, pf_h2_norm
from .james import build_james_vectors, james_norm_checks, modulation_blowup
from .kadets import cs_constant, divide_vanishing, kadets_bound, perturb_kernel
from .optim import SolveReport, SolverOptions
from .sequences import StructuredCouple, TruncSeq, make_structure, seq_norm, structured_couple
from .solver import Decomposition, dual_certificate, interp_norm, interp_norm_grid, scalar_quadratic_norm

__version__ = "0.1.0"

__all__ = [
    "Couple", "NormedSpace", "cap2_norm", "custom_space", "dual_norm_eval", "lp_space", "norm_eval",
    "sum2_norm", "ExperimentConfig", "load_config", "daher_map", "gamma", "mazur_map",
    "modulus_experiment", "round_trip_error", "sphere_defect", "dual_couple", "duality_gap",
    "g_function", "max_modulus_pairing", "minus_norm", "PeriodicFunction", "fourier_extract",
    "pf_eval", "pf_h2_norm", "build_james_vectors", "james_norm_checks", "modulation_blowup",
    "cs_constant", "divide_vanishing", "kadets_bound", "perturb_kernel", "SolveReport",
    "SolverOptions", "StructuredCouple", "TruncSeq", "make_structure", "seq_norm",
    "structured_couple", "Decomposition", "dual_certificate", "interp_norm", "interp_norm_grid",
    "scalar_quadratic_norm",
]

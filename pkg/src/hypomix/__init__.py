"""Hypocoercivity certificates and mixing-time bounds for Lindblad semigroups."""

from ._kernels import BACKEND
from .certifier import HypoCertificate, bound_from_constants, certify, optimize_alpha
from .dynamics import empirical_mixing_time, heisenberg_decay, schrodinger_decay
from .gns import GnsFrame, SuperOpMatrix, build_frame, gns_inner
from .lindblad import LindbladModel, exact_spectrum, model_from_json, stationary_state
from .models import RECIPES, build_recipe
from .pauli import PauliString, PauliSum

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "GnsFrame", "HypoCertificate", "LindbladModel", "PauliString", "PauliSum",
    "RECIPES", "SuperOpMatrix", "bound_from_constants", "build_frame", "build_recipe",
    "certify", "empirical_mixing_time", "exact_spectrum", "gns_inner", "heisenberg_decay",
    "model_from_json", "optimize_alpha", "schrodinger_decay", "stationary_state",
]

"""Variable Bregman majorization-minimization with a Dirichlet MLE application."""

from . import baselines, bregman, dirichlet, harness, specfun
from .baselines import minka_fixed_point, newton_dirichlet
from .bregman import SolverConfig, vbmm_run
from .dirichlet import SampleSet, fit_bmm, fit_vbmm, nll, sample

__version__ = "0.1.0"

__all__ = [
    "baselines", "bregman", "dirichlet", "harness", "specfun",
    "SolverConfig", "vbmm_run",
    "SampleSet", "sample", "nll", "fit_vbmm", "fit_bmm",
    "newton_dirichlet", "minka_fixed_point",
]

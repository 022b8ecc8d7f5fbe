"""Homogenized spectra of two sheets joined by many thin tubes."""

from .base import Spectrum, box_dirichlet_spectrum, fd_dirichlet_spectrum, sphere_volume
from .errors import (ConvergenceFailure, GeometryError, InadmissibleLaw, InsufficientBase, MissingQ,
                     PoleProximity, ResolutionTooCoarse, TubeHomogError, UncoveredRegime)
from .limits import LimitQueryResult, eigenvalue_limit, homogenized_spectrum, threshold_index
from .pencil import (PencilParams, PencilSpectrum, branch_root, pencil_block, pencil_spectrum,
                     tube_coefficients)
from .regimes import (Coupled, DecoupledThreshold, Pencil, RegimeLimits, ScaledLaplacian, ScalingLaw,
                      classify, coupling_constant, limits_from_law, phase_point)
from .simulator import (ConvergenceReport, DiscreteModel, ModelConfig, assemble, convergence_study,
                        sheet_symmetry_indicator, smallest_eigenpairs)

__version__ = "0.1.0"

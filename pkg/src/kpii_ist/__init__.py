"""Numerical inverse scattering for the KP-II equation and its long-time asymptotics.

Scattering data from small initial data, reconstruction through the Cauchy
integral eigenfunction equation, the leading-order stationary-phase formula
and an independent pseudo-spectral solver, all on one set of lattice types.
"""

__version__ = "0.1.0"

from .kernels import BACKEND  # noqa: E402
from .errors import *  # noqa: E402,F401,F403
from .lattice import ComplexField2D, Lattice2D, Space  # noqa: E402
from .coordinates import (  # noqa: E402
    PhasePoint, SpectralParam, area_weight, grad_S0, phase_S0, primed_shift, xi_from_zeta, zeta_from_xi,
)
from .oscillatory import (  # noqa: E402
    AiryEval, airy, airy_propagator, cubic_phase_integral, stationary_phase_leading,
)
from .forward import (  # noqa: E402
    InitialData, apply_green, born_grid, build_scattering_grid, green_symbol, scattering_value, solve_m0,
    weighted_norm,
)
from .scattering import ScatteringGrid  # noqa: E402
from .inverse import ReconstructionValue, apply_C, apply_T, dx1_m, neumann_m  # noqa: E402
from .reconstruct import reconstruct_u  # noqa: E402
from .asymptotics import (  # noqa: E402
    ConeFrame, CutoffSpec, DecayFit, Regime, cone_frame, decay_fit, leading_order, ray_point, stationary_points,
    u1_direct, u1_split,
)
from .representation import (  # noqa: E402
    KernelField, amplitude_F, build_mfrak0, ct1_crosscheck, ct1_representation,
)
from .direct import EvolutionState, dispersion_symbol, evolve, linear_evolve, nonlinear_term  # noqa: E402
from .io import load_grid, load_scattering, save_grid, save_scattering  # noqa: E402
from .config import ExperimentConfig, load_config, parse_config  # noqa: E402
from .pipeline import ComparisonReport, run_compare, run_forward  # noqa: E402

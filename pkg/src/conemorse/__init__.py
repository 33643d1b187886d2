"""Morse indices of radial Lane-Emden solutions in spherical sectors and cones."""
from .bubble import (LimitTable, bubble_potential, bubble_residual, bubble_value, eta_residual,
                     eta_rayleigh_quotient, eta_value, limit_study, q_u_on_bubble,
                     step1_test_function_form)
from .cap import (CapSpectrum, angular_mode, angular_shoot, cap_neumann_eigenvalues,
                  dense_oracle_cap, load_spectrum, multiplicity)
from .errors import (BoundViolationError, BracketError, ConeMorseError, CutoffError,
                     InvalidParameterError, NoFirstZeroError, NoSignChangeError,
                     SpectrumFormatError, StepSizeUnderflowError)
from .morse import (MorseReport, ThresholdResult, bubble_morse, morse_index_direct,
                    morse_index_formula, symmetry_breaking_threshold, verify_count_equality)
from .radial import (LinearizedPotential, RadialSolution, critical_exponent, integrate_radial,
                     linearized_potential, solve_lane_emden)
from .singular import (SingularSpectrum, dense_oracle_singular, dense_oracle_standard,
                       hardy_quotient, indicial_exponent, negative_singular_eigenvalues,
                       shoot_singular, standard_radial_eigenvalues)

__version__ = "0.1.0"

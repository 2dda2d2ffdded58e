"""Linear response of a collisionless plasma: causal solutions of the linearized
Vlasov equation, the limiting-absorption conductivity symbol, and the Hilbert
transform machinery behind it."""

__version__ = "0.1.0"

from .causal import (CausalSolution, causal_f, current_j, current_j_points, current_j_profile,
                     initial_condition_f0, nu_sweep_f, probe_lattice, residual_Lnu)
from .conductivity import (ConductivitySymbol, CutoffFunction, apply_multiplier, limiting_symbol,
                           make_cutoff, multiplier_pairing, regularized_symbol, remainder_pairing,
                           symbol_convergence_sweep, symbol_sigma_nu, symbol_sigma_ph)
from .errors import (DomainError, InvalidParameterError, QuadratureError, TruncationWarning,
                     UnsupportedSpectrumError)
from .hilbert import (HilbertTable, PvIntegrandSpec, dawson, hilbert, hilbert_l2_ratio,
                      hilbert_symbol_check)
from .kinetics import (EquilibriumDistribution, FieldPerturbation, PlasmaSpecies, SpaceTimeGrid,
                       characteristic_integral, eval_field, gaussian_packet, make_maxwellian,
                       modulated_packet, spectrum_field, superpose, velocity_window)
from .model_problem import (ScalarSource, causal_u, fourier_identity_check, model_nu_sweep,
                            uniqueness_probe)
from .quadrature import QuadratureSpec, gauss_kronrod, gauss_legendre_panels

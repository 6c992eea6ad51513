"""vacmix: quantum vacuum radiation from multi-frequency modulated dispersive media."""
from .errors import (BranchSolveError, CausticSingularity, ConfigError, DegenerateBranches, DegenerateProfile,
                     InvalidProcess, OrderTooLarge, PoleAtResonance, QuadratureNotConverged, VacmixError,
                     WronskianSingular)
from .medium import (FS_TO_UM, POLE_TOL, MediumSpec, Resonance, delta_epsilon, delta_n, dispersion_D,
                     eps_for_delta_n, fused_silica, n_squared, refractive_index)
from .branches import (BranchPoint, BranchTable, branch_frequencies, build_branch_table, hopfield_C,
                       hopfield_C_derivative, projection_P, single_resonance_closed_form, solve_branches)
from .modulation import (ModulationSpec, f_spectrum_per_volume, f_time, tau_from_field_fwhm_fs, tau_from_fs,
                         tau_from_intensity_fwhm_fs)
from .propagators import (delta0, delta1_reduced, delta2_reduced, exact_green_oracle, green_closed_form,
                          green_series, inner_integral, sigma_projected_onshell, sigma_terms)
from .amplitudes import (PairAmplitude, Peak, Spectrum, emission_rate_per_angle, find_spectrum_peaks, g_inter,
                         g_intra, k_grid_for_wavelengths, mixing_integral, resonance_conditions, spectrum)
from .fiber import FiberSpec, fiber_alpha, fiber_branches, fiber_dispersion, hermite_gaussian_mode, mode_overlap
from .config import RunConfig, dump_config, load_config

__version__ = "1.0.0"

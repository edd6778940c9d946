"""Taylor, reduced-variable and asymptotic series for short-time propagation."""

from .asymptotic import (AsymptoticSeries, asymptotic_eval_optimal, borel_coefficient, borel_resum,
                         c1_branch, c2_branch, log_borel_coefficient, pade_exact, xi4_asymptotic_series)
from .fields import ChannelField, ComplexField, TimePowerSeries
from .reduced import (PotentialTerm, ReducedPotential, channel_operator, laurent_channels, log_profile,
                      physical_coords, reduced_coords, reduced_potential_terms, reduced_residual,
                      s_ode_residual, te_reduced_terms)
from .taylor import HamiltonianSpec, te_coefficients_grid, te_partial_sum

__all__ = [
    "AsymptoticSeries", "ChannelField", "ComplexField", "HamiltonianSpec", "PotentialTerm",
    "ReducedPotential", "TimePowerSeries", "asymptotic_eval_optimal", "borel_coefficient",
    "borel_resum", "c1_branch", "c2_branch", "channel_operator", "laurent_channels",
    "log_borel_coefficient", "log_profile", "pade_exact", "physical_coords", "reduced_coords",
    "reduced_potential_terms", "reduced_residual", "s_ode_residual", "te_coefficients_grid",
    "te_partial_sum", "te_reduced_terms", "xi4_asymptotic_series",
]

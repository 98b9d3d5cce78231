# Copyright 2024 The freeconv developers.
#
# This file is part of freeconv.
#
# freeconv is free software: you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by the
# Free Software Foundation, version 3.
#
# freeconv is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU
# General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
"""Free probability convolution engine"""

from ._errors import (
    DiagnosticFailure, DuplicateAtom, EvaluationOnSingularity, FreeConvError,
    HeavyTail, MonotonicityViolation, NoConvergence, NonCenteredInput,
    NonConvergent, NonMonotoneGrid, NonUnitMass, NotDefined, NumericalError,
    ParameterError, RegimeError, ResidualTooLarge, ScanInconclusive,
    SchemaError, ValidationError, WindowTooSmall, ZeroCauchyTransform
)
from ._measure import (
    Arcsine, Cauchy, DensityTable, MarchenkoPastur, Measure, MomentVector,
    Semicircle, Tabulated, build_measure, eval_E, eval_F, eval_G,
    mean_variance, moments, stieltjes_invert
)
from ._subordination import (
    BrownianH, ContinuedPowerH, HFunction, PowerH, SubordinationSolution,
    VPlusInterval,
    boundary_heights, boundary_intervals, f_p, mass_ratio, omega_p, psi_p,
    solve_boundary, solve_subordination, v_plus
)
from ._params import BpqParams
from ._regularity import (
    AtomCertificate, AtomRecord, ComponentReport, InfDivReport,
    component_count, divisibility_bracket, f_mu_limit, find_atoms,
    infdiv_diagnostics, monotonicity_report
)
from ._convolution import (
    PoissonSeed, SpectralResult, SubordinatedMeasure, b_t, boolean_power,
    bpq, bpq_reciprocal, compound_free_poisson, free_brownian, free_power,
    free_power_sub_one, phi_bpq, phi_map
)
from ._oracle import (
    CumulantVector, MomentReport, boolean_cumulants_to_moments, compare,
    free_cumulants_to_moments, moments_to_boolean_cumulants,
    moments_to_free_cumulants, predict_moments_bpq
)

__version__ = '0.1.0'

__all__ = [
    'FreeConvError', 'ValidationError', 'NumericalError', 'NonUnitMass',
    'DuplicateAtom', 'NonMonotoneGrid', 'SchemaError', 'NonCenteredInput',
    'HeavyTail', 'RegimeError', 'ParameterError', 'EvaluationOnSingularity',
    'ZeroCauchyTransform', 'NonConvergent', 'ResidualTooLarge',
    'NoConvergence', 'WindowTooSmall', 'NotDefined', 'ScanInconclusive',
    'MonotonicityViolation', 'DiagnosticFailure',
    'Measure', 'Semicircle', 'MarchenkoPastur', 'Cauchy', 'Arcsine',
    'Tabulated', 'build_measure', 'eval_G', 'eval_F', 'eval_E', 'moments',
    'mean_variance', 'MomentVector', 'DensityTable', 'stieltjes_invert',
    'HFunction', 'PowerH', 'ContinuedPowerH', 'BrownianH', 'mass_ratio',
    'f_p', 'psi_p', 'omega_p', 'v_plus', 'VPlusInterval',
    'SubordinationSolution', 'solve_boundary', 'solve_subordination',
    'boundary_heights', 'boundary_intervals',
    'BpqParams', 'AtomCertificate', 'AtomRecord', 'ComponentReport',
    'InfDivReport', 'f_mu_limit', 'find_atoms', 'component_count',
    'monotonicity_report', 'infdiv_diagnostics', 'divisibility_bracket',
    'SpectralResult', 'SubordinatedMeasure', 'PoissonSeed', 'free_power',
    'boolean_power', 'bpq', 'b_t', 'bpq_reciprocal', 'phi_bpq',
    'free_brownian', 'phi_map', 'compound_free_poisson',
    'free_power_sub_one',
    'CumulantVector', 'MomentReport', 'moments_to_free_cumulants',
    'free_cumulants_to_moments', 'moments_to_boolean_cumulants',
    'boolean_cumulants_to_moments', 'predict_moments_bpq', 'compare',
]

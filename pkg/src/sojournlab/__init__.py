"""Numerical laboratory for sojourn relations and Schrodinger wavefronts.

Modules
-------
geometry   asymptotically Euclidean metric and potential families
flow       Hamiltonian geodesic flow with variational (derivative) data
sojourn    sojourn points, extrapolated limits, contact-property checks
evolve     spectral Schrodinger propagation, gauges, parametrix phases
microlocal Gabor wavefront detectors and the propagation round trip
presets    named initial-data profiles shared by the CLI and the tests
cli        command-line front end
"""

from .evolve import (EvolveConfig, Field, euclid_kernel, field_to_csv,
                     free_propagate, gauge, load_field, parametrix_phase,
                     phase_extraction, save_field, smooth_window,
                     smooth_window_axis, split_step)
from .flow import (AccuracyError, GeodesicPath, IntegrationError,
                   IntegratorConfig, OutsideShootingDomainError, PhasePoint,
                   eikonal_residual, flow, geodesic_distance,
                   nontrapping_check, unit_speed, variational_flow)
from .geometry import (Bump, GeometryDomainError, MetricSpec, PotentialSpec,
                       christoffel, hamiltonian, metric_derivative,
                       metric_inverse, metric_tensor, potential_value)
from .microlocal import (GaborConfig, PropagationScenario, WavefrontReport,
                         detect_qscwf, detect_scwf, detect_wf,
                         propagation_check, qsc_resample, wf1_shift_check,
                         wf2_check)
from .presets import PRESETS, airy_exact_t1, make_preset
from .sojourn import (AsymptoticModelError, EscapeNotCertifiedError,
                      ExtrapolationConfig, SojournPoint, contact_check,
                      neville_to_zero, sojourn_backward, sojourn_forward,
                      sojourn_long_range)

__version__ = "0.1.0"

"""Polar periodic orbits of the spatial lunar problem.

Constructs, continues, and analyzes the near-polar family of symmetric
periodic orbits in Hill's lunar problem and the restricted three-body
problem, using collision regularization, symmetric shooting, two-parameter
continuation, and monodromy-based bifurcation detection.
"""

from .frames import (Frame, FrameTag, PhaseState, EnergyValue, CollisionError,
                     ParameterError, eval_energy, vector_field,
                     variational_field, to_moon_centered, to_barycentric,
                     rescale_hill, unscale_hill, to_physical_km,
                     hill_critical_value, hill_critical_points)
from .jordan import (jordan_mul, jordan_conj, jordan_inv, jordan_associator,
                     JORDAN_ONE)
from .belbruno import belbruno_forward, belbruno_inverse, DomainError
from .gamma import Chart, RegState, gamma_value, gamma_field, involution
from .moser import (MoserState, moser_chart_to_sphere, moser_sphere_to_chart,
                    constrained_vector_field)
from .integrator import (IntegratorConfig, TrajectorySample, integrate,
                         integrate_with_variational, integrate_to_section)
from .orbit import (SectionPoint, OrbitRecord, amplitude, collision_period,
                    collision_seed, solve_Q3, find_polar_orbit, dense_orbit)
from .continuation import (StepConfig, ContinuationRun, BifurcationEvent,
                           EventKind, continue_in_h, continue_in_mu,
                           detect_events, hill_orbit)
from .stability import (MonodromySpectrum, StabilityClass, monodromy,
                        reduce_spectrum, classify, spectrum_of_record,
                        rotating_kepler_degeneracies)

__version__ = "0.1.0"

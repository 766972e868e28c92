"""Design and simulation toolkit for complex-Laplacian formation maneuvering.

Synthesizes interaction weights and motion parameters that drive a planar
multi-agent formation to a desired shape while translating, rotating and/or
scaling, verifies the spectral guarantees, and simulates the closed loop.
"""

from .errors import (ChainBroken, DegenerateShape, DegenerateWeights, Diverged,
                     ExpansionIllConditioned, FormationError, GraphDisconnected,
                     InfeasibleRow, NonDiagonalizable, NotConverged,
                     PipelineFailed, ScenarioError, SingularGain,
                     SpectrumMismatch, StabilizationFailed, ZeroEdgeVector,
                     ZeroState)
from .graphs import (FormationGraph, TwoRootedReport, incidence_matrix,
                     is_connected, is_two_rooted)
from .motion import (ModifiedLaplacian, MotionMatrices, MotionSpec,
                     combined_motion_matrix, compile_motion, modified_laplacian,
                     motion_matrix, motion_parameters, velocity_field)
from .scenarios import (SCENARIO_NAMES, Scenario, ScenarioResult,
                        builtin_scenario, load_scenario, run_scenario,
                        scenario_from_dict, simulate_scenario)
from .shapes import (LaplacianBundle, ReferenceShape, WeightSet,
                     build_laplacian, center_shape, stabilize_gains,
                     synthesize_weights)
from .sim import (HeadingControl, MotionEstimate, SimConfig, Trajectory,
                  exact_trajectory, initial_condition, integrate,
                  measure_motion, shape_error, shape_error_series,
                  shape_projector)
from .spectral import (DesignResult, JordanReport, SpectralReport,
                       StabilityAnalysis, SteadyStatePrediction,
                       design_pipeline, gain_boost, predict_steady_state,
                       stability_bound, verify_motion_spectrum,
                       verify_translation_jordan)

__version__ = "0.1.0"

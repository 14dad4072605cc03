"""Axially symmetric volume preserving mean curvature flow between two
parallel planes, with diagnostics for the first singularity."""

from .errors import (AxisContact, ConfigError, EmptyWindow, InsufficientBlowupData,
                     InsufficientHistory, NoInteriorMinimum, OddIntervalCount, TrackingLost,
                     VPMCFError)
from .flow import (FlowConfig, FlowState, Mode, Status, Trajectory, adaptive_dt,
                   initial_state, run, step)
from .operators import QUANTITIES, evolution_residual, surface_laplacian
from .profile import (CurvatureField, GridSpec, RadialProfile, averaged_mean_curvature,
                      curvature_fields, derivatives, enclosed_volume, surface_area)
from .singularity import (BlowupFit, RegionMask, TemplateFit, auto_center_alpha,
                          classify_regions, fit_blowup_rate, fit_templates, fit_type1,
                          rescale)
from .sturm import (NeckTracking, ZeroCensus, monotonicity_report, neck_convergence,
                    sign_change_count, zero_census)

__version__ = "0.1.0"

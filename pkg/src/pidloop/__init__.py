"""PID control of a differential-drive robot with numerically approximated
integral (composite Simpson) and derivative (backward difference) terms."""

from ._backend import BACKEND
from .control import Gains, OutOfDomainError, ReferenceSignal, error_at, pid_output
from .numerics import (
    SampledSignal,
    backward_diff_2pt,
    backward_diff_3pt,
    differentiate_latest,
    integrate_history,
    simpson_composite,
    trapezoid_last,
)
from .plant import DiffDriveParams, Pose, WheelRates, body_rates, step_1d, step_pose
from .simloop import (
    Classification,
    IntegralMode,
    ResponseMetrics,
    SimConfig,
    Trajectory,
    compute_metrics,
    gain_sweep,
    simulate,
)

__version__ = "0.1.0"

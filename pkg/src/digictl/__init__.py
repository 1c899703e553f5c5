"""Frequency-domain synthesis and analysis of sampled SISO controllers."""

from .designer import (
    ControllerDesign,
    DesignGoal,
    design,
    design_lag,
    design_lead,
    design_pi,
    design_pid,
    find_lag_crossover,
)
from .freqresp import StabilityMargins, bode_sweep, margins, response_at
from .polytf import Domain, Polynomial, TransferFunction, dc_gain, evaluate, roots, series, unity_feedback
from .simkit import LoopConfig, StepMetrics, closed_loop, simulate_step, step_metrics
from .xform import (
    FirstOrderWController,
    bilinear_w_to_z,
    bilinear_z_to_w,
    realize_first_order,
    unwarp_frequency,
    warp_frequency,
    zoh_discretize,
)

__version__ = "0.1.0"

"""Event-driven spiking network for 2-D motion direction readout."""

from .core import (
    ConfigError,
    DIRECTION_ORDER,
    Direction,
    DomainError,
    Event,
    EventStream,
    LifParams,
    MotionSnnError,
    NumericFault,
    RateSeries,
    Role,
    Sign,
    SpikeRecord,
    Synapse,
    SynapseDevice,
)
from .topology import (
    CellLayout,
    NetworkGraph,
    NetworkParams,
    assemble_network,
    build_unit_cell,
    layout_from_centers,
    tessellate,
)
from .stimulus import (
    CircleTrajectory,
    EightTrajectory,
    EmitMode,
    LinearTrajectory,
    Trajectory,
    WaypointTrajectory,
    generate_events,
)
from .engine import SimulationOutput, simulate
from .analysis import (
    AccuracyScore,
    FilterParams,
    RateGrid,
    accuracy,
    calibrate_f_max,
    dominant_frequency,
    firing_rate,
    ideal_rates,
    phase_lag_deg,
    pool_group,
)
from .config import RunConfig
from .experiment import (
    ExperimentResult,
    RunEvaluation,
    SweepVariant,
    evaluate,
    frequency_sweep,
    run_experiment,
    spectral_summary,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyScore",
    "CellLayout",
    "CircleTrajectory",
    "ConfigError",
    "DIRECTION_ORDER",
    "Direction",
    "DomainError",
    "EightTrajectory",
    "EmitMode",
    "Event",
    "EventStream",
    "ExperimentResult",
    "FilterParams",
    "LifParams",
    "LinearTrajectory",
    "MotionSnnError",
    "NetworkGraph",
    "NetworkParams",
    "NumericFault",
    "RateGrid",
    "RateSeries",
    "Role",
    "RunConfig",
    "RunEvaluation",
    "Sign",
    "SimulationOutput",
    "SpikeRecord",
    "SweepVariant",
    "Synapse",
    "SynapseDevice",
    "Trajectory",
    "WaypointTrajectory",
    "accuracy",
    "assemble_network",
    "build_unit_cell",
    "calibrate_f_max",
    "dominant_frequency",
    "evaluate",
    "firing_rate",
    "frequency_sweep",
    "generate_events",
    "ideal_rates",
    "layout_from_centers",
    "phase_lag_deg",
    "pool_group",
    "run_experiment",
    "simulate",
    "spectral_summary",
    "tessellate",
    "__version__",
]

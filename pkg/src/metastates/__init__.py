"""Digital worker state engine.

Classifies per-worker psychophysiological state values into ranges and
statuses, aggregates them into a traffic-light performance index, evaluates
per-worker reaction rules onto animation channels, and drives deterministic
scenario simulations behind a streaming session service.
"""
from __future__ import annotations

from .calibration import (BaselineDataset, CalibrationConfig, calibrate,
                          interpolated_quantile, merge_calibration)
from .errors import (DegenerateDistribution, Diagnostic, EmptyStatuses,
                     IncompleteVector, InsufficientData, InvalidSample,
                     InvalidState, MetaStatesError, MigrationRequired,
                     NotFound, ParseError, UnknownKind, ValidationFailed)
from .ingest import RawSample, SampleHold, StreamSmoother, load_stream
from .mpi import MpiColor, MpiSnapshot, aggregate_mpi, mpi_snapshot
from .profiles import (KindProfile, WorkerProfile, default_profile,
                       load_profile_file, profile_from_dict, profile_to_dict,
                       save_profile_file, validate_profile)
from .reactions import (DefaultAnimations, ReactionChannel, ReactionEvent,
                        ReactionRule, evaluate_mrm, validate_rules)
from .scenario import (Scenario, TaskSpec, TaskStep, load_scenario_file,
                       save_scenario_file, scenario_from_dict,
                       scenario_to_dict, scenario_value, validate_scenario)
from .simulation import (BreakPolicy, DEFAULT_PERFORMANCE_MODEL,
                         PerformanceModel, SimulationEngine, TaskProgress,
                         TickFrame, audit_frame_dict, run_batch,
                         validate_performance_model)
from .states import (ATTENTION, COGNITIVE_WORKLOAD, CORE_POLARITIES,
                     DEFAULT_REGISTRY, PHYSICAL_FATIGUE, Polarity, RangeLevel,
                     STRESS, StateRegistry, StateSnapshot, StatusClass,
                     Thresholds, classify_level, classify_level_hysteresis,
                     level_to_status, snapshot)

__version__ = "0.1.0"

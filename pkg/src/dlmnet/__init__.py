"""Event-by-event simulation of quantum interference with deterministic learning machines."""

from .dlm import (
    CandidateRule,
    DlmState,
    Message,
    build_target,
    candidate_costs,
    candidate_state,
    deterministic_output,
    learn,
    select_rule,
    stochastic_output,
)
from .errors import ConfigurationError, DlmError, ValidationError
from .experiments import (
    ExperimentConfig,
    FrequencyReport,
    compare,
    run_beam_splitter,
    run_cnot_circuit,
    run_cnot_schedule,
    run_mzi,
    run_netlist,
)
from .network import (
    Network,
    OutputMode,
    Processor,
    build_beam_splitter,
    build_cnot_circuit,
    build_mzi,
    process_event,
    route,
)
from .transforms import (
    Transform,
    beam_splitter_transform,
    cnot_transform,
    embed_unitary,
    hadamard_transform,
    lift_single_qubit,
    plane_rotation,
)

__version__ = "0.1.0"

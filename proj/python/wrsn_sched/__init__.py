from ._core import (
    Divergence,
    EmbeddingParams,
    Environment,
    Error,
    GenParams,
    InfeasibleDeployment,
    ParseError,
    Point,
    ProblemInstance,
    ResourceLimit,
    ScheduleState,
    SensorNode,
    SolveResult,
    StepOutcome,
    TrainConfig,
    ValidationError,
    Variant,
    generate_instance,
    parse_variant,
    solve,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")]

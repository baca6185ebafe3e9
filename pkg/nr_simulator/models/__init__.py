"""
Pydantic models for weight laws, statistics, results and configuration
"""
from .schemas import (
    WeightModel,
    ModelKind,
    StatisticSpec,
    XiConstant,
    SpecRecord,
    ReplicationResult,
    TestReport,
    ExperimentConfig,
    parse_interval,
    format_interval,
)

__all__ = [
    "WeightModel",
    "ModelKind",
    "StatisticSpec",
    "XiConstant",
    "SpecRecord",
    "ReplicationResult",
    "TestReport",
    "ExperimentConfig",
    "parse_interval",
    "format_interval",
]

"""
Pydantic models for weight laws, statistics, configuration and results
"""
import math
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..utils.validators import validate_canonical_string


# =====================================================
# Weight law
# =====================================================

class WeightModel(BaseModel):
    """Pareto weight law: P(W > t) = (t_min/t)^beta for t >= t_min"""
    model_config = ConfigDict(frozen=True)

    family: Literal["pareto"] = Field("pareto", description="Distribution family")
    beta: float = Field(..., gt=2.0, description="Tail exponent")
    t_min: float = Field(..., gt=0.0, description="Scale, lower end of the support")
    strict: bool = Field(True, exclude=True, description="Reject parameters outside the subcritical regime")

    @property
    def mean(self) -> float:
        """E[W] in closed form"""
        return self.beta * self.t_min / (self.beta - 1.0)

    @property
    def second_moment(self) -> float:
        """E[W^2] in closed form"""
        return self.beta * self.t_min ** 2 / (self.beta - 2.0)

    @property
    def is_subcritical(self) -> bool:
        return self.second_moment < self.mean

    @model_validator(mode="after")
    def _check_regime(self):
        if self.strict and not self.is_subcritical:
            raise ValueError(self.violation())
        return self

    def violation(self) -> str:
        """The violated subcriticality inequality, spelled out"""
        return (
            f"Weight law is not subcritical: E[W^2] = {self.second_moment:.12g} >= "
            f"E[W] = {self.mean:.12g} (need t_min < (beta-2)/(beta-1) = "
            f"{(self.beta - 2.0) / (self.beta - 1.0):.12g})"
        )

    def to_key_value(self) -> str:
        """Serialize as key=value lines"""
        return f"family={self.family}\nbeta={self.beta!r}\nt_min={self.t_min!r}"

    @classmethod
    def from_key_value(cls, text: str, strict: bool = True) -> "WeightModel":
        """Parse the key=value form produced by to_key_value"""
        values: Dict[str, str] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
        return cls(
            family=values.get("family", "pareto"),
            beta=float(values["beta"]),
            t_min=float(values["t_min"]),
            strict=strict,
        )


# =====================================================
# Graph model kind
# =====================================================

class ModelKind(BaseModel):
    """Graph model: NR multigraph or one of the simple variants, with its normalizer"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["NR", "ENR", "CL", "GRG"] = "ENR"
    normalizer: Literal["Ln", "nEW"] = Field(
        "Ln", description="Ln: p_ij = W_iW_j/L_n; nEW: p'_ij = W_iW_j/(n E[W])"
    )

    @property
    def is_simple(self) -> bool:
        return self.kind != "NR"

    @property
    def label(self) -> str:
        """Short name, primed for the n E[W] normalizer (e.g. ENR')"""
        return self.kind + ("'" if self.normalizer == "nEW" else "")

    @classmethod
    def parse(cls, text: str) -> "ModelKind":
        """Parse a label such as "CL" or "GRG'" """
        text = text.strip()
        if text.endswith("'"):
            return cls(kind=text[:-1].upper(), normalizer="nEW")
        return cls(kind=text.upper(), normalizer="Ln")


# =====================================================
# Counting statistics
# =====================================================

class StatisticSpec(BaseModel):
    """Class of vertices counted per component"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["all", "distance", "degree", "tree"]
    m: Optional[int] = Field(None, ge=1, description="Distance or degree for distance/degree specs")
    tree: Optional[str] = Field(None, description="Canonical (AHU) string of the rooted tree pattern")

    @model_validator(mode="after")
    def _check_fields(self):
        if self.kind in ("distance", "degree") and self.m is None:
            raise ValueError(f"Statistic '{self.kind}' requires m >= 1")
        if self.kind in ("all", "tree") and self.m is not None:
            raise ValueError(f"Statistic '{self.kind}' does not take m")
        if self.kind == "tree":
            if self.tree is None:
                raise ValueError("Statistic 'tree' requires a tree pattern")
            error = validate_canonical_string(self.tree)
            if error:
                raise ValueError(error)
        elif self.tree is not None:
            raise ValueError(f"Statistic '{self.kind}' does not take a tree pattern")
        return self

    @property
    def label(self) -> str:
        if self.kind == "all":
            return "all"
        if self.kind == "tree":
            return f"tree:{self.tree}"
        return f"{self.kind}:{self.m}"

    @classmethod
    def parse(cls, text: str) -> "StatisticSpec":
        """
        Parse "all", "distance:2", "degree:1", "tree:0 1 1" or "tree:(()())"

        Args:
            text: Statistic description

        Returns:
            StatisticSpec
        """
        from ..core.trees import RootedTree

        name, _, argument = text.strip().partition(":")
        name = name.strip().lower()
        argument = argument.strip()

        if name in ("all", "all_vertices", "allvertices"):
            return cls(kind="all")
        if name in ("distance", "degree"):
            if not argument.isdigit():
                raise ValueError(f"Statistic '{name}' needs an integer m >= 1, got '{argument}'")
            return cls(kind=name, m=int(argument))
        if name in ("tree", "terminal_tree"):
            return cls(kind="tree", tree=RootedTree.parse(argument).canonical)
        raise ValueError(f"Unknown statistic '{text}' (use all, distance:m, degree:m, tree:<parents>)")


class XiConstant(BaseModel):
    """Scaling constant xi of a counting statistic"""
    model_config = ConfigDict(frozen=True)

    value: float = Field(..., gt=0.0)
    spec: StatisticSpec
    model: WeightModel
    moments: Dict[str, float] = Field(default_factory=dict, description="Moment values used")


# =====================================================
# Replication results and reports
# =====================================================

class SpecRecord(BaseModel):
    """Per-statistic outcome of one replication"""
    spec: str
    point_max: float = Field(0.0, ge=0.0, description="Largest point of Xi_n (0 when empty)")
    point_second: float = Field(0.0, ge=0.0, description="Second largest point of Xi_n (0 when absent)")
    counts: Dict[str, int] = Field(default_factory=dict, description="Points per configured interval")
    s_top: int = Field(0, ge=0, description="S_n at the top-weight vertex")


class ReplicationResult(BaseModel):
    """Outcome of one replication"""
    rep: int
    seed: int
    n: int
    w_top: float = Field(0.0, ge=0.0, description="Largest weight W_(n)")
    q_n: float = Field(0.0, ge=0.0)
    records: List[SpecRecord] = Field(default_factory=list)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


class TestReport(BaseModel):
    """Outcome of one statistical check"""
    __test__ = False  # not a pytest class

    name: str
    statistic: float
    p_value: Optional[float] = Field(None, ge=0.0, le=1.0)
    level: float = Field(..., gt=0.0, lt=1.0)
    reject: bool
    sample_size: int = Field(..., ge=0)
    advisory: bool = Field(False, description="Reported but never fails the run")
    details: Dict[str, Any] = Field(default_factory=dict)

    @property
    def decision(self) -> str:
        return "REJECT" if self.reject else "PASS"

    def to_text(self) -> str:
        """Human readable block"""
        p_text = "n/a" if self.p_value is None else f"{self.p_value:.6g}"
        lines = [
            f"[{self.decision}] {self.name}" + (" (advisory)" if self.advisory else ""),
            f"    statistic   = {self.statistic:.6g}",
            f"    p-value     = {p_text}",
            f"    level       = {self.level:g}",
            f"    sample size = {self.sample_size}",
        ]
        for key, value in self.details.items():
            lines.append(f"    {key} = {value:.6g}" if isinstance(value, float) else f"    {key} = {value}")
        return "\n".join(lines)

    def to_key_value(self) -> str:
        """Machine readable key=value block"""
        lines = [
            f"name={self.name}",
            f"statistic={self.statistic!r}",
            f"p_value={'' if self.p_value is None else repr(self.p_value)}",
            f"level={self.level!r}",
            f"decision={self.decision}",
            f"sample_size={self.sample_size}",
            f"advisory={str(self.advisory).lower()}",
        ]
        lines.extend(f"{key}={value!r}" if isinstance(value, float) else f"{key}={value}"
                     for key, value in self.details.items())
        return "\n".join(lines)


# =====================================================
# Experiment configuration
# =====================================================

def parse_interval(text: str) -> Tuple[float, float]:
    """Parse "a:b" (b may be inf) into the half-open interval (a, b]"""
    left, sep, right = text.strip().partition(":")
    if not sep:
        raise ValueError(f"Interval must look like a:b, got '{text}'")
    return float(left), float(right)


def format_interval(interval: Tuple[float, float]) -> str:
    return f"{interval[0]:g}:{interval[1]:g}"


class ExperimentConfig(BaseModel):
    """Everything one experiment needs; workers is a runtime option and lives outside"""
    model_config = ConfigDict(frozen=True)

    beta: float = Field(3.0, gt=2.0, description="Tail exponent")
    t_min: float = Field(0.25, gt=0.0, description="Pareto scale")
    kind: Literal["NR", "ENR", "CL", "GRG"] = "ENR"
    normalizer: Literal["Ln", "nEW"] = "Ln"
    n: int = Field(10_000, ge=1, description="Vertices per graph")
    replications: int = Field(200, ge=1, description="Number of replications R")
    base_seed: int = Field(20240101, ge=0, lt=2 ** 64)
    specs: List[StatisticSpec] = Field(default_factory=lambda: [StatisticSpec(kind="all")], min_length=1)
    intervals: List[Tuple[float, float]] = Field(
        default_factory=lambda: [(1.0, math.inf), (1.0, 2.0)]
    )
    level: float = Field(0.01, gt=0.0, lt=1.0, description="Significance level")
    path_cap: int = Field(10_000, ge=1, description="Largest component examined for terminal trees")
    max_ks_distance: Optional[float] = Field(None, gt=0.0, le=1.0)
    control_max_ks_distance: Optional[float] = Field(None, gt=0.0, le=1.0)
    a1_tolerance: float = Field(0.10, gt=0.0, description="Relative tolerance of the A1 diagnostic")
    output_dir: str = "results"

    @field_validator("kind", mode="before")
    @classmethod
    def _upper_kind(cls, value):
        return value.strip().upper() if isinstance(value, str) else value

    @field_validator("specs", mode="before")
    @classmethod
    def _parse_specs(cls, value):
        if isinstance(value, str):
            value = [part for part in value.split(",") if part.strip()]
        return [StatisticSpec.parse(item) if isinstance(item, str) else item for item in value]

    @field_validator("intervals", mode="before")
    @classmethod
    def _parse_intervals(cls, value):
        if isinstance(value, str):
            value = [part for part in value.split(",") if part.strip()]
        return [parse_interval(item) if isinstance(item, str) else item for item in value]

    @field_validator("intervals")
    @classmethod
    def _check_intervals(cls, value):
        for a, b in value:
            if not (0.0 < a < b):
                raise ValueError(f"Interval ({a:g}, {b:g}] must satisfy 0 < a < b")
        return value

    @model_validator(mode="after")
    def _check_model(self):
        model = WeightModel(beta=self.beta, t_min=self.t_min, strict=False)
        if not model.is_subcritical:
            raise ValueError(model.violation())
        return self

    @property
    def weight_model(self) -> WeightModel:
        return WeightModel(beta=self.beta, t_min=self.t_min)

    @property
    def model_kind(self) -> ModelKind:
        return ModelKind(kind=self.kind, normalizer=self.normalizer)

    def echo(self) -> List[str]:
        """Full configuration as key=value lines"""
        return [
            f"beta={self.beta!r}",
            f"t_min={self.t_min!r}",
            f"kind={self.kind}",
            f"normalizer={self.normalizer}",
            f"n={self.n}",
            f"replications={self.replications}",
            f"base_seed={self.base_seed}",
            f"specs={','.join(spec.label for spec in self.specs)}",
            f"intervals={','.join(format_interval(i) for i in self.intervals)}",
            f"level={self.level!r}",
            f"path_cap={self.path_cap}",
            f"max_ks_distance={'' if self.max_ks_distance is None else repr(self.max_ks_distance)}",
            f"control_max_ks_distance="
            f"{'' if self.control_max_ks_distance is None else repr(self.control_max_ks_distance)}",
            f"a1_tolerance={self.a1_tolerance!r}",
            f"output_dir={self.output_dir}",
        ]

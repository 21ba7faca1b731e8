"""
Scenario Schema Definitions
Uses Pydantic v2 for validation and serialization of scenario files
"""

from enum import Enum
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .dynamics import StoppingRule
from .fitness import FitnessModel, model_from_spec
from .measure import (
    FamilySpec,
    Measure,
    PowerFamily,
    TruncatedExponentialFamily,
    UniformFamily,
    discretize_family,
    make_measure,
)


class OutputName(str, Enum):
    """Outputs a scenario may declare"""
    TRAJECTORY_CSV = "trajectory_csv"
    DIAGNOSTICS_CSV = "diagnostics_csv"
    FINAL_STATE_CSV = "final_state_csv"
    LIMIT_JSON = "limit_json"
    CHECKS_JSON = "checks_json"


class ModelKind(str, Enum):
    """Fitness models wired to scenario files"""
    KINGMAN = "kingman"
    LENSKI = "lenski"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ============================================================================
# Model
# ============================================================================

class ModelSpec(_Strict):
    """Fitness model descriptor"""
    kind: ModelKind = Field(..., description="kingman or lenski")
    gamma: Optional[float] = Field(
        default=None,
        gt=1,
        description="Daily growth factor (Lenski only)"
    )

    @model_validator(mode="after")
    def check_gamma(self) -> "ModelSpec":
        if self.kind == ModelKind.LENSKI and self.gamma is None:
            raise ValueError("lenski model requires gamma")
        if self.kind == ModelKind.KINGMAN and self.gamma is not None:
            raise ValueError("kingman model takes no gamma")
        return self

    def build(self) -> FitnessModel:
        spec = {"kind": self.kind.value}
        if self.gamma is not None:
            spec["gamma"] = self.gamma
        return model_from_spec(spec)


# ============================================================================
# Measures
# ============================================================================

class AtomSpec(_Strict):
    """One atom: mass m at location x"""
    x: float = Field(..., ge=0, description="Type (location)")
    m: float = Field(..., ge=0, description="Mass")


class MeasureDocument(_Strict):
    """Serialized measure: {"atoms": [{"x": ..., "m": ...}, ...]}; may be empty"""
    atoms: List[AtomSpec] = Field(default_factory=list, description="Atoms in ascending x")

    def resolve(self) -> Measure:
        return make_measure((a.x, a.m) for a in self.atoms)


class AtomsMeasureSpec(_Strict):
    """Measure given by explicit atoms"""
    atoms: List[AtomSpec] = Field(..., min_length=1, description="Atoms in any order")

    def resolve(self, bound: Optional[float] = None) -> Measure:
        return make_measure(((a.x, a.m) for a in self.atoms), bound=bound)


class FamilyMeasureSpec(_Strict):
    """Continuous family discretized into n midpoint cells"""
    family: Literal["uniform", "power", "truncated_exponential"] = Field(
        ..., description="Family name"
    )
    lo: float = Field(..., ge=0, description="Lower end of the support")
    hi: float = Field(..., gt=0, description="Upper end of the support")
    n: int = Field(..., ge=1, description="Number of cells (atoms)")
    k: Optional[float] = Field(default=None, gt=-1, description="Power family exponent")
    rate: Optional[float] = Field(default=None, description="Truncated exponential rate")

    @model_validator(mode="after")
    def check_params(self) -> "FamilyMeasureSpec":
        if self.lo >= self.hi:
            raise ValueError(f"lo={self.lo} must be below hi={self.hi}")
        if self.family == "power" and self.k is None:
            raise ValueError("power family requires k")
        if self.family == "truncated_exponential" and self.rate is None:
            raise ValueError("truncated_exponential family requires rate")
        return self

    def to_family(self) -> FamilySpec:
        if self.family == "power":
            return PowerFamily(k=self.k, lo=self.lo, hi=self.hi)
        if self.family == "truncated_exponential":
            return TruncatedExponentialFamily(rate=self.rate, lo=self.lo, hi=self.hi)
        return UniformFamily(lo=self.lo, hi=self.hi)

    def resolve(self, bound: Optional[float] = None) -> Measure:
        return discretize_family(self.to_family(), self.n, bound=bound)


MeasureSpec = Union[AtomsMeasureSpec, FamilyMeasureSpec]


# ============================================================================
# Verification
# ============================================================================

class VerifySpec(_Strict):
    """Verification suite sizes; unset values fall back to the settings"""
    n_pairs: Optional[int] = Field(default=None, ge=1, description="Dominated pairs")
    n_coupling_pairs: Optional[int] = Field(default=None, ge=1, description="Coupled runs")
    coupling_steps: Optional[int] = Field(default=None, ge=1, description="Steps per coupled run")
    n_recursion_scenarios: Optional[int] = Field(default=None, ge=1, description="Oracle runs")
    recursion_steps: Optional[int] = Field(default=None, ge=1, description="Steps per oracle run")
    grid_size: Optional[int] = Field(default=None, ge=2, description="Grid for s(x, .) checks")
    a_fractions: List[float] = Field(
        default_factory=lambda: [0.9, 0.99, 0.999],
        description="Truncation points a/M for the truncated-limit diagnostic"
    )

    @field_validator("a_fractions")
    @classmethod
    def validate_fractions(cls, v: List[float]) -> List[float]:
        if any(not 0 < f <= 1 for f in v):
            raise ValueError("a_fractions must lie in (0, 1]")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("a_fractions must be increasing")
        return v


# ============================================================================
# Scenario
# ============================================================================

class ScenarioConfig(_Strict):
    """
    A self-describing experiment: model, β, p0, q, stopping rule, outputs.

    Example:
        >>> ScenarioConfig.model_validate({
        ...     "model": {"kind": "kingman"}, "beta": 0.5,
        ...     "p0": {"atoms": [{"x": 1, "m": 1}]},
        ...     "q": {"atoms": [{"x": 0, "m": 1}]},
        ... }).stop.max_iterations
        100000
    """
    model: ModelSpec = Field(..., description="Fitness model")
    beta: float = Field(..., description="Mutation probability in (0, 1)")
    p0: MeasureSpec = Field(..., description="Initial type distribution")
    q: MeasureSpec = Field(..., description="Mutant type distribution")
    stop: StoppingRule = Field(default_factory=StoppingRule, description="Stopping rule")
    outputs: List[OutputName] = Field(default_factory=list, description="Declared outputs")
    seed: int = Field(default=0, ge=0, description="Seed for verification suites")
    bound: Optional[float] = Field(
        default=None,
        gt=0,
        description="Ambient bound M >= m_p0; defaults to m_p0 after Convention (*)"
    )
    limit_a: Optional[float] = Field(
        default=None,
        gt=0,
        description="Truncation point of the reported limit; defaults to M"
    )
    keep_history: bool = Field(default=False, description="Keep every trajectory state")
    verify: VerifySpec = Field(default_factory=VerifySpec, description="Suite sizes")

    @field_validator("beta")
    @classmethod
    def validate_beta(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError("beta must lie in (0,1)")
        return v

    @field_validator("outputs")
    @classmethod
    def validate_outputs(cls, v: List[OutputName]) -> List[OutputName]:
        if len(set(v)) != len(v):
            raise ValueError("outputs must not repeat")
        return v

    def resolve_p0(self) -> Measure:
        return self.p0.resolve(self.bound)

    def resolve_q(self) -> Measure:
        return self.q.resolve(self.bound)

    def build_model(self) -> FitnessModel:
        return self.model.build()


def scenario_json_schema() -> dict:
    """JSON schema of scenario files"""
    return ScenarioConfig.model_json_schema()

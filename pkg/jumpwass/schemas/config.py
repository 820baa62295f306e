"""
Analysis config schema (JSON, row-major matrices, "version": 1)
"""
from enum import Enum
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from jumpwass.core.config import CONFIG_SCHEMA_VERSION, DEFAULT_EPSILON, DEFAULT_WINDOW
from jumpwass.core.errors import JumpwassError
from jumpwass.models.gaussian import Gaussian
from jumpwass.models.system import (
    JumpLinearSystem,
    LawMode,
    ModeTiming,
    SwitchingLaw,
    law_from_dict,
    normalize_probability_vector,
)
from jumpwass.utils.rng import MAX_SEED


class Engine(str, Enum):
    SPLIT_MERGE = "split_merge"
    MODE_CONDITIONAL = "mode_conditional"
    ENUMERATE = "enumerate"
    SINGLE_MODES = "single_modes"
    MONTECARLO = "montecarlo"


def _probability_vector(values: List[float], name: str) -> List[float]:
    try:
        return normalize_probability_vector(values, name).tolist()
    except JumpwassError as e:
        raise ValueError(str(e))


class SystemSpec(BaseModel):
    modes: List[List[List[float]]] = Field(min_length=1)
    mode_names: Optional[List[str]] = None

    class Config:
        extra = "forbid"

    @model_validator(mode="after")
    def check_system(self):
        try:
            self.build()
        except JumpwassError as e:
            raise ValueError(str(e))
        return self

    @property
    def num_modes(self) -> int:
        return len(self.modes)

    @property
    def dim(self) -> int:
        return len(self.modes[0])

    def build(self) -> JumpLinearSystem:
        return JumpLinearSystem.from_dict(self.model_dump())


class IIDSwitchingSpec(BaseModel):
    kind: Literal["iid"]
    pi: List[float]

    class Config:
        extra = "forbid"

    @field_validator("pi")
    @classmethod
    def check_pi(cls, v: List[float]) -> List[float]:
        return _probability_vector(v, "pi")

    @property
    def num_modes(self) -> int:
        return len(self.pi)

    def build(self) -> SwitchingLaw:
        return law_from_dict(self.model_dump())


class ScheduleSwitchingSpec(BaseModel):
    kind: Literal["schedule"]
    vectors: List[List[float]] = Field(min_length=1)

    class Config:
        extra = "forbid"

    @field_validator("vectors")
    @classmethod
    def check_vectors(cls, v: List[List[float]]) -> List[List[float]]:
        vectors = [_probability_vector(row, f"schedule step {k}") for k, row in enumerate(v, start=1)]
        if len({len(row) for row in vectors}) != 1:
            raise ValueError("all schedule vectors must have the same length")
        return vectors

    @property
    def num_modes(self) -> int:
        return len(self.vectors[0])

    def build(self) -> SwitchingLaw:
        return law_from_dict(self.model_dump())


class MarkovSwitchingSpec(BaseModel):
    kind: Literal["markov"]
    initial: List[float]
    transition: List[List[float]]
    # When the first mode is drawn: "transition" -> pi(0) P, "prior" -> pi(0)
    timing: ModeTiming = ModeTiming.TRANSITION

    class Config:
        extra = "forbid"

    @field_validator("initial")
    @classmethod
    def check_initial(cls, v: List[float]) -> List[float]:
        return _probability_vector(v, "initial")

    @field_validator("transition")
    @classmethod
    def check_transition(cls, v: List[List[float]]) -> List[List[float]]:
        return [_probability_vector(row, f"transition row {i}") for i, row in enumerate(v, start=1)]

    @model_validator(mode="after")
    def check_shape(self):
        m = len(self.initial)
        if len(self.transition) != m or any(len(row) != m for row in self.transition):
            raise ValueError(f"transition must be {m}x{m} to match initial")
        return self

    @property
    def num_modes(self) -> int:
        return len(self.initial)

    def build(self) -> SwitchingLaw:
        return law_from_dict(self.model_dump())


SwitchingSpec = Annotated[
    Union[IIDSwitchingSpec, ScheduleSwitchingSpec, MarkovSwitchingSpec],
    Field(discriminator="kind"),
]


class InitialStateSpec(BaseModel):
    mean: List[float] = Field(min_length=1)
    covariance: List[List[float]]

    class Config:
        extra = "forbid"

    @model_validator(mode="after")
    def check_gaussian(self):
        try:
            self.build()
        except JumpwassError as e:
            raise ValueError(str(e))
        return self

    def build(self) -> Gaussian:
        return Gaussian.from_dict(self.model_dump())


class SamplerConfig(BaseModel):
    num_trajectories: int = Field(ge=1)
    seed: int = Field(ge=0, le=MAX_SEED)
    horizon: Optional[int] = Field(None, ge=1)
    law_mode: LawMode = LawMode.PRODUCT
    workers: Optional[int] = Field(None, ge=1)

    class Config:
        extra = "forbid"


class ConvergenceSpec(BaseModel):
    epsilon: float = Field(DEFAULT_EPSILON, gt=0)
    window: int = Field(DEFAULT_WINDOW, ge=1)

    class Config:
        extra = "forbid"


class AnalysisConfig(BaseModel):
    version: Literal[CONFIG_SCHEMA_VERSION]
    system: SystemSpec
    switching: SwitchingSpec
    initial_state: InitialStateSpec
    horizon: int = Field(ge=1)
    engines: List[Engine] = Field(default_factory=lambda: [Engine.SPLIT_MERGE])
    oracle_horizon: Optional[int] = Field(None, ge=1)
    oracle_law_mode: LawMode = LawMode.PRODUCT
    oracle_component_cap: Optional[int] = Field(None, ge=1)
    mc: Optional[SamplerConfig] = None
    convergence: ConvergenceSpec = Field(default_factory=ConvergenceSpec)

    class Config:
        extra = "forbid"

    @model_validator(mode="after")
    def check_consistency(self):
        m, n = self.system.num_modes, self.system.dim
        if self.switching.num_modes != m:
            raise ValueError(f"switching: law has {self.switching.num_modes} modes, system has {m}")
        if len(self.initial_state.mean) != n:
            raise ValueError(f"initial_state.mean: length {len(self.initial_state.mean)}, system dimension is {n}")
        if isinstance(self.switching, ScheduleSwitchingSpec) and len(self.switching.vectors) < self.horizon:
            raise ValueError(
                f"switching.vectors: schedule has {len(self.switching.vectors)} steps, horizon is {self.horizon}"
            )
        if self.oracle_horizon is not None and self.oracle_horizon > self.horizon:
            raise ValueError(f"oracle_horizon: {self.oracle_horizon} exceeds horizon {self.horizon}")
        if Engine.MONTECARLO in self.engines and self.mc is None:
            raise ValueError("mc: required when the montecarlo engine is selected")
        if Engine.MONTECARLO in self.engines and self.mc.num_trajectories < 2:
            raise ValueError(
                f"mc.num_trajectories: montecarlo needs at least 2 trajectories, got {self.mc.num_trajectories}"
            )
        if self.mc is not None and self.mc.horizon is not None and self.mc.horizon > self.horizon:
            raise ValueError(f"mc.horizon: {self.mc.horizon} exceeds horizon {self.horizon}")
        return self

    @property
    def effective_engines(self) -> List[Engine]:
        """Requested engines in a fixed order; split_merge always included"""
        requested = set(self.engines) | {Engine.SPLIT_MERGE}
        return [e for e in Engine if e in requested]

    @property
    def effective_oracle_horizon(self) -> int:
        return self.oracle_horizon if self.oracle_horizon is not None else self.horizon

    def sampler_config(self) -> Optional[SamplerConfig]:
        """mc section with its horizon resolved against the analysis horizon"""
        if self.mc is None:
            return None
        if self.mc.horizon is not None:
            return self.mc
        return self.mc.model_copy(update={"horizon": self.horizon})

    def with_seed(self, seed: int) -> "AnalysisConfig":
        if self.mc is None:
            return self
        return self.model_copy(update={"mc": self.mc.model_copy(update={"seed": seed})})

    def build_system(self) -> JumpLinearSystem:
        return self.system.build()

    def build_law(self) -> SwitchingLaw:
        return self.switching.build()

    def build_initial(self) -> Gaussian:
        return self.initial_state.build()

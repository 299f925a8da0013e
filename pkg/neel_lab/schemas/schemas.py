from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Dict, List, Literal, Optional, Union
import numpy as np

from neel_lab.core.config import settings

# Numerics schemas
class QuadratureSettings(BaseModel):
    abs_tol: float = Field(default_factory=lambda: settings.QUAD_ABS_TOL, gt=0)
    rel_tol: float = Field(default_factory=lambda: settings.QUAD_REL_TOL, gt=0)
    max_subdivisions: int = Field(default_factory=lambda: settings.QUAD_MAX_SUBDIVISIONS, ge=1)
    singularity_split: float = Field(default_factory=lambda: settings.QUAD_SINGULARITY_SPLIT, gt=0)

    class Config:
        frozen = True

    def tightened(self, factor: float = 10.0) -> "QuadratureSettings":
        """Same settings with both tolerances divided by factor"""
        return self.model_copy(
            update={"abs_tol": self.abs_tol / factor, "rel_tol": self.rel_tol / factor}
        )

    def target(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))

class RootBracket(BaseModel):
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    @property
    def straddles(self) -> bool:
        return self.lo < self.hi and np.sign(self.f_lo) != np.sign(self.f_hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

class ComplexPoint(BaseModel):
    re: float
    im: float = 0.0

    class Config:
        frozen = True

    @classmethod
    def of(cls, z: complex) -> "ComplexPoint":
        return cls(re=float(np.real(z)), im=float(np.imag(z)))

    def as_complex(self) -> complex:
        return complex(self.re, self.im)

# Solver result schemas
class NeelResult(BaseModel):
    U: float = Field(gt=0)
    t_z: float = Field(ge=0, lt=2)
    t_n: float = Field(gt=0)
    bracket: RootBracket
    residual: float

class GapSolution(BaseModel):
    U: float = Field(gt=0)
    t_z: float = Field(ge=0, lt=2)
    T: float = Field(ge=0)
    delta_af: float = Field(ge=0)
    m_af: float
    m_hat: Optional[float] = None
    residual: float
    t_n_used: float

    @model_validator(mode="after")
    def check_half_filling_bound(self) -> "GapSolution":
        if self.delta_af >= self.U / 2:
            raise ValueError(f"delta_af={self.delta_af} violates delta_af < U/2={self.U / 2}")
        return self

# Asymptotics schemas
class SeriesSpec(BaseModel):
    k_max: int = Field(default=5, ge=0)
    l_max: int = Field(default=5, ge=0)
    mode: Literal["printed", "assembled"] = "printed"

    class Config:
        frozen = True

class NamedConstants(BaseModel):
    a0: float
    a0_error: float
    a1: float
    a1_error: float
    b0: Dict[float, float] = {}
    b0_error: Dict[float, float] = {}

# CLI schemas
class ParameterRange(BaseModel):
    start: float
    stop: float
    count: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def check_order(self) -> "ParameterRange":
        if self.start > self.stop:
            raise ValueError(f"range start {self.start} exceeds stop {self.stop}")
        if self.count == 1 and self.start != self.stop:
            raise ValueError("a single-point range needs start == stop")
        return self

    @classmethod
    def parse(cls, text: str) -> "ParameterRange":
        """Accept either a single value or start:stop:count"""
        parts = text.split(":")
        if len(parts) == 1:
            value = float(parts[0])
            return cls(start=value, stop=value, count=1)
        if len(parts) != 3:
            raise ValueError(f"expected start:stop:count, got {text!r}")
        return cls(start=float(parts[0]), stop=float(parts[1]), count=int(parts[2]))

    def values(self) -> List[float]:
        if self.count == 1:
            return [self.start]
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]

class SweepRequest(BaseModel):
    command: Literal["dos", "neel", "gap", "mhat", "bcs", "asym", "verify", "figure"]
    parameters: Dict[str, ParameterRange] = {}
    tol: Optional[float] = Field(default=None, gt=0)
    out: Optional[str] = None
    figure_id: Optional[int] = Field(default=None, ge=1, le=8)
    level: Literal["quick", "full"] = "quick"

    def is_swept(self, name: str) -> bool:
        return name in self.parameters and self.parameters[name].count > 1

class CsvTable(BaseModel):
    header: List[str]
    rows: List[List[Union[float, str]]] = []

    @model_validator(mode="after")
    def check_rectangular(self) -> "CsvTable":
        width = len(self.header)
        for index, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {index} has {len(row)} fields, header has {width}")
        return self

    def column(self, name: str) -> List[Union[float, str]]:
        position = self.header.index(name)
        return [row[position] for row in self.rows]

# Golden / verification schemas
class GoldenEntry(BaseModel):
    name: str
    parameters: str = ""
    value: float
    tolerance: float = Field(ge=0)

    @field_validator("name", "parameters")
    @classmethod
    def no_separator(cls, v: str) -> str:
        if "," in v:
            raise ValueError("golden names and parameters cannot contain commas")
        return v

class CriterionResult(BaseModel):
    number: int
    name: str
    passed: bool
    measured: Optional[float] = None
    bound: Optional[float] = None
    detail: str = ""
    seconds: float = 0.0

class VerificationReport(BaseModel):
    level: Literal["quick", "full"]
    results: List[CriterionResult] = []

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

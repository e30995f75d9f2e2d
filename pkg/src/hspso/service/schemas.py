"""Request/response models for the HTTP service.

The external parameter names follow the CLI flags (``lambda`` for the FI
fraction, ``k``/``beta``/``m`` for the topology); models accept both the alias
and the field name.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

TopologyKind = Literal["ring", "scale-free", "small-world"]
BoundaryPolicy = Literal["skip", "clamp"]
NoiseMode = Literal["per-term", "per-eval"]
SiDrawMode = Literal["per-dimension", "per-particle"]


class TopologyModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: TopologyKind = "ring"
    k: int = Field(4, ge=2)
    beta: float = Field(0.1, ge=0.0, le=1.0)
    m: int = Field(2, ge=1)
    pin_seed: Optional[int] = None


class RunSettings(BaseModel):
    """Common knobs of every optimization request."""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    objective: str = "f1"
    lambda_: float = Field(0.3, alias="lambda", ge=0.0, le=1.0)
    topology: TopologyModel = Field(default_factory=TopologyModel)
    n: int = Field(50, ge=2, description="swarm size")
    dim: Optional[int] = Field(None, ge=1)
    iters: int = Field(5000, ge=1)
    seed: int = 1
    boundary: BoundaryPolicy = "skip"
    si_draws: SiDrawMode = "per-dimension"
    noise_mode: NoiseMode = "per-term"


class BenchRequest(RunSettings):
    runs: int = Field(100, ge=1)
    log_every: int = Field(1, ge=1)


class SummaryRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    objective: str
    topology: TopologyKind
    k: int
    lambda_: float = Field(alias="lambda")
    mean_R: float
    median_R: float
    std_R: float
    mean_p: float
    runs: int


class BenchResponse(BaseModel):
    summary: SummaryRow
    runs_csv: str
    summary_csv: str


class SweepRequest(RunSettings):
    lambda_grid: list[float] = Field(min_length=2)
    k_grid: Optional[list[int]] = None
    runs: int = Field(100, ge=1)


class SweepRowOut(SummaryRow):
    is_argmin_lambda: bool


class SweepResponse(BaseModel):
    rows: list[SweepRowOut]
    sweep_csv: str


class FilterDesignRequest(RunSettings):
    objective: Literal["filter"] = "filter"
    lambda_: float = Field(0.3, alias="lambda", ge=0.0, le=1.0)
    topology: TopologyModel = Field(default_factory=lambda: TopologyModel(k=2))
    iters: int = Field(2000, ge=1)
    runs: int = Field(1, ge=1)


class CoefficientSet(BaseModel):
    """The 15 free filter coefficients, named as in the published comparisons."""

    model_config = ConfigDict(extra="ignore")

    a01: float
    a02: float
    a10: float
    a11: float
    a12: float
    a20: float
    a21: float
    a22: float
    b1: float
    b2: float
    c1: float
    c2: float
    d1: float
    d2: float
    H0: float


class FilterDesignResponse(BaseModel):
    coefficients: CoefficientSet
    j2: float
    feasible: bool
    best_run: int
    run_costs: list[float]
    coefficients_json: str
    amplitude_csv: str


class FilterEvaluateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    coefficients: CoefficientSet
    include_amplitude: bool = False


class FilterEvaluateResponse(BaseModel):
    j2: float
    feasible: bool
    amplitude_csv: Optional[str] = None


class GraphRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: TopologyKind = "ring"
    n: int = Field(50, ge=3)
    k: int = Field(4, ge=2)
    beta: float = Field(0.1, ge=0.0, le=1.0)
    m: int = Field(2, ge=1)
    seed: int = 0


class GraphResponse(BaseModel):
    n: int
    edge_count: int
    edge_list: str


class ObjectiveInfo(BaseModel):
    name: str
    dim: int
    lower: float
    upper: float
    stochastic: bool


class HealthResponse(BaseModel):
    status: str
    version: str

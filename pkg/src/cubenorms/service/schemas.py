"""Request and response bodies for the HTTP service."""
from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field


class GroupModel(BaseModel):
    factors: list[int]


class FunctionModel(BaseModel):
    """Function on a finite abelian group, values in code order."""

    group: GroupModel
    values: list[float]


class TensorModel(BaseModel):
    """Function on V^s, values flattened in row-major order."""

    vertex_count: int
    arity: int
    values: list[float]


class IntervalModel(BaseModel):
    """Function on {1, ..., n}."""

    n: int
    values: list[float]


FunctionOrTensor = Union[FunctionModel, TensorModel]


class NormRequest(BaseModel):
    function: FunctionModel
    s: int = 2
    method: Literal["auto", "direct", "recursive", "fourier", "lifted"] = "auto"


class NormResponse(BaseModel):
    value: float
    method: str
    cost: int


class WeakNormRequest(BaseModel):
    function: FunctionModel
    s: int = 2
    mode: Literal["auto", "exhaustive", "alternating"] = "auto"
    restarts: int = 32
    seed: int = 7
    include_witness: bool = False


class WeakNormResponse(BaseModel):
    lower_bound: float
    exact: bool
    cost: int
    witness: Optional[dict] = None


class BoxNormRequest(BaseModel):
    tensor: TensorModel
    ell: int = 2


class CutNormRequest(BaseModel):
    tensor: TensorModel
    mode: Literal["auto", "exhaustive", "alternating"] = "auto"
    restarts: int = 32
    seed: int = 7
    include_witness: bool = False


class MajorantRequest(BaseModel):
    kind: str = "sparse-set"
    epsilon: Optional[float] = None
    delta: Optional[float] = None
    seed: Optional[int] = None
    values: Optional[list[float]] = None
    group: Optional[list[int]] = None
    vertex_count: Optional[int] = None
    arity: Optional[int] = None
    certify: bool = False
    s: int = 2
    psi_p: Optional[float] = None


class MajorantResponse(BaseModel):
    function: FunctionOrTensor
    kind: str
    clip_count: int
    mean: float
    certificate: Optional[dict] = None


class DecompositionRequest(BaseModel):
    g: FunctionOrTensor
    nu: FunctionOrTensor
    s: int = 2
    epsilon: float = 0.05
    mode: Literal["auto", "exhaustive", "alternating"] = "auto"
    restarts: int = 32
    seed: int = 7
    t_max: Optional[int] = None


class DecompositionResponse(BaseModel):
    model: FunctionOrTensor
    residual_cut: float
    residual_gowers: float
    iterations: list[list[float]]
    converged: bool
    checks: dict


class IntervalNormRequest(BaseModel):
    f: IntervalModel
    s: int = 2
    n_prime: Optional[int] = None


class TransferRequest(BaseModel):
    f: IntervalModel
    nu: FunctionModel
    s: int = 2
    c: float = 20.0
    epsilon: float = 0.5
    mode: Literal["auto", "exhaustive", "alternating"] = "auto"
    restarts: int = 32
    seed: int = 7
    t_max: Optional[int] = None
    paper_scale: bool = False


class TransferResponse(BaseModel):
    h: IntervalModel
    decomposition: DecompositionResponse
    n_prime: int
    l: int
    big_l: int
    measured_residual: float
    assembled_bound: float
    components: dict
    converged: bool


class ExperimentRequest(BaseModel):
    name: str
    grid: Optional[dict] = None
    render: Literal["none", "csv"] = "none"


class ExperimentResponse(BaseModel):
    experiment: str
    grid: dict
    rows: list[dict]
    assertions: list[dict]
    passed: bool
    csv: Optional[str] = None


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorBody(BaseModel):
    error: str
    detail: str
    extra: dict = Field(default_factory=dict)

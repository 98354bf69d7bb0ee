from pydantic import BaseModel, Field, field_validator
from typing import Dict, List, Optional

SCHEMA_VERSION = 1


class PhaseTimes(BaseModel):
    parse: float = Field(0.0, ge=0, description="Milliseconds spent reading the record")
    exact: Optional[float] = Field(None, ge=0, description="Milliseconds in the exact 2DD search")
    gamma: Optional[float] = Field(None, ge=0, description="Milliseconds in the exact domination search")
    construct: Optional[float] = Field(None, ge=0, description="Milliseconds in the bound constructor")


class ResultRecord(BaseModel):
    schema_version: int = Field(SCHEMA_VERSION, alias="schema")
    instance_id: str = Field(..., description="Canonical code (hex) of the mop")
    record_index: int = Field(..., ge=0, description="Position of the record in the input stream")
    n: int = Field(..., ge=3, description="Vertex count")
    k: int = Field(..., ge=0, description="Number of degree-2 vertices")
    internal_triangles: int = Field(..., ge=0)
    bound: int = Field(..., ge=0, description="floor(2(n+k)/9)")
    gamma2d: Optional[int] = None
    witness: Optional[List[int]] = None
    gamma: Optional[int] = None
    constructor_set: Optional[List[int]] = None
    constructor_size: Optional[int] = None
    used_fallback: Optional[bool] = None
    bound_proven: Optional[bool] = None
    verified: Optional[bool] = None
    anomalies: List[str] = Field(default=[])
    runtime_ms: PhaseTimes = Field(default_factory=PhaseTimes)

    @field_validator('constructor_size')
    @classmethod
    def validate_constructor_size(cls, v, info):
        if v is not None and info.data.get('constructor_set') is not None:
            if v != len(info.data['constructor_set']):
                raise ValueError(f"constructor_size {v} differs from the set size")
        return v

    class Config:
        populate_by_name = True

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, exclude_none=True)


class TraceLine(BaseModel):
    rule_id: str
    claim: str
    deleted: List[int]
    contracted: Optional[List[int]] = None
    augment: Optional[List[int]] = Field(None, description="Vertices added when lifting; null when the level was re-solved")
    terminal: bool = False
    n_before: int = Field(..., ge=3)
    n_after: int = Field(..., ge=3)
    k_before: int = Field(..., ge=0)
    k_after: int = Field(..., ge=0)
    budget: int = Field(..., ge=0)


class TraceSummary(BaseModel):
    summary: bool = True
    base_case: str
    base_set: List[int]
    final_set: List[int]
    bound: int
    used_fallback: bool
    bound_proven: bool
    anomalies: List[str] = Field(default=[])


class StatsRow(BaseModel):
    n: int
    instances: int
    mean_gamma2d: float
    max_gamma2d: int
    mean_k: float
    k_distribution: Dict[int, int]
    internal_triangle_distribution: Dict[int, int]
    slack_histogram: Dict[int, int]

    @staticmethod
    def header() -> str:
        return ("n,instances,mean_gamma2d,max_gamma2d,mean_k,k_distribution,"
                "internal_triangle_distribution,slack_histogram")

    @staticmethod
    def _cell(dist: Dict[int, int]) -> str:
        return ";".join(f"{value}:{count}" for value, count in sorted(dist.items()))

    def to_csv(self) -> str:
        return ",".join([
            str(self.n),
            str(self.instances),
            f"{self.mean_gamma2d:.4f}",
            str(self.max_gamma2d),
            f"{self.mean_k:.4f}",
            self._cell(self.k_distribution),
            self._cell(self.internal_triangle_distribution),
            self._cell(self.slack_histogram),
        ])


class TightRow(BaseModel):
    n: int
    searched: int
    found: int
    example: Optional[str] = None

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..core.constants import SCHEMA_VERSION
from .selberg import OracleRow


class Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = SCHEMA_VERSION


class IntegralEquationReport(Report):
    N: int
    samples: int
    bins: int
    l1_distance: float
    relative_l1: float
    sup_distance: float
    mc_error_budget: float
    mass_drift: float
    kernel_exponent: float
    passed: bool = Field(alias="pass")


class SemicircleRow(BaseModel):
    N: int
    samples: int
    l1_distance: float
    sup_distance: float
    error_bar: float
    mass_before_renormalization: float
    gue_l1_distance: float


class SemicircleReport(Report):
    rows: List[SemicircleRow]
    monotone: bool
    passed: bool = Field(alias="pass")


class RatioReport(Report):
    N: int
    samples: int
    ratio: float
    stderr: float
    numerator: float
    denominator: float


class SigmaZeroReport(Report):
    N: int
    exact_relation: float
    asymptotic: float
    monte_carlo: Optional[float] = None
    monte_carlo_stderr: Optional[float] = None


class SelbergReport(Report):
    rows: List[OracleRow]
    passed: bool = Field(alias="pass")

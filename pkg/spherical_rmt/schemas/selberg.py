import math
from typing import NamedTuple, Optional

from pydantic import BaseModel, ConfigDict, PositiveInt, model_validator

from ..utils.exceptions import DomainError


class LogValue(NamedTuple):
    """A real number stored as (ln|v|, sign)."""

    log: float
    sign: int = 1

    @property
    def value(self) -> float:
        return self.sign * math.exp(self.log)

    def __mul__(self, other: "LogValue") -> "LogValue":
        return LogValue(self.log + other.log, self.sign * other.sign)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        return LogValue(self.log - other.log, self.sign * other.sign)


class SelbergParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: PositiveInt
    alpha: float
    beta: float
    gamma: float

    @model_validator(mode="after")
    def check_domain(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise DomainError(f"alpha and beta must be positive, got {self.alpha}, {self.beta}")
        bound = 1.0 / self.n
        if self.n > 1:
            bound = min(bound, self.alpha / (self.n - 1), self.beta / (self.n - 1))
        if self.gamma <= -bound:
            raise DomainError(f"gamma={self.gamma} must exceed {-bound}")
        return self


class OracleRow(BaseModel):
    """One line of the verify-selberg report."""

    identity: str
    params: dict
    closed_form_log: float
    closed_form: float
    oracle: float
    oracle_stderr: Optional[float] = None
    method: str
    relative_error: float
    tolerance: float
    passed: bool

import math

from pydantic import BaseModel, ConfigDict, computed_field, field_validator
from scipy.special import gammaln

from ..utils.exceptions import DomainError


class RadialWeight(BaseModel):
    """The radial law e^{−r²} r^{N²−2} dr on (0, ∞), normalized to mass 1."""

    model_config = ConfigDict(frozen=True)

    N: int

    @field_validator("N")
    @classmethod
    def check_size(cls, value: int) -> int:
        if value < 2:
            raise DomainError(f"the radial weight needs N >= 2, got {value}")
        return value

    @computed_field
    @property
    def shape(self) -> float:
        # t = r² turns the weight into a Gamma(s) law in t
        return (self.N * self.N - 1) / 2.0

    @computed_field
    @property
    def log_norm(self) -> float:
        return float(gammaln(self.shape)) - math.log(2.0)

    @computed_field
    @property
    def r_star(self) -> float:
        return math.sqrt((self.N * self.N - 2) / 2.0)

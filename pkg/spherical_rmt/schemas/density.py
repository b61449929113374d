import io
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..core.constants import MASS_TOLERANCE, SCHEMA_VERSION
from ..utils.exceptions import DomainError, InconsistencyError
from ..utils.quadrature import trapezoid


def _frozen_array(value) -> np.ndarray:
    array = np.array(value, dtype=float)
    array.setflags(write=False)
    return array


class DensityGrid(BaseModel):
    """A density tabulated on strictly increasing abscissae.

    `support`, when set, is the interval the density lives on: values are
    extended constantly from the outermost points to the support edges and
    are zero beyond. For a histogram tabulated at bin centers this makes the
    integral equal the exact bin sum.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    points: np.ndarray
    values: np.ndarray
    mass: float
    N: Optional[int] = None
    kind: str = "density"
    support: Optional[Tuple[float, float]] = None
    errors: Optional[np.ndarray] = None
    tolerance: float = MASS_TOLERANCE
    clipped_fraction: float = 0.0

    @field_validator("points", "values", mode="before")
    @classmethod
    def as_array(cls, value):
        return _frozen_array(value)

    @field_validator("errors", mode="before")
    @classmethod
    def as_optional_array(cls, value):
        return None if value is None else _frozen_array(value)

    @model_validator(mode="after")
    def check_invariants(self):
        if self.points.ndim != 1 or self.points.size < 2:
            raise DomainError("a density grid needs at least two abscissae")
        if self.values.shape != self.points.shape:
            raise DomainError("points and values differ in length")
        if self.errors is not None and self.errors.shape != self.points.shape:
            raise DomainError("points and errors differ in length")
        if not np.all(np.isfinite(self.points)) or np.any(np.diff(self.points) <= 0):
            raise DomainError("abscissae must be finite and strictly increasing")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise DomainError("density values must be finite and nonnegative")
        if self.mass <= 0:
            raise DomainError("declared mass must be positive")
        if self.support is not None:
            lo, hi = self.support
            if lo > self.points[0] or hi < self.points[-1]:
                raise DomainError("abscissae extend beyond the declared support")

        integral = self.integral()
        if abs(integral - self.mass) > self.tolerance * self.mass:
            raise InconsistencyError(
                f"grid integral {integral:.10g} differs from declared mass {self.mass:.10g} "
                f"by more than {self.tolerance:g} relative"
            )
        return self

    def integral(self, values: Optional[np.ndarray] = None) -> float:
        values = self.values if values is None else values
        total = trapezoid(values, self.points)
        if self.support is not None:
            total += values[0] * (self.points[0] - self.support[0])
            total += values[-1] * (self.support[1] - self.points[-1])
        return total

    def interpolate(self, x) -> np.ndarray:
        """Linear interpolation; zero outside the support (or outside the points)."""
        x = np.asarray(x, dtype=float)
        if self.support is None:
            return np.interp(x, self.points, self.values, left=0.0, right=0.0)
        lo, hi = self.support
        inside = (x >= lo) & (x <= hi)
        return np.where(inside, np.interp(x, self.points, self.values), 0.0)

    def interpolate_errors(self, x) -> np.ndarray:
        if self.errors is None:
            return np.zeros_like(np.asarray(x, dtype=float))
        return self.with_values(self.errors, check=False).interpolate(x)

    def with_values(self, values, check: bool = True, **changes) -> "DensityGrid":
        data = self.model_dump()
        data.update(values=values, **changes)
        if not check:
            return DensityGrid.model_construct(
                **{**data, "values": _frozen_array(values)}
            )
        return DensityGrid(**data)

    def restrict(self, lo: float, hi: float) -> "DensityGrid":
        """Points within [lo, hi]; the result has no support and declares its own integral."""
        keep = (self.points >= lo) & (self.points <= hi)
        points = self.points[keep]
        values = self.values[keep]
        errors = None if self.errors is None else self.errors[keep]
        return DensityGrid(
            points=points,
            values=values,
            errors=errors,
            mass=trapezoid(values, points),
            N=self.N,
            kind=self.kind,
        )

    def to_csv(self) -> str:
        buffer = io.StringIO()
        buffer.write(f"# mass={self.mass!r} N={self.N} kind={self.kind}\n")
        buffer.write("x,density\n")
        for x, v in zip(self.points, self.values):
            buffer.write(f"{x:.17g},{v:.17g}\n")
        return buffer.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "mass": self.mass,
            "N": self.N,
            "kind": self.kind,
            "support": list(self.support) if self.support else None,
            "clipped_fraction": self.clipped_fraction,
            "points": self.points.tolist(),
            "values": self.values.tolist(),
            "errors": None if self.errors is None else self.errors.tolist(),
        }

    @classmethod
    def from_csv(cls, text: str, support: Optional[Tuple[float, float]] = None) -> "DensityGrid":
        header, meta = {}, text.splitlines()[0]
        for item in meta.lstrip("#").split():
            key, _, value = item.partition("=")
            header[key] = value
        rows = np.loadtxt(io.StringIO(text), delimiter=",", comments="#", skiprows=2)
        return cls(
            points=rows[:, 0],
            values=rows[:, 1],
            mass=float(header["mass"]),
            N=None if header.get("N") in (None, "None") else int(header["N"]),
            kind=header.get("kind", "density"),
            support=support,
        )

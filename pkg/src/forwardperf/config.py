"""Run-level solver settings shared by every period of a scenario."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError


@dataclass(frozen=True)
class RunConfig:
    tol_series: float = 1e-12
    tol_quad: float = 1e-10
    tol_invert: float = 1e-10
    grid_points: int = 512
    snapshot_points: int = 2048
    y_min: float = 1e-8
    y_max: float = 1e8
    x_min: float = 1e-2
    x_max: float = 1e2
    output_dir: Path = Path(".")

    def __post_init__(self) -> None:
        for name in ("tol_series", "tol_quad", "tol_invert"):
            tol = getattr(self, name)
            if not 0.0 < tol < 1.0:
                raise ValidationError(f"{name} must lie in (0, 1), got {tol}")
        if not 0.0 < self.y_min < self.y_max:
            raise ValidationError(f"need 0 < y_min < y_max, got {self.y_min}, {self.y_max}")
        if not 0.0 < self.x_min < self.x_max:
            raise ValidationError(f"need 0 < x_min < x_max, got {self.x_min}, {self.x_max}")
        if self.grid_points < 2 or self.snapshot_points < 2:
            raise ValidationError("grid_points and snapshot_points must be at least 2")
        object.__setattr__(self, "output_dir", Path(self.output_dir))

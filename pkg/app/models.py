"""Record models shared by the services and the CLI writers"""

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

STATUS_OK = "ok"
STATUS_UNDEFINED = "undefined"


def _angle(text: str, degrees: bool) -> float:
    value = float(text)
    return float(np.deg2rad(value)) if degrees else value


class PointRecord(BaseModel):
    """One evaluated (g, theta) point of the canonical example"""

    g: float
    theta: float
    status: str = Field(STATUS_OK, description="ok, or undefined when postselection vanishes")
    c_closed: Optional[float] = None
    c_numeric: Optional[float] = None
    gamma_closed: Optional[float] = None
    gamma_numeric: Optional[float] = None
    b_max: Optional[float] = None
    violating: Optional[bool] = None
    p_bell: Optional[float] = None
    w_pp: Optional[float] = None
    w_pm: Optional[float] = None
    w_mp: Optional[float] = None
    w_mm: Optional[float] = None
    c_pp: Optional[float] = None
    c_pm: Optional[float] = None
    c_mp: Optional[float] = None
    c_mm: Optional[float] = None


class DilationRecord(BaseModel):
    """Kraus path versus dilation path for one readout sector"""

    g: float
    theta: float
    sector: str
    weight_kraus: float
    weight_dilation: float
    weight_diff: float
    fidelity: Optional[float] = None


class SweepRow(BaseModel):
    """Grid point (kind=grid) or boundary point (kind=boundary)"""

    kind: str = "grid"
    g: float
    theta: Optional[float] = None
    status: str = STATUS_OK
    c_closed: Optional[float] = None
    c_numeric: Optional[float] = None
    gamma_closed: Optional[float] = None
    gamma_numeric: Optional[float] = None
    p_bell: Optional[float] = None


class SweepSpec(BaseModel):
    """Rectangular (g, theta) grid and the quantities to emit"""

    g_min: float = Field(0.0, ge=0.0, le=1.0)
    g_max: float = Field(1.0, ge=0.0, le=1.0)
    g_steps: int = Field(50, ge=2)
    theta_min: float = Field(0.0, ge=0.0, le=2.0 * np.pi)
    theta_max: float = Field(np.pi, ge=0.0, le=2.0 * np.pi)
    theta_steps: int = Field(50, ge=2)
    concurrence: bool = True
    gamma: bool = True
    p_bell: bool = True
    boundary: bool = True

    @model_validator(mode="after")
    def _ordered_ranges(self) -> "SweepSpec":
        if self.g_min > self.g_max:
            raise ValueError("g_min must not exceed g_max")
        if self.theta_min > self.theta_max:
            raise ValueError("theta_min must not exceed theta_max")
        return self

    @classmethod
    def from_grid(cls, grid: str, degrees: bool = False, **outputs) -> "SweepSpec":
        """Parse 'g0:g1:n,t0:t1:m'; with `degrees` the theta range is read in degrees"""
        try:
            g_part, theta_part = grid.split(",")
            g_min, g_max, g_steps = g_part.split(":")
            theta_min, theta_max, theta_steps = theta_part.split(":")
        except ValueError:
            raise ValueError(f"grid must look like g0:g1:n,t0:t1:m, got {grid!r}") from None
        return cls(
            g_min=float(g_min), g_max=float(g_max), g_steps=int(g_steps),
            theta_min=_angle(theta_min, degrees), theta_max=_angle(theta_max, degrees), theta_steps=int(theta_steps),
            **outputs,
        )

    def g_values(self) -> np.ndarray:
        return np.linspace(self.g_min, self.g_max, self.g_steps)

    def theta_values(self) -> np.ndarray:
        return np.linspace(self.theta_min, self.theta_max, self.theta_steps)

    def columns(self) -> List[str]:
        """Output columns in emission order"""
        columns = ["kind", "g", "theta", "status"]
        if self.concurrence:
            columns += ["c_closed", "c_numeric"]
        if self.gamma:
            columns += ["gamma_closed", "gamma_numeric"]
        if self.p_bell:
            columns += ["p_bell"]
        return columns


def sector_fields(prefix: str) -> Tuple[str, str, str, str]:
    """Per-sector field names in (+,+), (+,-), (-,+), (-,-) order"""
    return tuple(f"{prefix}_{name}" for name in ("pp", "pm", "mp", "mm"))

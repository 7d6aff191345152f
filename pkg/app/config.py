"""Configuration settings for histkit"""

import os
from functools import lru_cache
from typing import Optional

from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings"""

    # Parallelism
    HISTKIT_THREADS: int = Field(0, description="Worker threads for grid sweeps (0 = auto)")

    # Verification defaults
    DEFAULT_SEED: int = Field(12345, description="Seed used by `verify` when --seed is omitted")
    DEFAULT_TRIALS: int = Field(50, description="Random configurations per randomized suite")

    # Development settings
    DEBUG: bool = Field(False, description="Debug mode")
    LOG_LEVEL: str = Field("INFO", description="Logging level")

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    @field_validator("HISTKIT_THREADS")
    @classmethod
    def _threads_not_negative(cls, value: int) -> int:
        if value < 0:
            raise ValueError("HISTKIT_THREADS must be >= 0")
        return value

    def worker_count(self, override: Optional[int] = None) -> int:
        """Resolve the effective number of sweep workers"""
        threads = self.HISTKIT_THREADS if override is None else override
        if threads <= 0:
            return os.cpu_count() or 1
        return threads


class Tolerances(BaseModel, frozen=True):
    """Numerical tolerances shared by every module (max-norm unless stated)"""

    hermitian: float = Field(1e-12, description="|M - M^H| bound for density matrices")
    herm_eig_input: float = Field(1e-10, description="|H - H^H| accepted by herm_eig")
    psd_clamp: float = Field(1e-10, description="negative eigenvalues above -psd_clamp are round-off")
    not_psd: float = Field(1e-8, description="eigenvalues below -not_psd reject a PSD input")
    eigen_floor: float = Field(1e-12, description="|eigenvalue| below this is treated as exactly 0")
    trace: float = Field(1e-12, description="trace vs stored weight of a density")
    norm: float = Field(1e-12, description="state / amplitude normalization")
    axis_norm: float = Field(1e-12, description="unit-length check for measurement axes")
    unitary: float = Field(1e-10, description="|U^H U - I| accepted as unitary")
    degenerate_weight: float = Field(1e-14, description="postselection weight treated as zero")
    colinearity: float = Field(1e-9, description="normalized determinant threshold for colinearity")
    eigenstate_overlap: float = Field(1e-12, description="1 - overlap accepted as an eigenstate")
    arccos_clamp: float = Field(1e-12, description="arccos argument overshoot clamped silently")
    parameter: float = Field(1e-12, description="slack on g, theta and J tau domain checks")


@lru_cache
def get_settings() -> Settings:
    """Settings read from the environment on first use"""
    return Settings()


# Global instances
tolerances = Tolerances()

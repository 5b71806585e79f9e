"""
Application Configuration
"""

from pydantic_settings import BaseSettings
from pydantic import field_validator, ConfigDict


class Settings(BaseSettings):
    """Toolkit settings"""
    
    model_config = ConfigDict(
        env_prefix="KNNADV_",
        env_file=".env",
        case_sensitive=False,
        env_file_encoding="utf-8"
    )
    
    # Logging
    log_level: str = "INFO"
    
    # Harness
    workers: int = 1
    default_seed: int = 0
    
    # Oracle
    qp_tol: float = 1e-10
    oracle_max_cells: int = 1_000_000
    oracle_push: float = 1e-7
    
    # Reports
    toolkit_version: str = "1.0.0"
    
    @field_validator("workers")
    @classmethod
    def validate_workers(cls, v: int) -> int:
        if v < 1:
            raise ValueError("workers must be at least 1")
        return v
    
    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level: {v}")
        return level


settings = Settings()

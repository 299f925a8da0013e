from pydantic_settings import BaseSettings
from typing import Optional
from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()

class Settings(BaseSettings):
    PROJECT_NAME: str = "neel-lab"
    VERSION: str = "1.0.0"

    # Quadrature
    QUAD_ABS_TOL: float = float(os.getenv("QUAD_ABS_TOL", "1e-11"))
    QUAD_REL_TOL: float = float(os.getenv("QUAD_REL_TOL", "1e-10"))
    QUAD_MAX_SUBDIVISIONS: int = 2000
    QUAD_SINGULARITY_SPLIT: float = 1e-3
    # QUADPACK flags roundoff on tight requests even when the estimate is close
    QUAD_ROUNDOFF_SLACK: float = 1e3

    # Root finding
    ROOT_TOL: float = 1e-13
    ROOT_MONOTONICITY_SAMPLES: int = 3

    # Density of states interpolant
    DOS_INTERPOLANT_NODES: int = 256
    DOS_INTERPOLANT_MAX_ERROR: float = 1e-8

    # BCS curve
    BCS_CURVE_NODES: int = 97
    BCS_Y_MAX: float = 0.95
    BCS_CURVE_MAX_ERROR: float = 1e-7

    # Golden tolerances
    GOLDEN_DIR: str = "golden"
    GOLDEN_FILE: str = "tolerances.csv"
    GOLDEN_SLACK: float = 1.5

    # CLI output
    SWEEP_WORKERS: int = 1
    CSV_FLOAT_FORMAT: str = "%.11e"

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE: Optional[str] = None

    class Config:
        case_sensitive = True
        env_file = ".env"

    def golden_path(self) -> Path:
        """Golden file location; NEEL_LAB_GOLDEN wins over the configured directory"""
        directory = os.getenv("NEEL_LAB_GOLDEN", self.GOLDEN_DIR)
        return Path(directory) / self.GOLDEN_FILE

settings = Settings()

from functools import lru_cache
from typing import Any, Literal

from pydantic import model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from snm.core.path_conf import BASE_PATH


class Settings(BaseSettings):
    """Global configuration"""

    model_config = SettingsConfigDict(
        env_file=f'{BASE_PATH}/.env',
        env_file_encoding='utf-8',
        env_prefix='SNM_',
        extra='ignore',
        case_sensitive=True,
    )

    # .env Current environment
    ENVIRONMENT: Literal['dev', 'prod'] = 'dev'

    # Quadrature
    QUADRATURE_REL_TOL: float = 1e-10
    QUADRATURE_ABS_TOL: float = 1e-12
    QUADRATURE_MAX_SUBDIVISIONS: int = 500
    QUADRATURE_TRANSFORM: Literal['rational_map', 'log_map', 'none_with_truncation'] = 'rational_map'
    # equal parts of the mapped λ range the engine integral starts from
    ENGINE_INITIAL_INTERVALS: int = 16

    # Distributions
    DISCRETE_TAIL_MASS: float = 1e-16
    LOGNORMAL_GRID_POINTS: int = 4001
    LOGNORMAL_GRID_HALF_WIDTH: float = 12.0
    PARETO_PPF_ITERATIONS: int = 64

    # Quasi-Monte Carlo
    QMC_LOG2_POINTS: int = 14
    QMC_SCRAMBLES: int = 8
    QMC_SEED: int = 20240917
    THEIL_QMC_LOG2_POINTS: int = 11

    # Oracle
    ORACLE_BATCH_SIZE: int = 100_000
    ORACLE_MIN_ACCEPTANCE: float = 1e-4
    ENUMERATION_MAX_OUTCOMES: int = 5_000_000
    XI1_REFERENCE_SAMPLES: int = 10_000_000
    XI1_REFERENCE_SEED: int = 7

    # Estimators
    PARETO_FIT_FLOOR: float = 1 + 1e-6
    PARETO_MOM_MIN_MEAN: float = 1 + 1e-9
    BIAS_GRID_NODES: int = 64
    BIAS_GRID_MIN: float = 1.01
    BIAS_GRID_MAX: float = 50.0

    # Experiments
    WORKERS: int = 1
    DEFAULT_REPLICATIONS: int = 100_000
    DEFAULT_SEED: int = 2024

    # Logging
    LOG_FORMAT: str = '<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</> | <lvl>{level: <8}</> | <cyan>{extra[run]}</> | <lvl>{message}</>'

    # Logging (console)
    LOG_STD_LEVEL: str = 'INFO'

    # Logging (file)
    LOG_FILE_LEVEL: str = 'INFO'
    LOG_FILE_ERROR_LEVEL: str = 'ERROR'
    LOG_FILENAME: str = 'snm.log'
    LOG_ERROR_FILENAME: str = 'snm_error.log'

    @model_validator(mode='before')
    @classmethod
    def check_env(cls, values: Any) -> Any:
        """Check environment variables"""
        if values.get('ENVIRONMENT') == 'prod':
            values.setdefault('LOG_STD_LEVEL', 'WARNING')

        return values


@lru_cache
def get_settings() -> Settings:
    """Get global configuration singleton"""
    return Settings()


# Create global configuration instance
settings = get_settings()

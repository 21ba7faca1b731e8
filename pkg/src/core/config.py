"""
Centralized configuration management for selmut

Provides type-safe configuration using Pydantic. Every tolerance the
numerical modules use lives here, so tests and scenario runs share one
source of truth instead of scattered module constants.
"""

from functools import lru_cache
from pydantic import BaseModel, Field


class NumericsConfig(BaseModel):
    """Floating-point tolerances and solver limits"""
    merge_tolerance: float = Field(
        default=1e-12,
        description="Atoms closer than merge_tolerance * max(1, M) are identified"
    )
    probability_tolerance: float = Field(
        default=1e-9,
        description="|total mass - 1| allowed for a probability measure"
    )
    component_slack: float = Field(
        default=1e-12,
        description="Slack for atomwise component and dominance comparisons"
    )
    levy_accuracy: float = Field(
        default=1e-9,
        description="Absolute accuracy of the Levy distance bisection"
    )
    root_residual: float = Field(
        default=1e-12,
        description="Residual of the limit equations accepted at a root"
    )
    root_max_iterations: int = Field(
        default=200,
        description="Iteration cap for every bracketed root search"
    )
    cycle_time_rtol: float = Field(
        default=1e-12,
        description="Relative Newton step on the Lenski cycle time that ends the search"
    )
    cycle_time_residual: float = Field(
        default=1e-10,
        description="Residual of log E[e^{tX}] - log gamma accepted"
    )
    degenerate_mean: float = Field(
        default=1e-300,
        description="Mean fitness at or below this is treated as zero"
    )
    exp_overflow: float = Field(
        default=700.0,
        description="Largest exponent t*x evaluated before signalling overflow"
    )
    denominator_guard: float = Field(
        default=1e-15,
        description="Limit-equation denominators at or below this are singular"
    )


class StoppingDefaults(BaseModel):
    """Default trajectory stopping rule"""
    max_iterations: int = Field(default=100_000, description="Maximum number of steps")
    tv_tolerance: float = Field(
        default=1e-12,
        description="Stop once TV(p_i, p_{i+1}) drops below this"
    )


class VerifyConfig(BaseModel):
    """Verification suite defaults"""
    violation_tolerance: float = Field(
        default=1e-10,
        description="Absolute violation accepted by property checks"
    )
    assumption3_slack: float = Field(
        default=1e-3,
        description="Slack on monotonicity of the truncated-limit distances"
    )
    assumption3_final_bound: float = Field(
        default=2e-3,
        description="Largest accepted distance at the last truncation point"
    )
    n_pairs: int = Field(default=1000, description="Dominated pairs per suite")
    n_coupling_pairs: int = Field(default=100, description="Coupled trajectory pairs")
    coupling_steps: int = Field(default=200, description="Steps per coupled run")
    n_recursion_scenarios: int = Field(default=50, description="Atom-mass oracle runs")
    recursion_steps: int = Field(default=200, description="Steps per oracle run")
    n_fixed_point_cases: int = Field(default=20, description="Seeded limits checked as fixed points")
    grid_size: int = Field(default=21, description="Grid points for s(x, .) checks")


class LoggingConfig(BaseModel):
    """Logging configuration"""
    file_level: str = Field(
        default="DEBUG",
        description="File log level (more detailed)"
    )
    console_level: str = Field(
        default="INFO",
        description="Console log level (less detailed)"
    )
    log_file: str = Field(
        default="selmut.log",
        description="Log file name, placed in the output directory"
    )


class Settings(BaseModel):
    """
    Main application settings.

    All values are explicit code defaults; nothing is read from the
    environment. Use get_settings() to get the cached instance.
    """
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    stopping: StoppingDefaults = Field(default_factory=StoppingDefaults)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance.

    Returns:
        Settings instance

    Example:
        >>> from src.core.config import get_settings
        >>> get_settings().numerics.root_residual
        1e-12
    """
    return Settings()


def reset_settings():
    """
    Reset cached settings (useful for testing).

    Example:
        >>> reset_settings()
        >>> settings = get_settings()  # Fresh defaults
    """
    get_settings.cache_clear()

"""Energy-efficiency analysis of active and passive reconfigurable intelligent surfaces."""

__version__ = "0.1.0"

from risee.params import (  # noqa: E402
    ConfigError, LinkGeometry, PathLoss, RayleighParams, Scenario, SystemConfig,
    dbm_to_watts, default_scenario, load_config, path_loss, watts_to_dbm,
)

__all__ = [
    "ConfigError", "LinkGeometry", "PathLoss", "RayleighParams", "Scenario", "SystemConfig",
    "dbm_to_watts", "default_scenario", "load_config", "path_loss", "watts_to_dbm",
    "__version__",
]

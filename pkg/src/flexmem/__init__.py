"""Electromechanical and microwave simulator for a four-state
free-membrane capacitive switch and the 24 GHz SPDT built from it."""

from .device import (DeviceConfig, EVEN, ODD, REST, RESTORE, default_config,
                     default_config_path, electrodes_for, load_config,
                     mirror_config, remove_arms, remove_wings, serialize,
                     validate, width_at)
from .beam import build_mesh
from .electrostatics import pull_in_lumped
from .solver import (build_context, self_actuation_margin, solve_modal,
                     solve_pull_in, solve_static, solve_transient,
                     thermal_check)
from .rf import build_spdt, metrics, metrics_at, solve_sparams, touchstone

__version__ = "0.1.0"

__all__ = [
    "DeviceConfig", "REST", "ODD", "EVEN", "RESTORE",
    "default_config", "default_config_path", "electrodes_for", "load_config",
    "mirror_config", "remove_arms", "remove_wings", "serialize", "validate",
    "width_at", "build_mesh", "pull_in_lumped", "build_context",
    "self_actuation_margin", "solve_modal", "solve_pull_in", "solve_static",
    "solve_transient", "thermal_check", "build_spdt", "metrics", "metrics_at",
    "solve_sparams", "touchstone", "__version__",
]

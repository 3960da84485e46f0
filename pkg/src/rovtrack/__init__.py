import importlib.metadata

from rovtrack.controller import AdaptationConfig, AdaptationMode, Gains
from rovtrack.dynamics import Vehicle
from rovtrack.fuzzy import FuzzySystem, RuleBase
from rovtrack.params import VehicleParams
from rovtrack.pso import PsoConfig, TuningConfig, pso_minimize, tune_gains
from rovtrack.simulation import DisturbanceModel, IntegratorConfig, SimConfig, SimLog, run

__version__ = importlib.metadata.version("rovtrack")

__all__ = [
    "AdaptationConfig",
    "AdaptationMode",
    "DisturbanceModel",
    "FuzzySystem",
    "Gains",
    "IntegratorConfig",
    "PsoConfig",
    "RuleBase",
    "SimConfig",
    "SimLog",
    "TuningConfig",
    "Vehicle",
    "VehicleParams",
    "__version__",
    "pso_minimize",
    "run",
    "tune_gains",
]

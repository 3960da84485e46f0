import numpy as np
import pytest
from rich.console import Console

from rovtrack.controller import AdaptationConfig, AdaptationMode, Gains
from rovtrack.dynamics import Vehicle
from rovtrack.params import VehicleParams
from rovtrack.printer import Printer
from rovtrack.simulation import DisturbanceModel, IntegratorConfig, SimConfig
from rovtrack.trajectory import CustomHold
from rovtrack.workbench import Workbench


@pytest.fixture(name="params", scope="session")
def params_fixture() -> VehicleParams:
    return VehicleParams.bluerov2_heavy()


@pytest.fixture(name="vehicle", scope="session")
def vehicle_fixture(params: VehicleParams) -> Vehicle:
    return Vehicle.from_params(params)


@pytest.fixture(name="neutral_params", scope="session")
def neutral_params_fixture(params: VehicleParams) -> VehicleParams:
    """BlueROV2 with the centre of buoyancy moved onto the centre of gravity."""
    return params.model_copy(update={"cob": [0.0, 0.0, 0.0]})


@pytest.fixture(name="rng")
def rng_fixture() -> np.random.Generator:
    return np.random.default_rng(7)


@pytest.fixture(name="published_gains")
def published_gains_fixture() -> Gains:
    return Gains.published()


@pytest.fixture(name="short_config")
def short_config_fixture() -> SimConfig:
    return SimConfig(integrator=IntegratorConfig(dt=0.01, tf=1.0))


@pytest.fixture(name="hold_config")
def hold_config_fixture() -> SimConfig:
    return SimConfig(
        trajectory=CustomHold(),
        disturbance=DisturbanceModel.zero(),
        adaptation=AdaptationConfig(mode=AdaptationMode.BASELINE),
        integrator=IntegratorConfig(dt=0.01, tf=1.0),
    )


@pytest.fixture(name="console")
def console_fixture() -> Console:
    return Console(width=160)


@pytest.fixture(name="printer")
def printer_fixture(console: Console) -> Printer:
    return Printer(console=console)


@pytest.fixture(name="workbench")
def workbench_fixture(printer: Printer) -> Workbench:
    return Workbench(printer=printer)

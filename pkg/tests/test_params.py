import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from rovtrack.errors import ConfigError
from rovtrack.params import VehicleParams


class TestVehicleParams:
    def test_builtin_bluerov2_matches_published_values(self, params: VehicleParams) -> None:
        assert params.m == 13.5
        assert params.volume == 0.0135
        assert (params.ix, params.iy, params.iz) == (0.26, 0.23, 0.37)
        assert params.cob == [0.0, 0.0, -0.01]
        assert params.added_mass == [6.357, 7.121, 18.69, 0.1858, 0.1348, 0.2215]
        assert params.d_lin == [13.7, 0.0, 33.0, 0.0, 0.8, 0.0]
        assert params.d_quad == [141.0, 217.0, 190.0, 1.192, 0.47, 1.5]

    def test_bluerov2_is_neutrally_buoyant(self, params: VehicleParams) -> None:
        assert params.weight == pytest.approx(params.buoyancy, rel=1e-12)

    def test_inertia_aliases(self) -> None:
        params = VehicleParams(
            m=1.0,
            volume=0.001,
            Ix=1.0,
            Iy=2.0,
            Iz=3.0,
            added_mass=[0.0] * 6,
            d_lin=[0.0] * 6,
            d_quad=[0.0] * 6,
        )
        assert (params.ix, params.iy, params.iz) == (1.0, 2.0, 3.0)
        assert params.rho == 1000.0
        assert params.g0 == 9.81

    def test_negative_damping_raises_validation_error(self, params: VehicleParams) -> None:
        params_dict = params.model_dump(by_alias=True)
        params_dict["d_quad"] = [-1.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        with pytest.raises(ValidationError, match="non-negative"):
            VehicleParams(**params_dict)

    def test_non_positive_mass_raises_validation_error(self, params: VehicleParams) -> None:
        params_dict = params.model_dump(by_alias=True)
        params_dict["m"] = 0.0
        with pytest.raises(ValidationError):
            VehicleParams(**params_dict)

    def test_load_round_trip(self, params: VehicleParams, tmp_path: Path) -> None:
        filepath = tmp_path / "vehicle.json"
        filepath.write_text(params.model_dump_json(by_alias=True))
        assert VehicleParams.load(filepath) == params

    def test_load_missing_file_raises_config_error(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="not found"):
            VehicleParams.load(tmp_path / "missing.json")

    def test_load_malformed_file_raises_config_error(self, tmp_path: Path) -> None:
        filepath = tmp_path / "vehicle.json"
        filepath.write_text('{"m": 13.5,\n  "volume": }')
        with pytest.raises(ConfigError, match="line 2"):
            VehicleParams.load(filepath)

    def test_load_unknown_key_raises_config_error(self, params: VehicleParams, tmp_path: Path) -> None:
        params_dict = params.model_dump(by_alias=True)
        params_dict["mass"] = 13.5
        filepath = tmp_path / "vehicle.json"
        filepath.write_text(json.dumps(params_dict))
        with pytest.raises(ConfigError, match="mass"):
            VehicleParams.load(filepath)

    def test_unknown_builtin_raises_config_error(self) -> None:
        with pytest.raises(ConfigError, match="Unknown builtin vehicle"):
            VehicleParams.builtin("nautilus")

import json
import math

import numpy as np
import pytest

from qbmsim import ConfigError
from qbmsim.config import (
    compare_config_from_dict,
    load_config_dict,
    model_spec_from_dict,
    negativity_config_from_dict,
    run_config_from_dict,
    sweep_config_from_dict,
)
from qbmsim.io import format_float, write_timeseries_csv
from qbmsim.thermo import CSV_COLUMNS, ThermoRecord


TOML_DOC = """
[model]
n_modes = 30
omega0 = 1.0
omega_max = 6.0
gamma = 0.25
temperature = 2.0

[model.drive]
f0 = 4.0
omega_f = 1.1
t_f = 8.0

[run]
n_points = 50
observables = ["thermo", "decomposition"]
format = "csv"
threads = 2
"""

JSON_DOC = json.dumps(
    {
        "model": {"n_modes": 30, "omega_max": 6.0, "gamma": 0.25, "temperature": 2.0,
                  "drive": {"f0": 4.0, "omega_f": 1.1, "t_f": 8.0}},
        "run": {"n_points": 50, "observables": ["thermo", "decomposition"], "format": "csv",
                "threads": 2},
    }
)


class TestConfigLoading:
    def test_toml_and_json_agree(self, tmp_path):
        toml_path = tmp_path / "run.toml"
        toml_path.write_text(TOML_DOC)
        json_path = tmp_path / "run.json"
        json_path.write_text(JSON_DOC)
        cfg_toml = run_config_from_dict(load_config_dict(toml_path))
        cfg_json = run_config_from_dict(load_config_dict(json_path))
        assert cfg_toml.spec == cfg_json.spec
        assert cfg_toml.n_points == cfg_json.n_points == 50
        assert cfg_toml.observables == frozenset({"thermo", "decomposition"})

    def test_t_f_converted_to_envelope_frequency(self):
        spec = model_spec_from_dict({"drive": {"f0": 1.0, "t_f": 8.0}})
        assert spec.drive.omega_env == pytest.approx(math.pi / 8.0)
        assert spec.drive.t_f == pytest.approx(8.0)

    def test_default_pulse_duration_is_half_recurrence(self):
        spec = model_spec_from_dict({"n_modes": 400, "omega_max": 40.0})
        assert spec.drive.t_f == pytest.approx(10 * math.pi)

    def test_defaults_mirror_reference_setup(self):
        spec = model_spec_from_dict({})
        assert spec.n_modes == 400
        assert spec.omega_max == spec.cutoff == 40.0
        assert spec.temperature == 10.0

    def test_cutoff_defaults_to_omega_max(self):
        spec = model_spec_from_dict({"omega_max": 12.0})
        assert spec.cutoff == 12.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config_dict(tmp_path / "absent.toml")

    def test_unparseable(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("[model\nn_modes = ")
        with pytest.raises(ConfigError):
            load_config_dict(path)

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError):
            model_spec_from_dict({"n_mode": 4})
        with pytest.raises(ConfigError):
            run_config_from_dict({"run": {"points": 10}})
        with pytest.raises(ConfigError):
            run_config_from_dict({"rnu": {}})

    def test_bad_types_rejected(self):
        with pytest.raises(ConfigError):
            model_spec_from_dict({"n_modes": 4.5})
        with pytest.raises(ConfigError):
            model_spec_from_dict({"gamma": "strong"})
        with pytest.raises(ConfigError):
            run_config_from_dict({"run": {"observables": "thermo"}})

    def test_invalid_observable(self):
        with pytest.raises(ConfigError):
            run_config_from_dict({"run": {"observables": ["entropy"]}})

    def test_sweep_grids(self):
        cfg = sweep_config_from_dict(
            {"sweep": {"gamma": {"min": 0.0, "max": 2.0, "count": 5},
                       "temperature": [0.5, 1.0]}}
        )
        assert np.allclose(cfg.gammas, np.linspace(0, 2, 5))
        assert np.allclose(cfg.temperatures, [0.5, 1.0])

    def test_sweep_defaults(self):
        cfg = sweep_config_from_dict({})
        assert cfg.gammas.size == 60 and cfg.temperatures.size == 60
        assert cfg.gammas.max() == 2.0 and cfg.temperatures.max() == 5.0

    def test_negativity_config(self):
        cfg = negativity_config_from_dict(
            {"negativity": {"parameter": "gamma", "values": [0.1, 0.5]}}
        )
        assert cfg.parameter == "gamma" and cfg.values == (0.1, 0.5)
        with pytest.raises(ConfigError):
            negativity_config_from_dict({"negativity": {"parameter": "drive"}})

    def test_compare_config(self):
        cfg = compare_config_from_dict({"compare": {"gammas": [0.2, 0.02]}})
        assert cfg.gammas == (0.2, 0.02)
        with pytest.raises(ConfigError):
            compare_config_from_dict({"compare": {"gammas": []}})


def _record(t=0.0, elb=0.0):
    return ThermoRecord(
        t=t, S_S=0.1, S_E=0.2, S_SE=0.3, dS_Spohn=0.0, dS_DL=0.0, dS_ELB=elb,
        heat_standard=0.0, heat_ELB=0.0, I_SE=elb / 3, I_env=elb / 3, D_env=elb / 3,
        delta=0.0, epsilon=float("nan"), E_N=0.0, U_S=0.5, U_E=1.0,
    )


class TestWriters:
    def test_header_and_precision(self, tmp_path):
        path = tmp_path / "out.csv"
        write_timeseries_csv(path, [_record(), _record(t=1 / 3, elb=math.pi * 1e-5)])
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        fields = lines[2].split(",")
        assert fields[0] == "0.33333333333333331"
        assert float(fields[CSV_COLUMNS.index("dS_ELB")]) == pytest.approx(math.pi * 1e-5, rel=1e-16)
        assert fields[CSV_COLUMNS.index("epsilon")] == "nan"

    def test_format_float_roundtrip(self):
        for x in (1 / 3, math.pi, 1e-300, -2.5e17):
            assert float(format_float(x)) == x
        assert format_float(float("nan")) == "nan"

    def test_writer_revalidates(self, tmp_path):
        from qbmsim import StabilityError

        bad = _record(elb=-1e-3)
        with pytest.raises(StabilityError):
            write_timeseries_csv(tmp_path / "bad.csv", [bad])

import pytest

from solarshare.config import load_bundled_config, load_config, parse_config, parse_load_file
from solarshare.errors import ValidationError
from solarshare.loads import LOAD1, LOAD2, total_power
from solarshare.pv import load_bundled_profile


def test_empty_config_is_all_defaults():
    cfg = parse_config("")
    assert total_power(cfg.load1) == 930.0
    assert total_power(cfg.load2) == 870.0
    assert cfg.controller.threshold == 50.0
    assert cfg.controller.hysteresis == 0.0
    assert cfg.dt == 60.0
    assert (cfg.battery1.nominal_voltage, cfg.battery1.nominal_capacity) == (12.0, 200.0)
    assert cfg.profile1 == load_bundled_profile() == cfg.profile2
    assert cfg.temperature_mode == "model"


def test_threshold_override():
    assert parse_config("controller.threshold = 60").controller.threshold == 60.0


def test_comments_and_blank_lines():
    cfg = parse_config("\n# header\ndt_s = 30   # half a minute\n\n")
    assert cfg.dt == 30.0


@pytest.mark.parametrize(
    "text, key, line",
    [
        ("dt_s = 0", "dt_s", 1),
        ("\nbattery1.capacity_ah = -5", "battery1.capacity_ah", 2),
        ("battery2.initial_soc = 120", "battery2.initial_soc", 1),
        ("controller.threshold = 100", "controller.threshold", 1),
        ("controller.hysteresis = -1", "controller.hysteresis", 1),
        ("thermal.relax_rate = -1", "thermal.relax_rate", 1),
        ("duration_s = -60", "duration_s", 1),
        ("profile1.current_scale = -1", "profile1.current_scale", 1),
    ],
)
def test_invariant_violation_names_key_and_line(text, key, line):
    with pytest.raises(ValidationError) as err:
        parse_config(text)
    assert err.value.key == key
    assert err.value.line == line
    assert key in str(err.value)


@pytest.mark.parametrize(
    "text, key",
    [
        ("dt_s = fast", "dt_s"),
        ("dt_s = nan", "dt_s"),
        ("battery9.capacity_ah = 1", "battery9.capacity_ah"),
        ("temperature_mode = sometimes", "temperature_mode"),
        ("load1.appliances = Fridge:lots", "load1.appliances"),
    ],
)
def test_bad_values(text, key):
    with pytest.raises(ValidationError) as err:
        parse_config(text)
    assert err.value.key == key
    assert err.value.line == 1


def test_malformed_line_and_duplicate():
    with pytest.raises(ValidationError) as err:
        parse_config("dt_s 60")
    assert err.value.line == 1
    with pytest.raises(ValidationError) as err:
        parse_config("dt_s = 60\ndt_s = 30")
    assert err.value.line == 2


def test_inline_loads_and_label():
    cfg = parse_config("load1.appliances = Fridge:150*2\nload2.appliances =\nload2.label = spare")
    assert total_power(cfg.load1) == 300.0
    assert total_power(cfg.load2) == 0.0
    assert cfg.load2.label == "spare"


def test_file_and_inline_conflict():
    with pytest.raises(ValidationError):
        parse_config("load1.file = bundled:load1.cfg\nload1.appliances = Fridge:1")


def test_relative_files(tmp_path):
    (tmp_path / "pv.csv").write_text("time_h,voltage_v,current_a,temp_c\n8,12,10,25\n")
    (tmp_path / "bank.cfg").write_text("label = shed\nappliances = Pump:250*2\n")
    cfg_path = tmp_path / "run.cfg"
    cfg_path.write_text("profile2.file = pv.csv\nload2.file = bank.cfg\nprofile2.current_scale = 0.5\n")
    cfg = load_config(cfg_path)
    assert cfg.profile2[0].current == 5.0
    assert cfg.load2.label == "shed" and total_power(cfg.load2) == 500.0


def test_missing_profile_file(tmp_path):
    with pytest.raises(ValidationError) as err:
        parse_config("profile1.file = nowhere.csv", base_dir=tmp_path)
    assert err.value.key == "profile1.file"


def test_bad_profile_file_reports_location():
    with pytest.raises(ValidationError) as err:
        parse_config("profile1.file = bundled:load1.cfg")
    assert err.value.key == "profile1.file"


def test_missing_config_is_os_error(tmp_path):
    with pytest.raises(OSError):
        load_config(tmp_path / "absent.cfg")


def test_bundled_load_files():
    from importlib.resources import files

    data = files("solarshare.data")
    assert parse_load_file(data.joinpath("load1.cfg").read_text()).appliances == LOAD1.appliances
    assert parse_load_file(data.joinpath("load2.cfg").read_text()).appliances == LOAD2.appliances


def test_load_file_unknown_key():
    with pytest.raises(ValidationError):
        parse_load_file("colour = red")


def test_bundled_default_config():
    cfg = load_bundled_config()
    assert cfg.battery1.initial_soc == 90.0 and cfg.battery2.initial_soc == 75.0
    assert cfg.duration == 21600.0 and cfg.n_steps == 360

import math
import subprocess
import sys

import pytest

from risbeam.cli import build_parser, main
from risbeam.config import KEYS, build_spec, load_spec, parse_config_text
from risbeam.errors import ConfigurationError
from risbeam.geometry import BeamMode

FULL = """\
# reduced rate experiment
n_t=32
n_r=1
m_y=8
m_z=8
r_bs=8
r_ue=1
q=16
rounds=4
branching=2
rician_br_db=13.2
rician_ru_db=13.2
nlos_paths_br=3
nlos_paths_ru=3
on_grid=false
snr_db_list=-15,-10,-5,0,5
methods=full-csi,exhaustive,multidirectional,hierarchical
trials=2000
ris_beam_mode=amplitude
hier_budget_slots=1024
"""


def test_every_key_parses():
    values = parse_config_text(FULL)
    assert set(values) == KEYS
    assert values["snr_db_list"] == (-15.0, -10.0, -5.0, 0.0, 5.0)
    assert values["on_grid"] is False
    spec = build_spec("rate-curve", values)
    assert spec.system.m == 64 and spec.system.ris_beam_mode is BeamMode.AMPLITUDE
    assert spec.trials == 2000 and spec.hier_budget_slots == 1024
    assert spec.channel.rician_br_db == 13.2


@pytest.mark.parametrize("text", ["n_tt=4\n", "n_t=4\nn_t=8\n", "n_t\n", "on_grid=maybe\n", "n_t=four\n", "ris_beam_mode=analog\n"])
def test_bad_config_rejected(text):
    with pytest.raises(ConfigurationError):
        parse_config_text(text)


def test_unknown_method_rejected():
    with pytest.raises(ConfigurationError):
        build_spec("ba-prob", {"methods": ("exhaustive", "magic")})


def test_grid_default_depends_on_kind():
    assert build_spec("ba-prob", {}).channel.on_grid
    assert not build_spec("rate-curve", {}).channel.on_grid


def test_overrides_win(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("trials=50\n", encoding="utf-8")
    assert load_spec("ba-prob", path).trials == 50
    assert load_spec("ba-prob", path, trials=7).trials == 7


def test_noiseless_sounding():
    s = build_spec("ba-prob", {}, noiseless=True).sounding(3.0)
    assert s.noiseless and s.noise_var == 0.0
    assert build_spec("ba-prob", {}).sounding(10.0).noise_var == pytest.approx(0.1)


def test_parser_flags():
    args = build_parser().parse_args(
        ["ba-prob", "--config", "x.cfg", "--seed", "18446744073709551615", "--trials", "3", "--out", "o.csv", "--workers", "2", "--noiseless"]
    )
    assert args.seed == 2**64 - 1 and args.trials == 3 and args.workers == 2 and args.noiseless
    with pytest.raises(SystemExit):
        build_parser().parse_args(["ba-prob", "--seed", "-1"])
    with pytest.raises(SystemExit):
        build_parser().parse_args(["rate-curve", "--trials", "0"])


def test_cli_writes_csv(tmp_path, capsys):
    cfg = tmp_path / "toy.cfg"
    cfg.write_text("methods=exhaustive,multidirectional\n", encoding="utf-8")
    out = tmp_path / "out.csv"
    assert main(["ba-prob", "--config", str(cfg), "--trials", "20", "--noiseless", "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("method,n_t") and len(lines) == 3
    assert lines[1].startswith("exhaustive,8,4,8,4,2,2,3,inf,256,perfect_ba_rate,1,0,20")


def test_cli_predict_and_demo(capsys):
    assert main(["predict"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("lambda,p_union,p_poisson,required_L_for_target\n")
    assert main(["decode-demo", "--noiseless", "--seed", "3"]) == 0
    assert "decoded block (BS, RIS, UE) = (5, 4, 2)" in capsys.readouterr().out


def test_cli_reports_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("n_t=8\nspeed=3\n", encoding="utf-8")
    assert main(["ba-prob", "--config", str(bad)]) == 2
    assert "unknown key 'speed'" in capsys.readouterr().err
    empty = tmp_path / "empty.cfg"
    empty.write_text("snr_db_list=\n", encoding="utf-8")
    assert main(["rate-curve", "--config", str(empty), "--trials", "1"]) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "risbeam", "predict", "--target", "0.5"], capture_output=True, text=True, check=True)
    lam, p_union, p_poisson, needed = res.stdout.splitlines()[1].split(",")
    assert math.isclose(float(p_poisson), 0.70089, abs_tol=1e-5) and int(needed) >= 1

import configparser

import pytest

from safegame.cli import main
from safegame.game_model import TABLE_KEYS


def test_policy_command(tmp_path, capsys):
    assert main(["policy", "--config", "configs/type_c_policy.ini", "--out", str(tmp_path)]) == 0
    assert "PASS optimum_within_epsilon" in capsys.readouterr().out


def test_pareto_command(tmp_path):
    assert main(["pareto", "--config", "configs/type_b_pareto.ini", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "pareto.csv").read_text().splitlines()[0] == (
        "epsilon,status,pi_h,pi_a,exp_reward,exp_risk,branch,segment,attained")


def test_missing_config_exit_code(tmp_path, capsys):
    assert main(["trajectory", "--config", str(tmp_path / "nope.ini")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_risk_map_command(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[experiment]\nkind = risk_map\ngrid = 3\n[table]\npreset = type_a\n")
    assert main(["risk-map", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0


def test_gen_table(tmp_path):
    out = tmp_path / "gt"
    assert main(["gen-table", "--preset", "type_a", "--episodes", "200", "--seed", "3",
                 "--out", str(out)]) == 0
    parser = configparser.ConfigParser()
    parser.read(out / "table.ini")
    assert set(parser["table"]) == set(TABLE_KEYS)
    assert parser["provenance"]["seed"] == "3"
    assert parser["provenance"]["episodes_per_cell"] == "200"


def test_unclassifiable_table_fails(tmp_path):
    # zero hazard makes every risk zero, which no interaction type allows
    cfg = tmp_path / "d.ini"
    cfg.write_text("[driving]\npreset = type_a\nepisodes = 50\nkappa = 0\n")
    assert main(["gen-table", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1


def test_unknown_driving_parameter(tmp_path):
    bad = tmp_path / "e.ini"
    bad.write_text("[driving]\npreset = type_a\nwheels = 3\n")
    assert main(["gen-table", "--config", str(bad)]) == 2


def test_requires_subcommand():
    with pytest.raises(SystemExit):
        main([])

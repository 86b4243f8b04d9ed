from dyninfer.config import get_config, default_seed, SEED_ENV_VAR


def test_defaults_without_file(tmp_path):
    config = get_config(str(tmp_path / "none.cfg"))
    assert config.get('SOLVER', 'tie_break') == "myopic"
    assert config.getfloat('SOLVER', 'tie_tolerance') == 1e-9
    assert config.getint('ORACLE', 'strategy_limit') == 1000000
    assert config.getint('OUTPUT', 'json_digits') == 12


def test_file_overrides_defaults(tmp_path):
    filename = tmp_path / "run.cfg"
    filename.write_text("[SIMULATION]\nrollouts = 500  # fewer\n", encoding="utf-8")
    config = get_config(str(filename))
    assert config.getint('SIMULATION', 'rollouts') == 500
    assert config.getint('SIMULATION', 'seed') == 42


def test_local_file_wins(tmp_path):
    (tmp_path / "run.cfg").write_text("[SOLVER]\ntie_break = myopic\n", encoding="utf-8")
    (tmp_path / "run_local.cfg").write_text("[SOLVER]\ntie_break = first\n", encoding="utf-8")
    assert get_config(str(tmp_path / "run.cfg")).get('SOLVER', 'tie_break') == "first"


def test_seed_precedence(tmp_path, monkeypatch):
    filename = tmp_path / "run.cfg"
    filename.write_text("[SIMULATION]\nseed = 7\n", encoding="utf-8")
    config = get_config(str(filename))
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    assert default_seed(config) == 7
    monkeypatch.setenv(SEED_ENV_VAR, "99")
    assert default_seed(config) == 99

import json
import logging

import pytest

from heckepoly import cache
from heckepoly.cli import main
from heckepoly.config import CACHE_ENV, RunConfig, build_config, parse_config_text
from heckepoly.eigenform import delta_coefficients, save_table
from heckepoly.errors import InvalidArgument


@pytest.fixture
def run(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(CACHE_ENV, raising=False)

    def _run(*args):
        return main(list(args) + ["--cache-dir", "cache", "--output-dir", "out"])

    return _run


def test_parse_config_text():
    cfg = parse_config_text("# comment\nweight = 16\nprime-bound = 1e5  # inline\n\nmethod = lattice\n")
    assert cfg == {"weight": 16, "prime_bound": 100_000, "method": "lattice"}
    with pytest.raises(InvalidArgument):
        parse_config_text("colour = blue")
    with pytest.raises(InvalidArgument):
        parse_config_text("weight 12")
    with pytest.raises(InvalidArgument):
        parse_config_text("weight = twelve")


def test_precedence(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("weight = 16\ncache_dir = from-file\nr = 3\n")
    cfg = build_config(str(path), {"r": 4, "weight": None}, environ={CACHE_ENV: "from-env"})
    assert (cfg.weight, cfg.cache_dir, cfg.r) == (16, "from-env", 4)
    cfg = build_config(str(path), {"cache_dir": "from-flag"}, environ={CACHE_ENV: "from-env"})
    assert cfg.cache_dir == "from-flag"
    assert build_config(environ={}) == RunConfig()


@pytest.mark.parametrize("bad", [{"prime_bound": 50}, {"threads": -1}, {"limit": 0}])
def test_config_validation(bad):
    with pytest.raises(InvalidArgument):
        build_config(overrides=bad, environ={})


def test_n_threads():
    assert RunConfig(threads=3).n_threads == 3
    assert RunConfig(threads=0).n_threads >= 1


def test_eigenvalues_csv(run, tmp_path, capsys):
    assert run("eigenvalues", "--limit", "100") == 0
    rows = (tmp_path / "out" / "eigenvalues_w12_n100.csv").read_text().splitlines()
    n, a, lam = rows[2].split(",")
    assert (n, a) == ("2", "-24") and float(lam) == pytest.approx(-0.530330, abs=1e-6)
    out = capsys.readouterr().out
    assert "[PASS] hecke" in out and "[PASS] deligne" in out


def test_eigenvalues_single_row(run, tmp_path):
    assert run("eigenvalues", "--limit", "1") == 0
    rows = (tmp_path / "out" / "eigenvalues_w12_n1.csv").read_text().splitlines()
    assert rows == ["n,a,lambda", "1,1,1.0"]


def test_eigenvalues_json(run, tmp_path):
    assert run("eigenvalues", "--limit", "50", "--weight", "16", "--out", "json") == 0
    doc = json.loads((tmp_path / "out" / "eigenvalues_w16_n50.json").read_text())
    assert doc["a"][1] == "216"


def test_unsupported_weight(run, capsys):
    assert run("eigenvalues", "--weight", "14", "--limit", "10") == 2
    err = capsys.readouterr().err
    assert "14" in err and "(12, 16, 18, 20, 22, 26)" in err


def test_usage_errors(run):
    with pytest.raises(SystemExit) as exc:
        run("verify", "nothing")
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run("moments", "--method", "abacus")
    assert exc.value.code == 2
    assert run("moments", "--r", "0") == 2
    assert run("constant", "--prime-bound", "99") == 2


def test_resource_limit_exit(run, monkeypatch):
    monkeypatch.setattr("heckepoly.errors.DEFAULT_MEMORY_BUDGET", 1000)
    assert run("eigenvalues", "--limit", "100000") == 3


@pytest.mark.parametrize("target,limit", [("hecke", 10_000), ("chebyshev", 1000), ("deligne", 10_000)])
def test_verify_targets(run, target, limit):
    assert run("verify", target, "--limit", str(limit)) == 0


def test_verify_repidentity(run, tmp_path, capsys):
    assert run("verify", "repidentity", "--limit", "1000", "--out", "json") == 0
    assert "c = 16, 0 inconsistencies" in capsys.readouterr().out
    doc = json.loads((tmp_path / "out" / "verify_repidentity.json").read_text())
    assert doc["results"][0]["c"] == "16"


def test_verify_failure_exit(run, tmp_path, monkeypatch):
    import heckepoly.suites as suites

    monkeypatch.setattr(suites, "verify_hecke_range", lambda table, n: [(2, 3)])
    assert run("verify", "hecke", "--limit", "100") == 1


def test_moments_r1_from_one(run, tmp_path):
    assert run("moments", "--r", "1", "--checkpoint-start", "0", "--checkpoint-stop", "3") == 0
    rows = (tmp_path / "out" / "moments_r1_sieve_w12.csv").read_text().splitlines()
    assert rows[1] == "1,sieve,1,1.0,1.0"
    doc = json.loads((tmp_path / "out" / "moments_r1_sieve_w12.json").read_text())
    assert doc["note"] == "no main term (odd r)"
    assert "prediction" not in doc


def test_moments_r3_note(run, tmp_path):
    assert run("moments", "--r", "3", "--checkpoint-stop", "4") == 0
    doc = json.loads((tmp_path / "out" / "moments_r3_sieve_w12.json").read_text())
    assert doc["note"] == "no main term (odd r)"
    assert doc["prediction"]["gamma_r"] == pytest.approx(-1 / 6)


def test_moments_r2(run, tmp_path):
    assert run("moments", "--r", "2", "--checkpoint-stop", "5") == 0
    doc = json.loads((tmp_path / "out" / "moments_r2_sieve_w12.json").read_text())
    assert abs(doc["growth_exponent"]["slope"] - 2) < 0.1
    assert doc["main_term"]["C_hat"] > 0


def test_moments_lattice(run, tmp_path):
    assert run("moments", "--r", "2", "--method", "lattice", "--checkpoint-stop", "4") == 0
    rows = (tmp_path / "out" / "moments_r2_lattice_w12.csv").read_text().splitlines()
    assert rows[1].endswith(",16.0")


def test_constant_and_report(run, tmp_path):
    assert run("constant", "--prime-bound", "1000") == 0
    doc = json.loads((tmp_path / "out" / "constant_w12_P1000.json").read_text())
    assert len(doc["factors"]) == 4
    assert doc["value"] == pytest.approx(0.2573, abs=2e-3)
    assert run("report") == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert "constant_w12_P1000" in report["documents"]


def test_constant_refinement(run, tmp_path):
    assert run("constant", "--prime-bound", "1000") == 0
    assert run("constant", "--prime-bound", "10000") == 0
    a = json.loads((tmp_path / "out" / "constant_w12_P1000.json").read_text())
    b = json.loads((tmp_path / "out" / "constant_w12_P10000.json").read_text())
    for key, fa in a["factors"].items():
        fb = b["factors"][key]
        if not fa.get("tail_heuristic"):
            assert abs(fb["value"] / fa["value"] - 1) <= fa["tail_bound"] * 1.01 + 1e-15


def test_cache_reuse_and_rebuild(tmp_path, caplog):
    d = tmp_path / "cache"
    first = cache.get_eigenform(12, 200, d)
    path = cache.eigenform_path(d, 12, 200)
    assert path.exists()
    assert cache.get_eigenform(12, 200, d) == first
    # a file whose header disagrees with its name is rebuilt with a warning
    save_table(delta_coefficients(100), path)
    with caplog.at_level(logging.WARNING):
        assert cache.get_eigenform(12, 200, d) == first
    assert "rebuilding" in caplog.text
    path.write_bytes(b"garbage")
    assert cache.get_eigenform(12, 200, d) == first
    tables = cache.get_tables(300, d)
    cache.tables_path(d, 300).write_bytes(b"HPTABLES\x07")
    assert cache.get_tables(300, d) == tables


def test_cache_env(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "envcache"))
    assert main(["eigenvalues", "--limit", "30", "--output-dir", "out"]) == 0
    assert (tmp_path / "envcache" / "eigenform_v1_w12_n30.bin").exists()

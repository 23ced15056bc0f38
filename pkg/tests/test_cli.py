import io
import math
import subprocess
import sys

import pytest
from gmpy2 import mpq

from starfield.cli import (EXIT_FAIL, EXIT_GUARD, EXIT_INPUT, EXIT_OK, InputError, RunConfig,
                           main, pairing_tsv, read_pairing_tsv)
from starfield.symalg import ModeSpace, PairingForm


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def uv_pairing(tmp_path):
    form = PairingForm(ModeSpace(("u", "v")), ((mpq(0), mpq(3, 4)), (mpq(-3, 4), mpq(0))))
    path = tmp_path / "uv.tsv"
    path.write_text(pairing_tsv(form))
    return str(path)


def test_eval_star_with_custom_pairing(uv_pairing):
    code, out = run("eval", "u * v", "--star-form", uv_pairing)
    assert code == EXIT_OK
    assert out == "1 * u*v + 3/4 * hbar\n"


def test_eval_poisson_sigma():
    code, out = run("eval", "poisson(s0,c0)")
    assert code == EXIT_OK
    assert float(out.split()[0]) == pytest.approx(2 * math.pi, abs=1e-12)


def test_eval_theta_one():
    code, out = run("eval", "theta(1)", "--Ncap", "3")
    assert code == EXIT_OK
    # three one-particle modes (k = -1, 0, 1), total occupation <= 3: C(6, 3)
    assert out == "identity (dim 20)\n"


def test_eval_operator_summary():
    code, out = run("eval", "theta(s0)", "--Ncap", "2")
    assert code == EXIT_OK and out.startswith("operator (dim 10, nnz ")
    assert run("eval", "theta(0)", "--Ncap", "2")[1] == "zero (dim 10)\n"


def test_eval_errors(capsys):
    assert run("eval", "u *")[0] == EXIT_INPUT
    assert "offset 3" in capsys.readouterr().err
    assert run("eval", "nosuchmode")[0] == EXIT_INPUT
    assert "unbound" in capsys.readouterr().err
    assert run("eval", "theta(s0) + s0", "--Ncap", "2")[0] == EXIT_INPUT


def test_check_assoc_line():
    code, out = run("check", "assoc", "--trials", "3")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "assoc\tPASS\t3/3\texact"


def test_check_ordre_line():
    code, out = run("check", "ordre", "--Ncap", "6", "--max-degree", "2", "--trials", "5")
    assert code == EXIT_OK
    last = out.splitlines()[-1].split("\t")
    assert last[:3] == ["ordre", "PASS", "5/5"]
    assert float(last[3].split("=")[1]) < 1e-9


def test_check_guard_exit(capsys):
    code, out = run("check", "ccr", "--Ncap", "1")
    assert code == EXIT_GUARD and out == ""
    assert "guard" in capsys.readouterr().err


def test_check_failure_exit():
    assert run("check", "ccr", "--trials", "1", "--tolerance", "1e-30")[0] == EXIT_FAIL


def test_config_file_and_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small run\ntrials = 2\nseed = 7   # comment\n")
    code, out = run("check", "lemma1", "--config", str(cfg))
    assert code == EXIT_OK and "\t2/2\t" in out
    monkeypatch.setenv("STARFIELD_CONFIG", str(cfg))
    assert "\t2/2\t" in run("check", "lemma1")[1]
    assert "\t3/3\t" in run("check", "lemma1", "--trials", "3")[1]


def test_bad_config(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert run("modes", "--config", str(cfg))[0] == EXIT_INPUT
    cfg.write_text("trials = many\n")
    assert run("modes", "--config", str(cfg))[0] == EXIT_INPUT
    assert run("modes", "--config", str(tmp_path / "missing.cfg"))[0] == EXIT_INPUT
    assert run("check", "assoc", "--trials", "0")[0] == EXIT_INPUT


def test_runconfig_invariants():
    with pytest.raises(InputError):
        RunConfig(tolerance=0)
    with pytest.raises(InputError):
        RunConfig(trials=0)


def test_modes_table():
    code, out = run("modes")
    rows = out.splitlines()
    assert rows[0] == "label\tk_index\tspatial\ttemporal\tmu"
    assert [r.split("\t")[0] for r in rows[1:]] == ["c0", "s0", "cc1", "cs1", "sc1", "ss1",
                                                    "ccm1", "csm1", "scm1", "ssm1"]


def test_pairing_round_trip(tmp_path):
    for which in ("sigma", "wick"):
        code, out = run("pairing", which)
        assert code == EXIT_OK
        path = tmp_path / f"{which}.tsv"
        path.write_text(out)
        assert pairing_tsv(read_pairing_tsv(str(path))) == out
        assert run("pairing", str(path))[1] == out


def test_bad_pairing_file(tmp_path):
    path = tmp_path / "p.tsv"
    path.write_text("label\tu\nv\t1\n")
    with pytest.raises(InputError):
        read_pairing_tsv(str(path))


def test_reports_are_deterministic():
    argv = ["check", "wick", "--trials", "3"]
    assert run(*argv) == run(*argv)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "starfield.cli", "eval", "hbar . 2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "2 * hbar\n"

import json
from io import StringIO

import pytest

from config import Config
from qinstanton import main


def run(argv):
    out = StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_nf(cache_dir):
    assert run(["nf", "a b - q b a"]) == (0, "0\n")
    assert run(["nf", "A a + b B"]) == (0, "1\n")
    assert run(["nf", "--unicode", "b a"]) == (0, "q⁻¹·α·β\n")


def test_nf_syntax_error(cache_dir, capsys):
    code, output = run(["nf", "("])
    assert code == 2
    assert output == ""
    assert "1:2" in capsys.readouterr().err


def test_pn_trivial_charge(cache_dir):
    code, output = run(["pn", "-n", "0", "--check"])
    payload = json.loads(output)
    assert code == 0
    assert payload["passed"] is True
    assert all(check["pass"] for check in payload["checks"].values())


def test_pn_charge_one(cache_dir):
    code, output = run(["pn", "-n", "1", "--check"])
    payload = json.loads(output)
    assert code == 0
    assert payload["checks"]["idempotent"] == {"pass": True, "residual_terms": 0}
    assert payload["checks"]["star_invariant"]["pass"] is False
    assert payload["q_mode"] == "generic"


def test_pn_with_charge(cache_dir):
    code, output = run(["--no-cache", "pn", "-n", "1", "--check", "--charge"])
    assert code == 0
    assert json.loads(output)["charge"]["nearest_integer"] == -1


def test_pn_entries_without_check(cache_dir):
    code, output = run(["pn", "-n", "0", "--q", "1/2"])
    payload = json.loads(output)
    assert code == 0
    assert payload["q_mode"] == "1/2"
    assert len(payload["entries"]) == 16
    assert "checks" not in payload


@pytest.mark.parametrize("argv", [
    ["pn", "-n", "1", "--q", "0"],
    ["pn", "-n", "1", "--q", "x"],
    ["pn", "-n", str(Config.MAX_CHARGE + 1)],
    ["pn"],
    ["pairing", "--u", "W"],
    ["pairing", "--q0", "1.5"],
    ["winding", "-n", "1", "--resolution", "2"],
    ["no-such-command"],
])
def test_usage_errors(cache_dir, argv):
    assert run(argv)[0] == 2


def test_pairing_u(cache_dir):
    code, output = run(["pairing", "--u", "U"])
    payload = json.loads(output)
    assert code == 0
    assert payload["nearest_integer"] == -1
    assert abs(payload["value"] + 1) < 1e-6
    assert payload["M"] == Config.DEFAULT_M


def test_pairing_v_table(cache_dir):
    code, output = run(["pairing", "--u", "V", "--table"])
    assert code == 0
    assert "nearest_integer" in output
    assert "u_descriptor" in output


def test_winding(cache_dir):
    code, output = run(["winding", "-n", "2"])
    payload = json.loads(output)
    assert code == 0
    assert payload["nearest_integer"] == 2


def test_hopf_check(cache_dir):
    code, output = run(["hopf-check", "--trials", "20"])
    payload = json.loads(output)
    assert code == 0
    assert payload["generators"] == ["A", "B", "a", "b"]
    assert all(check["pass"] for check in payload["checks"].values())


def test_output_is_deterministic_and_replayed_from_cache(cache_dir):
    first = run(["pairing", "--u", "U^2"])
    second = run(["pairing", "--u", "U^2"])
    uncached = run(["--no-cache", "pairing", "--u", "U^2"])
    assert first == second == uncached


def test_certificate_replayed_from_cache(cache_dir, monkeypatch):
    first = run(["pn", "-n", "1", "--check"])
    # повторный запуск не должен пересчитывать p_1
    monkeypatch.setattr("handlers.instanton.build_certificate", _fail)
    assert run(["pn", "-n", "1", "--check"]) == first


def _fail(*args, **kwargs):
    raise AssertionError("результат должен браться из кэша")


def test_budget_exceeded(cache_dir, monkeypatch):
    monkeypatch.setattr(Config, "MAX_TERMS", 2)
    assert run(["--no-cache", "pn", "-n", "4"])[0] == 3
    assert run(["nf", "(a + b + B)^3"])[0] == 3


@pytest.mark.parametrize("q", ["1/2", "3/7"])
def test_pn_rational_q_check(cache_dir, q):
    code, output = run(["pn", "-n", "1", "--q", q, "--check"])
    payload = json.loads(output)
    assert code == 0
    assert payload["q_mode"] == q
    assert payload["checks"]["idempotent"] == {"pass": True, "residual_terms": 0}
    assert payload["passed"] is True


@pytest.mark.parametrize("expr", ["1/0 a", "a²", "(" * 3000 + "a" + ")" * 3000])
def test_nf_malformed_input_is_usage_error(cache_dir, expr):
    assert run(["nf", expr])[0] == 2

import csv
import io
import json
import subprocess
import sys

import pytest

from quarkspec.cli import main, oracle_cases
from quarkspec.closed_form import coulomb_levels
from quarkspec.fitting import MesonObservation, dump_observations, mass_model
from quarkspec.model import QuarkoniumParams

CHARMONIUM = QuarkoniumParams(alpha_s=0.5, b=0.15, sigma=1.0, m_q=1.5, m_qbar=1.5, s=0)


@pytest.fixture
def params_file(tmp_path):
    def write(params, name="params.json"):
        path = tmp_path / name
        path.write_text(params.to_json())
        return str(path)
    return write


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_oracle_case_count():
    _, cases = oracle_cases()
    assert len(cases) == 10 + 12 + 36


def test_validate_passes(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "58/58" in out and "FAIL" not in out


def test_validate_injected_fault(capsys):
    assert main(["validate", "--inject-fault"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_validate_impossible_tolerance():
    assert main(["validate", "--tolerance", "1e-20"]) == 1


def test_spectrum_cornell(capsys, params_file):
    assert main(["spectrum", "--params", params_file(CHARMONIUM), "--n-max", "2", "--l-max", "1"]) == 0
    table = rows(capsys.readouterr().out)
    assert [(r["n_r"], r["l"]) for r in table] == [("0", "0"), ("1", "0"), ("2", "0"), ("0", "1"), ("1", "1"),
                                                   ("2", "1")]
    assert all(r["converged"] == "true" and r["s"] == "0" for r in table)
    assert float(table[0]["E"]) == pytest.approx(0.0990771, abs=1e-6)


def test_spectrum_coulomb_limit(capsys, params_file):
    # b = 0 and sigma = 0 leave the pure Coulomb term
    p = CHARMONIUM.replace(b=0.0, sigma=0.0)
    assert main(["spectrum", "--params", params_file(p), "--n-max", "1", "--l-max", "1"]) == 0
    k = 4 * p.alpha_s / 3
    for r in rows(capsys.readouterr().out):
        exact = coulomb_levels(k, p.mu, 1.0, int(r["n_r"]), int(r["l"]))
        assert float(r["E"]) == pytest.approx(exact, rel=1e-6)


def test_spectrum_truncated_triplet_exit_2(capsys, params_file):
    code = main(["spectrum", "--params", params_file(CHARMONIUM.replace(s=1)), "--backend", "truncated-numerov"])
    assert code == 2
    assert "unbounded" in capsys.readouterr().err


def test_spectrum_full_triplet_bound(capsys, params_file):
    assert main(["spectrum", "--params", params_file(CHARMONIUM.replace(s=1)), "--n-max", "1"]) == 0
    assert len(rows(capsys.readouterr().out)) == 2


def test_spectrum_oea_backend_to_file(tmp_path, params_file):
    out = tmp_path / "oea.csv"
    assert main(["spectrum", "--params", params_file(CHARMONIUM), "--backend", "oea-closed-form",
                 "--out", str(out)]) == 0
    E = [float(r["E"]) for r in rows(out.read_text())]
    assert len(E) == 4 and E == sorted(E)


def test_expansion_error_defaults(capsys):
    assert main(["expansion-error"]) == 0
    table = rows(capsys.readouterr().out)
    assert len(table) == 200
    nearest = min(table, key=lambda r: abs(float(r["q"]) - 0.7))
    assert float(nearest["rel_err_inv"]) < 1e-3 and float(nearest["rel_err_invsq"]) < 1e-3


def test_expansion_error_twice_delta(capsys):
    assert main(["expansion-error", "--q-min", "0.7", "--q-max", "2.1", "--points", "3"]) == 0
    mid = rows(capsys.readouterr().out)[1]
    assert float(mid["q"]) == 1.4
    # the relative error is computed before formatting, so it is exactly 1
    assert mid["rel_err_inv"] == "1"
    assert float(mid["approx_inv"]) / float(mid["exact_inv"]) == pytest.approx(2.0, rel=1e-11)


@pytest.mark.parametrize("argv", [
    ["expansion-error", "--delta", "0"],
    ["expansion-error", "--q-min", "2", "--q-max", "1"],
    ["spectrum", "--params", "/nonexistent.json"],
    ["spectrum"],
    ["bogus"],
])
def test_usage_errors(argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 64


def test_negative_n_max(params_file):
    assert main(["spectrum", "--params", params_file(CHARMONIUM), "--n-max", "-1"]) == 64


def test_compare_exit_zero(capsys, params_file):
    assert main(["compare", "--params", params_file(CHARMONIUM), "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["audit"]["claims_hold"] and doc["audit"]["cornell_exceeds_gamma0_at"]["0"] > 10


def test_compare_without_extension_fails_check(params_file):
    assert main(["compare", "--params", params_file(CHARMONIUM), "--no-extend", "--n-max", "3"]) == 1


def test_fit_round_trip(tmp_path, capsys, params_file):
    obs = [MesonObservation(f"n{n}l{l}", n, l, 0, mass_model(CHARMONIUM, "oea-closed-form", n, l, 0))
           for l in range(3) for n in range(4)]
    obs_path = tmp_path / "obs.json"
    obs_path.write_text(dump_observations(obs))
    start = CHARMONIUM.replace(alpha_s=0.55, b=0.15 / 1.1, sigma=1.1)
    code = main(["fit", "--observations", str(obs_path), "--params", params_file(start),
                 "--free", "alpha_s,b,sigma"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["objective"] < 1e-8
    assert doc["params"]["alpha_s"] == pytest.approx(0.5, rel=1e-2)


def test_fit_empty_observations(tmp_path, params_file):
    obs_path = tmp_path / "obs.json"
    obs_path.write_text("[]")
    assert main(["fit", "--observations", str(obs_path), "--params", params_file(CHARMONIUM)]) == 64


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "quarkspec", "expansion-error", "--points", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("q,exact_inv")

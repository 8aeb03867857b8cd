"""Black-box CLI checks: exit codes, formats, config precedence, determinism."""

import contextlib
import io
import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from strata import cli


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli.run(list(argv))
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run_cli(*argv)
    assert code == 0, err
    return json.loads(out)


# ---------------------------------------------------------------------------
# documented invocations
# ---------------------------------------------------------------------------


def test_integrate_left_tags_exact_value():
    doc = run_json("integrate", "--fn", "x_squared", "--a", "0", "--b", "1",
                   "--layer", "1", "--N", "1000", "--tags", "left")
    assert doc["schema"] == "strata/1"
    assert doc["integrable"] is True
    assert Fraction(doc["value"]) == Fraction(2003001, 6000000)


def test_rank_of_catalogued_constant():
    doc = run_json("rank", "--const", "liouville")
    assert doc["rank"] == 3
    assert doc["value"]["repr_kind"] == "series"


def test_rank_of_plain_rational():
    doc = run_json("rank", "--value", "3/4")
    assert doc["rank"] == 0


def test_dim_slope_on_cantor_profile():
    doc = run_json("dim", "--set", "cantor", "--depth", "8",
                   "--eps-base", "1/3", "--eps-count", "7")
    assert abs(doc["slope"] - math.log(2) / math.log(3)) < 1e-6
    assert [r["count"] for r in doc["rows"]] == [2**j for j in range(1, 8)]


def test_taylor_polynomial_remainder_is_zero():
    doc = run_json("taylor", "--fn", "x_squared", "--x", "1/2", "--h", "1/8",
                   "--order", "2", "--layer", "0")
    assert doc["remainder"] == {"low": "0", "high": "0"}


def test_ftc_breaks_at_origin_row():
    doc = run_json("ftc", "--tol", "1/4096")
    rows = {r["layer"]: r for r in doc["rows"]}
    assert rows[1]["verdict"] == "valid"
    assert rows[2]["verdict"] == "breaks"
    assert rows[2]["f_at_probe"] == "-1"


def test_liouville_chain_for_the_constant():
    doc = run_json("liouville", "--const", "liouville", "--layer", "3",
                   "--k-max", "3", "--q-cap", "1000000")
    assert doc["k_verified"] == 3
    assert doc["member_up_to_k"] is True
    assert [r["q"] for r in doc["rows"]] == [10, 100, 10**6]
    assert all(r["reverified"] for r in doc["rows"])


def test_liouville_rational_is_not_a_member():
    doc = run_json("liouville", "--value", "1/2", "--layer", "0",
                   "--k-max", "3", "--q-cap", "10000")
    assert doc["k_verified"] == 1
    assert doc["member_up_to_k"] is False


def test_jump_demo_rational_threshold():
    doc = run_json("jump-demo", "--theta", "1/2", "--max-layer", "1")
    assert all(r["jump_visible"] for r in doc["rows"])


def test_gallery_listing():
    doc = run_json("gallery")
    assert doc["mode"] == "list"
    assert len(doc["rows"]) == 18
    assert doc["rows"][0]["name"] == "x_squared"


def test_measure_reports_exact_cantor_value():
    doc = run_json("measure", "--set", "cantor", "--depth", "5",
                   "--layer", "0")
    assert doc["value"] == {"low": "32/243", "high": "32/243"}
    assert doc["cover_size"] == 32


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------


def test_unknown_subcommand_exits_one():
    code, _, err = run_cli("transcend")
    assert code == 1
    assert "usage" in err


def test_unknown_flag_exits_one():
    code, _, err = run_cli("rank", "--const", "pi", "--frobnicate")
    assert code == 1
    assert "usage" in err


def test_unknown_constant_exits_one():
    code, _, err = run_cli("rank", "--const", "feigenbaum")
    assert code == 1
    assert "unknown constant" in err


def test_float_literal_rejected():
    code, _, err = run_cli("integrate", "--fn", "x_squared", "--a", "0.5",
                           "--b", "1", "--layer", "1", "--N", "10")
    assert code == 1
    assert "exact rational" in err


def test_budget_exhaustion_exits_two(tmp_path):
    # at eps = 2 the envelope can never certify a window at the origin and
    # the unit bound keeps every candidate violator below the gap, so the
    # only honest outcome is exhaustion
    cfg = tmp_path / "small.cfg"
    cfg.write_text("max_dyadic_exponent=4\n")
    code, _, err = run_cli("continuity", "--fn", "masked_oscillation",
                           "--x", "0", "--layer", "2", "--eps", "2",
                           "--config", str(cfg))
    assert code == 2
    assert "budget" in err


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------


def test_config_file_sets_format(tmp_path):
    cfg = tmp_path / "strata.cfg"
    cfg.write_text("# comment line\nformat=csv\nprecision_bits=64\n")
    code, out, _ = run_cli("rank", "--value", "2/3", "--config", str(cfg))
    assert code == 0
    assert out.splitlines()[0] == "input,rank,schema"


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "strata.cfg"
    cfg.write_text("format=csv\n")
    doc = run_json("rank", "--value", "2/3", "--config", str(cfg),
                   "--format", "json")
    assert doc["rank"] == 0


def test_config_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "strata.cfg"
    cfg.write_text("fathom=12\n")
    code, _, err = run_cli("rank", "--value", "1", "--config", str(cfg))
    assert code == 1
    assert "unknown config key" in err


def test_config_rejects_bad_integer(tmp_path):
    cfg = tmp_path / "strata.cfg"
    cfg.write_text("precision_bits=lots\n")
    assert run_cli("rank", "--value", "1", "--config", str(cfg))[0] == 1


def test_missing_config_exits_one(tmp_path):
    code, _, err = run_cli("rank", "--value", "1",
                           "--config", str(tmp_path / "absent.cfg"))
    assert code == 1
    assert "cannot read config" in err


def test_out_file_matches_stdout(tmp_path):
    _, stdout_text, _ = run_cli("entropy", "--set", "cantor", "--depth", "4",
                                "--eps", "1/81")
    target = tmp_path / "report.json"
    code, out, _ = run_cli("entropy", "--set", "cantor", "--depth", "4",
                           "--eps", "1/81", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text() == stdout_text


# ---------------------------------------------------------------------------
# output formats and determinism
# ---------------------------------------------------------------------------


def test_csv_profile_is_plot_ready():
    code, out, _ = run_cli("dim", "--set", "cantor", "--depth", "6",
                           "--eps-base", "1/3", "--eps-count", "5",
                           "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "eps,count,log_count"
    assert lines[1].startswith("1/3,2,")


def test_scan_csv_columns():
    code, out, _ = run_cli("weierstrass-scan", "--a", "1/2", "--b", "1",
                           "--k-start", "3", "--k-stop", "7",
                           "--format", "csv")
    assert code == 0
    header = out.splitlines()[0].split(",")
    assert header[:5] == ["a", "b", "ab", "ratio", "classification"]


@pytest.mark.parametrize("argv", [
    ("rank", "--const", "pi"),
    ("enumerate", "--layer", "1", "--lo", "0", "--hi", "1",
     "--sample", "5", "--seed", "7"),
    ("integrate", "--fn", "x_squared", "--a", "0", "--b", "1",
     "--layer", "1", "--N", "100", "--tags", "left", "--seed", "3"),
])
def test_repeated_invocations_are_byte_identical(argv):
    cmd = [sys.executable, "-m", "strata", *argv]
    first = subprocess.run(cmd, capture_output=True, check=True)
    second = subprocess.run(cmd, capture_output=True, check=True)
    assert first.stdout == second.stdout
    assert first.stdout


def test_sample_depends_on_seed():
    a = run_json("enumerate", "--layer", "1", "--lo", "0", "--hi", "1",
                 "--sample", "5", "--seed", "7")
    b = run_json("enumerate", "--layer", "1", "--lo", "0", "--hi", "1",
                 "--sample", "5", "--seed", "8")
    assert a["seed"] == 7 and b["seed"] == 8
    assert a["rows"] != b["rows"]


def test_json_reports_reparse():
    for doc in (run_json("ball", "--center", "1/2", "--radius", "1/8",
                         "--layer", "0"),
                run_json("continuity", "--fn", "sign", "--x", "0",
                         "--layer", "1"),
                run_json("derive", "--fn", "x_squared", "--x", "1/2",
                         "--layer", "0")):
        assert doc["schema"] == "strata/1"

"""The rees-kit command line: reports, schema, exit codes and determinism."""

import json
import re
import subprocess
import sys

import jsonschema
import pytest

from rees_kit.cli import main, schema
from rees_kit.instances import bundled, save_instance


def run(capsys, *argv):
    code = main(list(argv) + ["--json", "-"])
    out = capsys.readouterr().out
    report = json.loads(out)
    jsonschema.validate(report, schema())
    return code, report


@pytest.mark.parametrize("name", ["ex71", "ex72", "ex73"])
def test_verify_bundled(capsys, name):
    code, report = run(capsys, "verify", f"bundled:{name}")
    assert code == 0 and report["verdict"] == "PASS"
    inst = report["instances"][0]
    assert all(c["status"] == "PASS" for c in inst["checks"].values())
    assert inst["saturation_exponent"] == (1 if name == "ex73" else 2)


@pytest.mark.parametrize("command", ["validate", "classify", "pencil", "sym", "jdual"])
def test_light_commands(capsys, command):
    code, report = run(capsys, command, "bundled:ex72")
    assert code == 0
    assert report["command"] == command


def test_defining_methods_agree(capsys):
    _, a = run(capsys, "defining", "bundled:ex71", "--method", "formula")
    _, b = run(capsys, "defining", "bundled:ex71", "--method", "saturation")
    key = lambda r: r["instances"][0]["ideals"]
    assert key(a)["A_formula"] == key(b)["A_saturation"]


def test_jdual_frame(capsys):
    # The last form of a Case III matrix is not in (x, y).
    code, report = run(capsys, "jdual", "bundled:ex73", "--frame", "xy")
    assert code == 1 and "FrameMismatch" in report["instances"][0]["error"]
    code, report = run(capsys, "jdual", "bundled:ex73", "--frame", "z2w0")
    assert code == 0


def test_missing_file_is_io_error(capsys, tmp_path):
    assert main(["verify", str(tmp_path / "absent.json")]) == 2
    assert main(["verify", "bundled:nope"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", str(bad)]) == 2
    assert main(["verify", "bundled:ex71", "--field", "gf:9"]) == 2


def test_invalid_instance(capsys, tmp_path):
    data = {"id": "small", "matrix": {"rows": 4, "cols": 3, "entries": [
        "x", "z", "x*z", "y", "0", "x^2", "0", "x", "y^2", "z", "y", "x*y"]}}
    path = tmp_path / "small.json"
    path.write_text(json.dumps(data))
    code, report = run(capsys, "validate", str(path))
    assert code == 1 and report["verdict"] == "INVALID"
    assert not report["instances"][0]["setting"]["checks"]["mu_gt_4"]


def test_expected_mismatch(capsys, tmp_path, ex71):
    inst = bundled("ex71")
    inst.expected = dict(inst.expected, J_extra=["w0^2"])
    path = tmp_path / "wrong.json"
    save_instance(inst, path)
    code, report = run(capsys, "verify", str(path))
    assert code == 3 and report["verdict"] == "FAIL"
    assert report["instances"][0]["checks"]["expected.J"]["status"] == "FAIL"


def test_timeout(capsys):
    code, report = run(capsys, "verify", "bundled:ex72", "--timeout", "0.01")
    assert code == 4 and report["verdict"] == "TIMEOUT"


def test_prime_field_supports_match_rationals(capsys):
    _, q = run(capsys, "defining", "bundled:ex71", "--method", "saturation")
    _, p = run(capsys, "defining", "bundled:ex71", "--method", "saturation", "--field", "gf:32003")

    def supports(report):
        polys = report["instances"][0]["ideals"]["A_saturation"]
        return [sorted(re.sub(r"^[-+ ]*[0-9/]*\*?", "", t.strip())
                       for t in re.split(r"(?= [-+] )", f)) for f in polys]

    assert supports(q) == supports(p)
    assert p["instances"][0]["field"] == "GF(32003)"


def test_lex_order(capsys):
    code, report = run(capsys, "verify", "bundled:ex73", "--order", "lex")
    assert code == 0 and report["instances"][0]["order"] == "lex"


def test_suite_is_deterministic(capsys, tmp_path):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    args = ["suite", "--random", "4", "--seed", "3", "--no-bundled"]
    assert main(args + ["--json", str(first)]) == 0
    assert main(args + ["--json", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    report = json.loads(first.read_text())
    jsonschema.validate(report, schema())
    assert report["summary"] == {"PASS": 4}
    assert len(report["instances"]) == 4


def test_suite_directory(capsys, tmp_path, ex73):
    save_instance(ex73, tmp_path / "copy.json")
    code, report = run(capsys, "suite", str(tmp_path), "--no-bundled")
    assert code == 0 and [i["id"] for i in report["instances"]] == ["ex73"]
    assert main(["suite", str(tmp_path / "nowhere")]) == 2


def test_timings_flag(capsys):
    _, report = run(capsys, "verify", "bundled:ex73", "--timings")
    assert report["instances"][0]["timings"]
    _, report = run(capsys, "verify", "bundled:ex73")
    assert "timings" not in report["instances"][0]


def test_json_roundtrip_reparses(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "bundled:ex71", "--json", str(out)]) == 0
    human = capsys.readouterr().out
    assert human.startswith("ex71: PASS")
    report = json.loads(out.read_text())
    from rees_kit.ring import RingContext
    S = RingContext.rees(5)
    for polys in report["instances"][0]["ideals"].values():
        for f in polys:
            assert str(S.parse(f)) == f


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rees_kit.cli", "classify", "bundled:ex73"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "III" in proc.stdout

import functools
import json

import pytest

import main
from app.handlers import commands
from app.models import PointRecord, SweepRow
from app.services.verification_service import VerificationService
from app.utils.formatters import RecordFormatter
from tests.test_services import flipped_closed_form


def run(capsys, *argv):
    code = main.main(list(argv))
    return code, capsys.readouterr().out


def test_point_json(capsys):
    code, out = run(capsys, "point", "--g", "0.6", "--theta", "1.5707963", "--format", "json", "--quiet")
    assert code == 0
    [record] = json.loads(out)
    assert record["status"] == "ok"
    assert record["c_closed"] == pytest.approx(0.0526316, abs=1e-7)
    assert record["c_numeric"] == pytest.approx(0.0526316, abs=1e-7)


def test_point_degrees_flag(capsys):
    _, in_degrees = run(capsys, "point", "--g", "0.3", "--theta", "90", "--degrees", "--quiet")
    _, in_radians = run(capsys, "point", "--g", "0.3", "--theta", "1.5707963267948966", "--quiet")
    assert in_degrees == in_radians


def test_undefined_point_exits_zero_with_empty_cells(capsys):
    code, out = run(capsys, "point", "--g", "0", "--theta", "1", "--quiet")
    assert code == 0
    [record] = RecordFormatter.parse(out, "csv", PointRecord)
    assert record.status == "undefined"
    assert record.c_numeric is None


def test_invalid_strength_is_usage_error(capsys):
    code, _ = run(capsys, "point", "--g", "1.5", "--theta", "1", "--quiet")
    assert code == 2


def test_missing_argument_is_usage_error(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main.main(["point", "--g", "0.5"])
    assert excinfo.value.code == 2


def test_dilation_command(capsys):
    code, out = run(capsys, "dilation", "--g", "0.4", "--theta", "2.0", "--format", "json", "--quiet")
    assert code == 0
    records = json.loads(out)
    assert [r["sector"] for r in records] == ["pp", "pm", "mp", "mm"]
    assert all(r["weight_diff"] <= 1e-12 for r in records)


def test_sweep_to_file(tmp_path, capsys):
    target = tmp_path / "sweep.csv"
    code, out = run(capsys, "sweep", "--grid", "0:1:3,0:3.141592653589793:4", "--out", str(target), "--quiet")
    assert code == 0 and out == ""
    rows = RecordFormatter.parse(target.read_text(), "csv", SweepRow)
    assert len(rows) == 15
    assert [r.kind for r in rows].count("boundary") == 3


def test_sweep_is_byte_identical_across_runs(tmp_path, capsys):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for target in (first, second):
        run(capsys, "sweep", "--grid", "0.2:1:3,0.1:3:3", "--format", "json", "--out", str(target), "--quiet")
    assert first.read_bytes() == second.read_bytes()


def test_sweep_outputs_select_columns(capsys):
    code, out = run(capsys, "sweep", "--grid", "0.5:1:2,1:2:2", "--outputs", "concurrence", "--quiet")
    assert code == 0
    assert out.splitlines()[0] == "kind,g,theta,status,c_closed,c_numeric"


def test_sweep_unknown_output_is_usage_error(capsys):
    code, _ = run(capsys, "sweep", "--grid", "0.5:1:2,1:2:2", "--outputs", "entropy", "--quiet")
    assert code == 2


def test_sweep_unwritable_path(tmp_path, capsys):
    target = tmp_path / "missing" / "sweep.csv"
    code, _ = run(capsys, "sweep", "--grid", "0.5:1:2,1:2:2", "--out", str(target), "--quiet")
    assert code == 2


def test_sweep_bad_grid_is_usage_error(capsys):
    code, _ = run(capsys, "sweep", "--grid", "0:1:1,0:1:5", "--quiet")
    assert code == 2


def test_verify_default_run_passes(capsys):
    code, out = run(capsys, "verify", "--quiet")
    assert code == 0, out
    assert out.splitlines()[-1] == "PASS: 10/10 suites passed (seed=12345, trials=50)"


def test_verify_is_reproducible(capsys):
    _, first = run(capsys, "verify", "--seed", "99", "--trials", "3", "--quiet")
    _, second = run(capsys, "verify", "--seed", "99", "--trials", "3", "--quiet")
    assert first == second
    assert all(line.startswith("PASS") for line in first.splitlines())


def test_verify_reports_injected_closed_form_bug(capsys, monkeypatch):
    monkeypatch.setattr(
        commands,
        "VerificationService",
        functools.partial(VerificationService, closed_form=flipped_closed_form),
    )
    code, out = run(capsys, "verify", "--trials", "2", "--suite", "closed_form_concurrence", "--quiet")
    assert code == 1
    assert out.startswith("FAIL closed_form_concurrence")
    assert out.splitlines()[-1].startswith("FAIL: 0/1 suites passed")


def test_sweep_theta_range_in_degrees(capsys):
    code, out = run(capsys, "sweep", "--grid", "0.5:1:2,0:180:3", "--degrees", "--outputs", "concurrence", "--quiet")
    assert code == 0
    rows = RecordFormatter.parse(out, "csv", SweepRow)
    assert max(r.theta for r in rows) == pytest.approx(3.141592653589793, abs=1e-15)


def test_verify_unknown_suite_is_usage_error(capsys):
    code, out = run(capsys, "verify", "--suite", "closed_form_concurence", "--quiet")
    assert code == 2
    assert out == ""


@pytest.mark.parametrize("value", ["-1", "abc"])
def test_invalid_thread_setting_is_usage_error(monkeypatch, capsys, fresh_settings, value):
    monkeypatch.setenv("HISTKIT_THREADS", value)
    code, out = run(capsys, "point", "--g", "0.5", "--theta", "1", "--quiet")
    assert code == 2
    assert out == ""

import json
import math

import pytest
from click.testing import CliRunner

from aloha_ge.cli import _fmt, _parse_sweep, _thread_count, main
from aloha_ge.delay import SymmetricParams, delay_roots

SYMMETRIC_06 = {
    "channel1": {"p_g2b": 0.4, "p_b2g": 0.6},
    "channel2": {"p_g2b": 0.4, "p_b2g": 0.6},
    "f11": 1.0,
    "f12": 1.0,
    "policy": {"q11": 1.0, "q12": 1.0},
    "arrivals": {"lambda1": 0.2, "lambda2": 0.1},
}

MOSTLY_BAD_04 = {
    "channel1": {"p_g2b": 0.6, "p_b2g": 0.4},
    "channel2": {"p_g2b": 0.6, "p_b2g": 0.4},
    "f11": 1.0,
    "f12": 1.0,
}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def sym06(tmp_path):
    path = tmp_path / "sym06.json"
    path.write_text(json.dumps(SYMMETRIC_06))
    return str(path)


@pytest.fixture
def pi04(tmp_path):
    path = tmp_path / "pi04.json"
    path.write_text(json.dumps(MOSTLY_BAD_04))
    return str(path)


# -- region ---------------------------------------------------------------

def test_region_csv_values(runner, sym06):
    result = runner.invoke(main, ["region", sym06, "--samples", "6"])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "lambda1,lambda2,segment_kind,source"
    assert len(lines) == 7
    assert lines[1] == "0,0.6,linear,controlled"
    # 0.6 * 2/6 = 0.2 falls on the square-root middle piece
    x, y, kind, source = lines[3].split(",")
    assert float(x) == pytest.approx(0.2, rel=1e-12)
    assert float(y) == pytest.approx((1.0 - math.sqrt(0.2)) ** 2, rel=1e-9)
    assert kind == "sqrt" and source == "controlled"
    # rows are ordered by increasing lambda1
    xs = [float(line.split(",")[0]) for line in lines[1:]]
    assert xs == sorted(xs)


def test_region_baselines_blocks(runner, sym06):
    result = runner.invoke(main, ["region", sym06, "--samples", "4", "--baselines"])
    assert result.exit_code == 0
    rows = [line.split(",") for line in result.output.splitlines()[1:]]
    assert len(rows) == 12
    assert [r[3] for r in rows] == ["controlled"] * 4 + ["tdma"] * 4 + ["uncontrolled"] * 4
    # time sharing between two rate-0.6 users: the line lambda2 = 0.6 - lambda1
    tdma_at_03 = next(r for r in rows if r[3] == "tdma" and float(r[0]) == 0.3)
    assert float(tdma_at_03[1]) == pytest.approx(0.3, rel=1e-12)


def test_region_out_writes_csv_and_prints_summary(runner, sym06, tmp_path):
    out = tmp_path / "boundary.csv"
    result = runner.invoke(main, ["region", sym06, "--out", str(out), "--samples", "10"])
    assert result.exit_code == 0
    assert out.read_text().startswith("lambda1,lambda2,segment_kind,source\n")
    summary = json.loads(result.output)
    assert summary["shape_class"] == "ThreePiece"
    assert summary["lambda1_max"] == pytest.approx(0.6, rel=1e-12)
    assert [s["kind"] for s in summary["segments"]] == ["linear", "sqrt", "linear"]
    assert summary["csv"] == str(out)


def test_region_set_override(runner, sym06):
    result = runner.invoke(main, ["region", sym06, "--samples", "2", "--set", "f11=0.5"])
    assert result.exit_code == 0
    xs = [float(line.split(",")[0]) for line in result.output.splitlines()[1:]]
    assert max(xs) == pytest.approx(0.15, rel=1e-9)  # lambda1_max halves to 0.3


def test_region_polygon_summary(runner, pi04, tmp_path):
    out = tmp_path / "b.csv"
    result = runner.invoke(main, ["region", pi04, "--out", str(out)])
    assert result.exit_code == 0
    assert json.loads(result.output)["shape_class"] == "Polygon"


def test_region_rejects_bad_inputs(runner, sym06, tmp_path):
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{not json")
    assert runner.invoke(main, ["region", str(bad_json)]).exit_code == 2
    unknown_key = tmp_path / "unknown.json"
    unknown_key.write_text(json.dumps({**MOSTLY_BAD_04, "bogus": 1}))
    assert runner.invoke(main, ["region", str(unknown_key)]).exit_code == 2
    assert runner.invoke(main, ["region", sym06, "--samples", "0"]).exit_code == 2
    assert runner.invoke(main, ["region", str(tmp_path / "missing.json")]).exit_code == 2


def test_region_write_failure_exits_3(runner, sym06, tmp_path):
    target = tmp_path / "no_such_dir" / "x.csv"
    result = runner.invoke(main, ["region", sym06, "--out", str(target)])
    assert result.exit_code == 3


# -- delay ----------------------------------------------------------------

def test_delay_default_sweep(runner, pi04):
    result = runner.invoke(main, ["delay", pi04])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "lambda,q_star,delay_analytic,delay_simulated,ci95,status"
    assert len(lines) == 26
    rows = [line.split(",") for line in lines[1:]]
    # mostly-bad channel: throttling never helps, q_star is exactly 1
    assert all(r[1] == "1" for r in rows)
    assert all(r[5] == "ok" for r in rows)
    assert all(r[3] == "" and r[4] == "" for r in rows)  # no --simulate


def test_delay_unstable_rows_are_empty(runner, sym06):
    result = runner.invoke(main, ["delay", sym06, "--lambda-sweep", "0:0.3:4"])
    assert result.exit_code == 0
    rows = [line.split(",") for line in result.output.splitlines()[1:]]
    assert [r[5] for r in rows] == ["ok", "ok", "ok", "unstable"]
    assert rows[3] == ["0.3", "", "", "", "", "unstable"]


def test_delay_q_star_anchor(runner, sym06):
    result = runner.invoke(main, ["delay", sym06, "--lambda-sweep", "0.2:0.2:1"])
    assert result.exit_code == 0
    row = result.output.splitlines()[1].split(",")
    expected = delay_roots(SymmetricParams(0.6, 1.0, 0.2))[0]
    assert row[1] == f"{expected:.12g}"


def test_delay_rejects_asymmetric_scenarios(runner, sym06, tmp_path):
    asym = dict(SYMMETRIC_06)
    asym["f12"] = 0.9
    path = tmp_path / "asym.json"
    path.write_text(json.dumps(asym))
    result = runner.invoke(main, ["delay", str(path)])
    assert result.exit_code == 2
    assert "symmetric" in result.output


def test_delay_rejects_bad_sweeps(runner, sym06):
    assert runner.invoke(main, ["delay", sym06, "--lambda-sweep", "0:0.2"]).exit_code == 2
    assert runner.invoke(main, ["delay", sym06, "--lambda-sweep", "0.2:0.1:5"]).exit_code == 2
    assert runner.invoke(main, ["delay", sym06, "--lambda-sweep", "a:b:3"]).exit_code == 2


def test_delay_simulate_fills_columns(runner, sym06, tmp_path):
    out = tmp_path / "delay.csv"
    result = runner.invoke(
        main,
        ["delay", sym06, "--lambda-sweep", "0:0.15:2", "--simulate",
         "--horizon", "60000", "--warmup", "5000", "--out", str(out)],
        env={"ALOHA_GE_THREADS": "2"},
    )
    assert result.exit_code == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    zero, loaded = rows
    assert zero[3] == ""  # nothing to measure without arrivals
    assert loaded[5] == "ok" and loaded[3] != "" and loaded[4] != ""
    # simulated delay should land near the analytic value
    assert float(loaded[3]) == pytest.approx(float(loaded[2]), rel=0.15)


# -- simulate ---------------------------------------------------------------

def test_simulate_json_output(runner, sym06):
    result = runner.invoke(main, ["simulate", sym06, "--horizon", "50000"])
    assert result.exit_code == 0
    stats = json.loads(result.output)
    assert stats["stability_verdict"] == "stable-likely"
    assert stats["throughput1"] == pytest.approx(0.2, abs=0.02)
    assert stats["throughput2"] == pytest.approx(0.1, abs=0.02)


def test_simulate_is_reproducible(runner, sym06):
    args = ["simulate", sym06, "--horizon", "20000", "--seed", "9"]
    first = runner.invoke(main, args)
    second = runner.invoke(main, args)
    assert first.exit_code == second.exit_code == 0
    assert first.output == second.output
    third = runner.invoke(main, ["simulate", sym06, "--horizon", "20000", "--seed", "10"])
    assert third.output != first.output


def test_simulate_saturated_mode(runner, sym06):
    result = runner.invoke(
        main,
        ["simulate", sym06, "--mode", "saturated-both", "--horizon", "50000",
         "--set", "arrivals.lambda1=0", "--set", "arrivals.lambda2=0"],
    )
    assert result.exit_code == 0
    stats = json.loads(result.output)
    assert stats["throughput1"] == 0.0
    assert stats["mean_delay1"] is None


def test_simulate_event_log(runner, sym06, tmp_path):
    log = tmp_path / "events.csv"
    result = runner.invoke(
        main, ["simulate", sym06, "--horizon", "3000", "--event-log", str(log)]
    )
    assert result.exit_code == 0
    lines = log.read_text().splitlines()
    assert lines[0] == "slot,state1,state2,tx1,tx2,succ1,succ2,q1,q2"
    assert len(lines) == 3001


def test_simulate_requires_policy(runner, pi04):
    result = runner.invoke(main, ["simulate", pi04])
    assert result.exit_code == 2
    assert "policy" in result.output


def test_simulate_rejects_invalid_config(runner, sym06):
    result = runner.invoke(
        main, ["simulate", sym06, "--horizon", "1000", "--warmup", "2000"]
    )
    assert result.exit_code == 2


def test_simulate_rejects_unknown_mode(runner, sym06):
    assert runner.invoke(main, ["simulate", sym06, "--mode", "bogus"]).exit_code == 2


# -- verify -----------------------------------------------------------------

def test_verify_region_quick(runner):
    result = runner.invoke(main, ["verify", "--suite", "region", "--budget", "quick"])
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert report["all_passed"] is True
    assert report["suite"] == "region"
    assert [r["criterion"] for r in report["results"]] == [1, 2, 3, 4]
    assert all(r["passed"] for r in report["results"])
    assert "[PASS] criterion 1" in result.stderr


def test_verify_writes_report(runner, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(
        main,
        ["verify", "--suite", "region", "--budget", "quick", "--out", str(out)],
    )
    assert result.exit_code == 0
    assert json.loads(out.read_text())["all_passed"] is True


def test_verify_rejects_unknown_suite(runner):
    assert runner.invoke(main, ["verify", "--suite", "bogus"]).exit_code == 2


# -- helpers ----------------------------------------------------------------

def test_fmt_twelve_significant_digits():
    assert _fmt(None) == ""
    assert _fmt(0.9511918124712462) == "0.951191812471"
    assert _fmt(0.25) == "0.25"
    assert _fmt(1.0 / 3.0) == "0.333333333333"


def test_parse_sweep():
    vals = _parse_sweep("0:0.2:5")
    assert list(vals) == pytest.approx([0.0, 0.05, 0.1, 0.15, 0.2])


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("ALOHA_GE_THREADS", "3")
    assert _thread_count() == 3
    monkeypatch.setenv("ALOHA_GE_THREADS", "")
    assert _thread_count() >= 1
    import click
    monkeypatch.setenv("ALOHA_GE_THREADS", "zero")
    with pytest.raises(click.UsageError):
        _thread_count()
    monkeypatch.setenv("ALOHA_GE_THREADS", "0")
    with pytest.raises(click.UsageError):
        _thread_count()
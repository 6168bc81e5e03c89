import json
import subprocess
import sys

from conftest import SCENARIOS, cat_with_scenario

CAT = str(SCENARIOS / "cat.iag")


def run_cli(*args, stdin=None):
    return subprocess.run(
        [sys.executable, "-m", "intentsim", *args],
        capture_output=True,
        text=True,
        input=stdin,
        timeout=60,
    )


def test_trace_has_one_line_per_tick(tmp_path):
    trace = tmp_path / "out.jsonl"
    proc = run_cli("run", CAT, "--ticks", "20", "--seed", "42", "--trace", str(trace), "--quiet")
    assert proc.returncode == 0, proc.stderr
    lines = trace.read_text().splitlines()
    assert len(lines) == 20
    assert [json.loads(l)["tick"] for l in lines] == list(range(1, 21))


def test_same_command_twice_byte_identical(tmp_path):
    t1, t2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for t in (t1, t2):
        proc = run_cli("run", CAT, "--ticks", "15", "--seed", "42", "--trace", str(t), "--quiet")
        assert proc.returncode == 0, proc.stderr
    assert t1.read_bytes() == t2.read_bytes()


def test_parse_error_exit_1_with_span(tmp_path):
    bad = tmp_path / "bad.iag"
    bad.write_text("agent a {\n  property = 1\n}\n")
    proc = run_cli("run", str(bad))
    assert proc.returncode == 1
    assert f"{bad}:2:" in proc.stderr


def test_validation_error_exit_1(tmp_path):
    bad = tmp_path / "bad.iag"
    bad.write_text("agent a { property x = 1\n  action f ensure: grow x { } }\n")
    proc = run_cli("run", str(bad))
    assert proc.returncode == 1
    assert "grow" in proc.stderr


def test_replay_and_repl_mutually_exclusive(tmp_path):
    proc = run_cli("run", CAT, "--replay", "x.jsonl", "--repl")
    assert proc.returncode == 2


def test_repl_records_session_replay_reproduces(tmp_path):
    scenario = tmp_path / "trapped.iag"
    scenario.write_text(cat_with_scenario(
        "scenario {\n  world 10 x 10\n  seed 42\n  spawn cat cat1 at (4, 4)\n"
        "  thing dog at (4, 4)\n}\n"
    ))
    live_trace = tmp_path / "live.jsonl"
    record = tmp_path / "edits.jsonl"
    script = "\n".join([
        "step 3",
        "effect add cat1 mew reduce danger",
        "step 2",
        "assert cat1 main :- groom.",
        "step 3",
        "quit",
    ]) + "\n"
    proc = run_cli("run", str(scenario), "--repl", "--quiet",
                   "--trace", str(live_trace), "--record", str(record),
                   stdin=script)
    assert proc.returncode == 0, proc.stderr
    assert len(live_trace.read_text().splitlines()) == 8
    recorded = [json.loads(l) for l in record.read_text().splitlines()]
    assert [r["edit"]["kind"] for r in recorded] == ["add_effect", "assert_clause"]

    replay_trace = tmp_path / "replay.jsonl"
    proc2 = run_cli("run", str(scenario), "--ticks", "8", "--quiet",
                    "--replay", str(record), "--trace", str(replay_trace))
    assert proc2.returncode == 0, proc2.stderr
    assert replay_trace.read_bytes() == live_trace.read_bytes()


def test_repl_explain_and_errors():
    proc = run_cli("run", CAT, "--repl", "--quiet",
                   stdin="step 1\nexplain cat1\nbogus\nquit\n")
    assert proc.returncode == 0
    assert "danger" in proc.stdout
    assert "error: unknown command 'bogus'" in proc.stdout

import pytest

import sit_config
import sitkernel


def test_batch_run_echoes_and_summarizes(sessions_dir, capsys):
    code = sitkernel.main(["--batch", str(sessions_dir / "species.sit")])
    printed = capsys.readouterr().out
    assert code == sit_config.EXIT_OK
    assert "I> bob: ~IND" in printed
    assert "Q> sit1 |= <<human, ?X, 1>>" in printed
    assert "sit1 |= <<human, bob, 1>>" in printed
    assert "BATCH COMPLETE" in printed
    assert "Errors: 0" in printed


def test_batch_exit_code_for_empty_query(sessions_dir, capsys):
    assert sitkernel.main(["--batch", str(sessions_dir / "poor_worker.sit")]) == sit_config.EXIT_NO_SOLUTIONS


def test_batch_exit_code_for_errors(tmp_path, capsys):
    script = tmp_path / "bad.sit"
    script.write_text("bob: ~IND\nbob: ~IND\n", encoding="utf-8")
    assert sitkernel.main(["--batch", str(script)]) == sit_config.EXIT_ERROR
    assert "✗ DuplicateNameError" in capsys.readouterr().out


def test_kb_is_loaded_before_the_batch(tmp_path, capsys):
    kb = tmp_path / "kb.sit"
    kb.write_text("bob: ~IND\ns: ~SIT\n<happy | ~IND> [1]\ns |= <<happy, bob, 1>>\n", encoding="utf-8")
    script = tmp_path / "query.sit"
    script.write_text("Q> s |= <<happy, ?X, 1>>\n", encoding="utf-8")
    code = sitkernel.main(["--kb", str(kb), "--batch", str(script)])
    printed = capsys.readouterr().out
    assert code == sit_config.EXIT_OK
    assert "✓ Loaded 4 statements" in printed
    assert "s |= <<happy, bob, 1>>" in printed


def test_unreadable_kb(tmp_path, capsys):
    assert sitkernel.main(["--kb", str(tmp_path / "missing.sit")]) == sit_config.EXIT_ERROR
    assert "could not load" in capsys.readouterr().out


def test_depth_flag_reaches_the_engine(tmp_path, capsys):
    script = tmp_path / "deep.sit"
    script.write_text(
        "bob: ~IND\ns: ~SIT\n<man | ~IND>\n<human | ~IND>\n"
        "G: C: ?S |= <<human, ?X, 1>> <= ?S |= <<man, ?X, 1>>\n"
        "s |= <<man, bob, 1>>\n"
        "Q> s |= <<human, ?X, 1>>\n",
        encoding="utf-8",
    )
    assert sitkernel.main(["--batch", str(script), "--depth", "0"]) == sit_config.EXIT_ERROR
    assert "✗ DepthLimitError" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [["--depth", "-1"], ["--max-firings", "0"]])
def test_invalid_limits_are_rejected(argv):
    with pytest.raises(SystemExit):
        sitkernel.parse_args(argv)


def test_interactive_session_reads_until_eof(monkeypatch, capsys):
    lines = iter(["bob: ~IND", "sit1: \\", "~SIT", ":quit", "ann: ~IND"])

    def fake_input(prompt):
        try:
            return next(lines)
        except StopIteration:
            raise EOFError

    monkeypatch.setattr("builtins.input", fake_input)
    assert sitkernel.main([]) == sit_config.EXIT_OK
    printed = capsys.readouterr().out
    assert "✓ bob: ~IND" in printed
    assert "✓ sit1: ~SIT" in printed
    assert "✓ bye" in printed
    assert "ann" not in printed

import pandas as pd
import pytest

import kb_report
from conftest import run


def test_fact_table_origins(session):
    run(
        session,
        "bob: ~IND",
        "s1: ~SIT",
        "s2: ~SIT",
        "<man | ~IND>",
        "<human | ~IND>",
        "LIFE: MAN-HUMAN: ?S |= <<man, ?X, 1>> => ?S |= <<human, ?X, 1>>",
        "s1 |= <<man, bob, 1>>",
        "s2 |= <<part-of, s1, s2, 1>>",
    )
    facts = kb_report.fact_table(session.store, session.engine)
    assert list(facts.columns) == kb_report.FACT_COLUMNS
    origins = {(row.Situation, row.Relation): row.Origin for row in facts.itertuples()}
    assert origins[("s1", "man")] == "asserted"
    assert origins[("s1", "human")] == "chained"
    assert origins[("s2", "part-of")] == "hierarchy"


def test_fact_table_marks_unsaturated_infons(session):
    run(session, "bob: ~IND", "s: ~SIT", "<gives | ~IND, ~IND> [1]", "s |= <<gives, bob, 1>>")
    facts = kb_report.fact_table(session.store)
    row = facts.iloc[0]
    assert row["Arguments"] == "bob, -"
    assert row["Saturated"] == "No"


def test_breakdown_counts(worked_session):
    facts = kb_report.fact_table(worked_session.store, worked_session.engine)
    text = kb_report.breakdown(facts)
    assert text.startswith("Facts per situation:")
    assert "sit1" in text
    assert kb_report.breakdown(pd.DataFrame(columns=kb_report.FACT_COLUMNS)) == "No facts stored."


def test_write_report_csv(worked_session, tmp_path):
    facts = kb_report.fact_table(worked_session.store, worked_session.engine)
    path = tmp_path / "facts.csv"
    kb_report.write_report(facts, path)
    written = pd.read_csv(path)
    assert len(written) == len(facts)
    assert set(written["Situation"]) == {"anchor1", "sit1", "sit2", "w"}


def test_write_report_xlsx(worked_session, tmp_path):
    facts = kb_report.fact_table(worked_session.store, worked_session.engine)
    path = tmp_path / "facts.xlsx"
    kb_report.write_report(facts, path)
    assert len(pd.read_excel(path)) == len(facts)


def test_write_report_rejects_other_formats(worked_session, tmp_path):
    facts = kb_report.fact_table(worked_session.store, worked_session.engine)
    with pytest.raises(ValueError):
        kb_report.write_report(facts, tmp_path / "facts.json")


def test_report_directive(worked_session, tmp_path):
    path = tmp_path / "facts.csv"
    output = run(worked_session, f":report {path}")[0]
    assert output.startswith(f"✓ report written to {path}")
    assert path.exists()


def test_listing_tables(worked_session):
    situations = kb_report.situations_table(worked_session.store)
    row = situations[situations["Situation"] == "sit2"].iloc[0]
    assert row["Part of"] == "sit1"
    assert row["Time"] == "t2"
    parameters = kb_report.parameters_table(worked_session.ontology)
    watcher = parameters[parameters["Parameter"] == "E"].iloc[0]
    assert watcher["Restrictions"] == "<<sees, E, sit1, 1>>"
    relations = kb_report.relations_table(worked_session.ontology)
    assert "part-of" in set(relations["Relation"])


def test_main_writes_report(worked_session, tmp_path, monkeypatch, capsys):
    kb_path = tmp_path / "kb.sit"
    report_path = tmp_path / "report.csv"
    run(worked_session, f":save {kb_path}")
    monkeypatch.setattr("sys.argv", ["kb_report.py", str(kb_path), str(report_path)])
    kb_report.main()
    printed = capsys.readouterr().out
    assert "REPORT COMPLETE" in printed
    assert report_path.exists()

#!/usr/bin/env python3
"""
Knowledge Base Report

Builds pandas tables over a session's knowledge base: one row per stored
fact for the fact report, plus the listings shown by the :list directive.

Usage:
    python3 kb_report.py KB_FILE [REPORT_FILE]

Loads KB_FILE into a fresh session and writes the fact report as .xlsx
(default Situation_Fact_Report.xlsx) or .csv, then prints a breakdown.
"""

import sys
from pathlib import Path

import pandas as pd

import sit_config
from situation_store import WORLD

FACT_COLUMNS = ["Situation", "Relation", "Arguments", "Polarity", "Saturated", "Origin"]


def fact_table(store, engine=None):
    """
    One row per infon a situation holds in its own right.

    Origin is "chained" for facts asserted by forward chaining,
    "hierarchy" for part-of facts and "asserted" otherwise.
    """
    chained = engine.chained if engine is not None else set()
    rows = []
    for situation in store.situation_names():
        for infon in sorted(store.own_infons(situation), key=str):
            if (situation, infon) in chained:
                origin = "chained"
            elif infon.relation == "part-of" and infon.polarity == 1:
                origin = "hierarchy"
            else:
                origin = "asserted"
            rows.append({
                "Situation": situation,
                "Relation": infon.relation,
                "Arguments": ", ".join(str(arg) for arg in infon.args),
                "Polarity": infon.polarity,
                "Saturated": "Yes" if infon.is_saturated else "No",
                "Origin": origin,
            })
    return pd.DataFrame(rows, columns=FACT_COLUMNS)


def write_report(facts, path):
    """Write the fact table as .csv or .xlsx (openpyxl)."""
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        facts.to_csv(path, index=False)
    elif suffix == ".xlsx":
        facts.to_excel(path, index=False)
    else:
        raise ValueError(f"report file must end in .csv or .xlsx, got '{path}'")


def breakdown(facts):
    """Facts per situation and per relation."""
    if facts.empty:
        return "No facts stored."
    lines = ["Facts per situation:", facts["Situation"].value_counts().sort_index().to_string()]
    lines += ["", "Facts per relation:", facts["Relation"].value_counts().sort_index().to_string()]
    lines += ["", "Origin:", facts["Origin"].value_counts().sort_index().to_string()]
    return "\n".join(lines)


def situations_table(store):
    rows = []
    for name in store.situation_names():
        time, place = store.located(name)
        rows.append({
            "Situation": name,
            "Part of": ", ".join(store.parents_of(name)) or ("-" if name == WORLD else WORLD),
            "Time": time if time is not None else "-",
            "Place": place if place is not None else "-",
            "Own facts": len(store.own_infons(name)),
        })
    return pd.DataFrame(rows)


def relations_table(ontology):
    rows = [
        {
            "Relation": name,
            "Roles": ", ".join("/".join(str(ref) for ref in sorted(role, key=str)) for role in relation.roles),
            "Minimality": relation.minimality,
        }
        for name, relation in sorted(ontology.relations.items())
    ]
    return pd.DataFrame(rows)


def constraints_table(engine):
    rows = [
        {
            "Group": constraint.group,
            "Name": constraint.name,
            "Direction": str(constraint.direction),
            "Class": constraint.label or "-",
            "Conditions": ", ".join(str(c) for c in constraint.conditions) or "-",
            "Candidate": "Yes" if engine.is_candidate(constraint) else "No",
        }
        for constraint in engine.sorted_constraints()
    ]
    return pd.DataFrame(rows)


def parameters_table(ontology):
    rows = [
        {
            "Parameter": name,
            "Kind": f"~{parameter.base.value}",
            "Restrictions": ", ".join(sorted(str(r) for r in parameter.restrictions)) or "-",
        }
        for name, parameter in sorted(ontology.parameters.items())
    ]
    return pd.DataFrame(rows)


def anchors_table(store):
    rows = [
        {"Anchoring situation": situation, "Parameter": parameter, "Anchor": str(target)}
        for situation in sorted(store.anchors)
        for parameter, target in sorted(store.anchors[situation].items())
    ]
    return pd.DataFrame(rows, columns=["Anchoring situation", "Parameter", "Anchor"])


def render_table(table):
    if table.empty:
        return "(none)"
    return table.to_string(index=False)


def main():
    from sit_session import Session
    from kb_storage import load_kb

    if len(sys.argv) < 2:
        print("Usage: python3 kb_report.py KB_FILE [REPORT_FILE]")
        sys.exit(sit_config.EXIT_ERROR)
    kb_file = sys.argv[1]
    report_file = sys.argv[2] if len(sys.argv) > 2 else sit_config.DEFAULT_REPORT_FILE

    print("=" * sit_config.BANNER_WIDTH)
    print("SITUATION FACT REPORT")
    print("=" * sit_config.BANNER_WIDTH)

    session = Session()
    count = load_kb(session, kb_file)
    print(f"\n✓ Loaded {count} statements from {kb_file}")

    facts = fact_table(session.store, session.engine)
    write_report(facts, report_file)

    print("\n" + "=" * sit_config.BANNER_WIDTH)
    print("REPORT COMPLETE")
    print("=" * sit_config.BANNER_WIDTH)
    print(f"\nOutput saved to: {report_file}")
    print(f"Total facts in report: {len(facts)}")
    print()
    print(breakdown(facts))


if __name__ == "__main__":
    main()

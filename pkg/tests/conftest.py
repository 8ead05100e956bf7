import io
import os
import sys
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import pytest

from ladinmt.btx.corpus import read_monolingual, read_tsv
from ladinmt.morphodict import default_dictionary_dir, load_dictionary
from ladinmt.rules import default_rules_path, load_rules

ROOT = Path(__file__).resolve().parent
DATA = Path(str(default_dictionary_dir())).parent
CORPUS = DATA / "corpus"
GOLDEN = ROOT / "golden"
UPDATE_GOLDEN = os.environ.get("LADINMT_UPDATE_GOLDEN") == "1"


@pytest.fixture(scope="session")
def dictionary():
    return load_dictionary(default_dictionary_dir())


@pytest.fixture(scope="session")
def rules():
    return {d: load_rules(default_rules_path(d)) for d in ("lvb-ita", "ita-lvb")}


@pytest.fixture(scope="session")
def authentic():
    return read_tsv(CORPUS / "authentic.tsv")


@pytest.fixture(scope="session")
def mono_lvb():
    return read_monolingual(CORPUS / "mono_lvb.txt")


@pytest.fixture(scope="session")
def mono_ita():
    return read_monolingual(CORPUS / "mono_ita.txt")


def run_cli(*argv, stdin=""):
    """Run the CLI in-process; return (exit code, stdout, stderr)."""
    from ladinmt.cli import main

    out, err = io.StringIO(), io.StringIO()
    old_in = sys.stdin
    sys.stdin = io.StringIO(stdin)
    try:
        with redirect_stdout(out), redirect_stderr(err):
            try:
                code = main([str(a) for a in argv])
            except SystemExit as exc:
                code = exc.code if isinstance(exc.code, int) else 2
    finally:
        sys.stdin = old_in
    return code, out.getvalue(), err.getvalue()


def check_golden(name, text):
    path = GOLDEN / name
    if UPDATE_GOLDEN:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    assert text == path.read_text(encoding="utf-8"), f"golden file {name} differs"


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" in props:
                lines.append((props["criterion"], "PASS" if outcome == "passed" else "FAIL", props.get("title", "")))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for n, verdict, title in sorted(lines):
            terminalreporter.write_line(f"{verdict} criterion {n}: {title}")

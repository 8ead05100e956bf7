import hashlib
import json

import pytest

from conftest import CORPUS, DATA, GOLDEN, check_golden, run_cli

SUBCOMMANDS = [
    (),
    ("dict",),
    ("dict", "compile"),
    ("dict", "coverage"),
    ("translate",),
    ("segment",),
    ("normalize",),
    ("classify",),
    ("classify", "train"),
    ("classify", "predict"),
    ("classify", "partition"),
    ("bt",),
    ("bt", "run"),
    ("prompt",),
    ("prompt", "build"),
    ("prompt", "parse"),
    ("recipe",),
    ("recipe", "assemble"),
    ("recipe", "manifest"),
    ("eval",),
    ("eval", "bleu"),
    ("eval", "chrf"),
    ("eval", "rtt"),
]


@pytest.mark.parametrize("cmd", SUBCOMMANDS, ids=lambda c: "-".join(c) or "top")
def test_help_golden(cmd):
    code, out, _ = run_cli(*cmd, "--help")
    assert code == 0
    check_golden(f"help/{'-'.join(cmd) or 'ladinmt'}.txt", out)


def test_help_lists_every_flag():
    from ladinmt.cli import build_parser

    def walk(parser, path=()):
        for action in parser._actions:
            if hasattr(action, "choices") and isinstance(action.choices, dict):
                for name, sub in action.choices.items():
                    yield from walk(sub, path + (name,))
        yield path, parser

    for path, parser in walk(build_parser()):
        text = parser.format_help()
        for action in parser._actions:
            for opt in action.option_strings:
                assert opt in text, (path, opt)


def test_unknown_subcommand():
    code, _, err = run_cli("bogus")
    assert code == 2
    assert "invalid choice" in err


def test_typed_error_and_exit_code(tmp_path):
    code, _, err = run_cli("eval", "bleu", "--hyp", CORPUS / "mono_lvb.txt", "--ref", CORPUS / "mono_ita.txt")
    assert code == 2
    assert err.startswith("error[metric]: length mismatch")
    code, _, err = run_cli("translate", "--in", tmp_path / "missing.txt")
    assert code == 2 and err.startswith("error[io]")
    bad = tmp_path / "c.json"
    bad.write_text('{"wat": 1}', encoding="utf-8")
    code, _, err = run_cli("bt", "run", "--config", bad, "--in", CORPUS / "mono_lvb.txt")
    assert code == 2 and err.startswith("error[config]: unknown config keys: wat")


def test_dict_compile_counts(tmp_path, dictionary):
    dump = tmp_path / "d.dump"
    code, out, _ = run_cli("dict", "compile", "--emit", dump)
    assert code == 0
    rep = dictionary.report
    assert f"lang=lvb paradigms={rep.paradigms['lvb']} lemmas={rep.lemmas['lvb']} forms={rep.forms['lvb']}" in out
    assert f"bilingual={rep.bilingual} warnings=0" in out
    assert dump.read_text(encoding="utf-8") == dictionary.dumps()
    code, out, _ = run_cli("translate", "--dict", dump, stdin="chësc liber é to\n")
    assert out == "questo libro è tuo\n"


def test_translate_trace_and_blank_lines():
    code, out, err = run_cli("translate", "--trace", stdin="olá vaste pa?\n\nchësc liber é to\n")
    assert code == 0
    assert out == "dove vai?\n\nquesto libro è tuo\n"
    lines = err.splitlines()
    assert lines[2].startswith("line=1 index=2 source=pa kind=word")
    assert "rules=drop-pa" in lines[2] and "target=-" in lines[2]
    assert any(l.startswith("line=3 ") for l in lines)


def test_translate_jobs_do_not_change_output():
    text = (CORPUS / "mono_lvb.txt").read_text(encoding="utf-8")
    _, one, _ = run_cli("translate", "--jobs", "1", stdin=text)
    _, four, _ = run_cli("translate", "--jobs", "4", stdin=text)
    assert one == four and one.count("\n") == text.count("\n")


def test_reverse_translate():
    code, out, _ = run_cli("translate", "--direction", "ita-lvb", stdin="questo libro è tuo\n")
    assert out == "chësc liber é to\n"


def test_segment_cli(tmp_path):
    code, out, _ = run_cli("segment", stdin="Bun dé. Co vara\npa? Dr. Rossi é chiló.")
    assert out == "Bun dé.\nCo vara pa?\nDr. Rossi é chiló.\n"


def test_normalize_cli(tmp_path):
    report = tmp_path / "r.txt"
    code, out, err = run_cli("normalize", "--report", report, stdin="Chesc liber é to\nxyzzy\n")
    assert out == "Chësc liber é to\n"
    assert report.read_text(encoding="utf-8").splitlines()[:3] == ["total=2", "kept=1", "dropped=1"]


def test_eval_identity(tmp_path):
    code, out, _ = run_cli("eval", "bleu", "--hyp", CORPUS / "mono_lvb.txt", "--ref", CORPUS / "mono_lvb.txt")
    assert code == 0 and "bleu=100.00" in out.splitlines()
    rep = tmp_path / "r.json"
    code, out, _ = run_cli(
        "eval", "chrf", "--hyp", CORPUS / "mono_lvb.txt", "--ref", CORPUS / "mono_lvb.txt", "--json-report", rep
    )
    assert "chrfpp=100.00" in out
    obj = json.loads(rep.read_text(encoding="utf-8"))
    assert len(obj["per_sentence"]) == 30


def test_eval_rtt_table():
    code, out, _ = run_cli(
        "eval", "rtt", "--pairs", "R4/R4,N4/L4", "--lvb", CORPUS / "mono_lvb.txt", "--ita", CORPUS / "mono_ita.txt"
    )
    assert code == 0
    assert out.splitlines()[1].startswith("R4/R4\t")
    code, out, _ = run_cli("eval", "rtt", "--a", "R1", "--b", "identity", "--in", CORPUS / "mono_lvb.txt")
    assert code == 0 and out.startswith("sentences=30\n")


def test_prompt_cli_round_trip(tmp_path):
    targets = "\n".join((CORPUS / "mono_lvb.txt").read_text(encoding="utf-8").splitlines()[:16]) + "\n"
    code, out, _ = run_cli("prompt", "build", "--authentic", CORPUS / "authentic.tsv", "--seed", "7", stdin=targets)
    assert code == 0
    check_golden("prompt_seed7.txt", out)
    src = tmp_path / "src.txt"
    src.write_text(targets, encoding="utf-8")
    resp = tmp_path / "resp.txt"
    resp.write_text((GOLDEN / "response_seed7.txt").read_text(encoding="utf-8"), encoding="utf-8")
    code, out, _ = run_cli("prompt", "parse", "--sources", src, "--in", resp)
    assert code == 0 and len(out.splitlines()) == 16
    resp.write_text("{}", encoding="utf-8")
    code, _, err = run_cli("prompt", "parse", "--sources", src, "--in", resp)
    assert code == 2 and err.startswith("error[validation]: malformed")


def test_recipe_cli(tmp_path):
    code, out, _ = run_cli("recipe", "assemble", "--name", "N2", "--out", tmp_path / "n2.jsonl", "--manifest", tmp_path / "m.json")
    assert code == 0
    assert "origin[authentic]=20" in out and "origin[back-translated]=30" in out
    code, out2, _ = run_cli("recipe", "manifest", "--records", tmp_path / "n2.jsonl")
    assert "total=50" in out2
    sha = json.loads((tmp_path / "m.json").read_text(encoding="utf-8"))["sha256"]
    assert f"sha256={sha}" in out2
    code, _, err = run_cli("recipe", "manifest", "--name", "X5")
    assert code == 2 and err.startswith("error[")


def test_recipe_from_config_file(tmp_path):
    cfg = json.loads((DATA / "pipeline.json").read_text(encoding="utf-8"))
    cfg["recipes"] = {
        "tiny": {
            "components": [
                {"kind": "authentic", "dataset": "authentic", "direction": "lvb-ita"},
                {"kind": "back-translated", "dataset": "mono_ita", "direction": "lvb-ita", "backend": "R1"},
            ]
        }
    }
    # relative paths resolve against the config's own directory
    for name in ("lld-ita", "respell.txt", "abbreviations.txt", "corpus"):
        (tmp_path / name).symlink_to(DATA / name)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    code, out, err = run_cli("recipe", "assemble", "--config", path, "--name", "tiny")
    assert code == 0, err
    assert "total=40" in out


def test_classify_cli(tmp_path):
    model = tmp_path / "m.json"
    code, out, _ = run_cli("classify", "train", "--synthetic", "60", "--rounds", "10", "--out", model, "--seed", "2")
    assert code == 0 and "heldout_accuracy=" in out
    code, out, _ = run_cli("classify", "predict", "--model", model, stdin="abc kqx\n\nzzz\n")
    assert len(out.splitlines()) == 2
    code, out, _ = run_cli("classify", "partition", "--model", model, "--in", CORPUS / "mono_lvb.txt", "--outdir", tmp_path / "p")
    assert code == 0
    assert sum(int(l.split("sentences=")[1].split()[0]) for l in out.splitlines()) == 30
    corpus = tmp_path / "c.tsv"
    corpus.write_text("no label here\n", encoding="utf-8")
    code, _, err = run_cli("classify", "train", "--corpus", corpus, "--out", model)
    assert code == 2 and err.startswith("error[config]")


def test_bt_run_is_reproducible(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"bt{k}.jsonl"
        code, out, _ = run_cli("bt", "run", "--in", CORPUS / "mono_ita.txt", "--out", path, "--seed", "3")
        assert code == 0 and "records=20" in out
        outs.append(hashlib.sha256(path.read_bytes()).hexdigest())
    assert outs[0] == outs[1]

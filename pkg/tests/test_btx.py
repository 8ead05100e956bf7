import json
import sys

import pytest

import oracles
from conftest import CORPUS, check_golden
from ladinmt.btx import prompt as P
from ladinmt.btx.backends import (
    ExternalCommandBackend,
    FunctionBackend,
    IdentityBackend,
    LLMJsonBackend,
    RBMTBackend,
    backend_from_config,
)
from ladinmt.btx.corpus import (
    AUTHENTIC,
    BACK_TRANSLATED,
    FORWARD_TRANSLATED,
    CorpusRecord,
    read_jsonl,
    read_monolingual,
    read_tsv,
    write_jsonl,
    write_tsv,
)
from ladinmt.btx.pipeline import RetryPolicy, RunReport, backtranslate, batch_id, load_checkpoint, translate_stream
from ladinmt.btx.recipes import (
    STANDARD_RECIPES,
    Dataset,
    Registry,
    assemble,
    emit_training_manifest,
    recipe_from_config,
    standard_recipe,
)
from ladinmt.errors import BackendError, BatchSizeError, ConfigError, RecipeError, ValidationError

# -- corpus records ----------------------------------------------------------


def test_record_validation_and_flip():
    r = CorpusRecord("ciao", "bun dé", "ita-lvb", BACK_TRANSLATED, "R1")
    f = r.flipped()
    assert f == CorpusRecord("bun dé", "ciao", "lvb-ita", FORWARD_TRANSLATED, "R1")
    assert f.flipped() == r
    with pytest.raises(ValueError):
        CorpusRecord("a", "b", "lvb-ita", AUTHENTIC, "R1")
    with pytest.raises(ValueError):
        CorpusRecord("a", "b", "lvb-ita", BACK_TRANSLATED, "human")
    with pytest.raises(ValueError):
        CorpusRecord("a", "b", "lvb-deu")


def test_jsonl_and_tsv_round_trip(tmp_path, authentic):
    path = tmp_path / "a.jsonl"
    assert write_jsonl(authentic, path) == len(authentic)
    assert read_jsonl(path) == authentic
    write_tsv(authentic, tmp_path / "a.tsv")
    assert read_tsv(tmp_path / "a.tsv") == authentic


def test_tsv_errors_name_the_line(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("a\tb\nno tab here\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="bad.tsv:2"):
        read_tsv(p)


# -- prompts -------------------------------------------------------------------


@pytest.fixture(scope="module")
def golden_prompt(authentic, mono_lvb):
    pairs = [(r.src, r.tgt) for r in authentic]
    return P.build_prompt(pairs, mono_lvb[:16], seed=7), pairs, mono_lvb[:16]


def _json_blocks(text):
    dec = json.JSONDecoder()
    blocks, i = [], 0
    while True:
        i = text.find("{", i)
        if i < 0:
            return blocks
        obj, end = dec.raw_decode(text, i)
        blocks.append(obj)
        i = end


def test_prompt_structure(golden_prompt):
    text, pairs, targets = golden_prompt
    check_golden("prompt_seed7.txt", text)
    shots, todo = _json_blocks(text)
    assert len(shots["translations"]) == 8
    assert len(todo["translations"]) == 16
    for item in shots["translations"] + todo["translations"]:
        assert list(item) == ["Ladin", "Italian"]
    assert all((e["Ladin"], e["Italian"]) in pairs for e in shots["translations"])
    assert [e["Ladin"] for e in todo["translations"]] == targets
    assert all(e["Italian"] == "" for e in todo["translations"])


def test_prompt_is_seeded(golden_prompt):
    text, pairs, targets = golden_prompt
    assert P.build_prompt(pairs, targets, seed=7) == text
    assert P.build_prompt(pairs, targets, seed=8) != text


def test_prompt_limits(authentic):
    pairs = [(r.src, r.tgt) for r in authentic]
    with pytest.raises(ValueError):
        P.build_prompt(pairs, ["x"] * 17, seed=0)
    with pytest.raises(ValueError):
        P.build_prompt(pairs[:3], ["x"], seed=0)
    with pytest.raises(ValueError):
        P.build_prompt(pairs, [], seed=0)


def test_parse_filled_response(golden_prompt):
    text, _, targets = golden_prompt
    filled = P.fill_response(text, [f"t{i}" for i in range(16)])
    check_golden("response_seed7.txt", filled)
    assert P.parse_response("```json\n" + filled + "```", targets) == [(s, f"t{i}") for i, s in enumerate(targets)]


def _corrupt(filled, how):
    obj = json.loads(filled)
    items = obj["translations"]
    if how == "malformed":
        return filled.replace('"translations"', "translations", 1)
    if how == "count-mismatch":
        items.pop()
    elif how == "source-mutated":
        items[3]["Ladin"] += " x"
    elif how == "empty-translation":
        items[5]["Italian"] = "  "
    return json.dumps(obj, ensure_ascii=False)


@pytest.mark.parametrize("reason", ValidationError.REASONS)
def test_parse_rejects_corruptions(golden_prompt, reason):
    text, _, targets = golden_prompt
    filled = P.fill_response(text, [f"t{i}" for i in range(16)])
    with pytest.raises(ValidationError) as exc:
        P.parse_response(_corrupt(filled, reason), targets)
    assert exc.value.reason == reason


def test_parse_malformed_variants():
    for text in ["no json", "{", '{"translations": 3}', '{"translations": [{"Ladin": 1, "Italian": "x"}]}']:
        with pytest.raises(ValidationError) as exc:
            P.parse_response(text, ["a"])
        assert exc.value.reason == "malformed"


# -- backends ----------------------------------------------------------------


def test_identity_and_batch_size_check():
    assert IdentityBackend("id").translate(["a", "b"], "lvb-ita") == ["a", "b"]
    bad = FunctionBackend("bad", lambda s, d: s[:-1])
    with pytest.raises(BatchSizeError):
        bad.translate(["a", "b"], "lvb-ita")


def test_rbmt_backend(dictionary, rules):
    be = RBMTBackend("R1", dictionary, rules)
    assert be.translate(["chësc liber é to"], "lvb-ita") == ["questo libro è tuo"]
    assert be.translate(["questo libro è tuo"], "ita-lvb") == ["chësc liber é to"]


def test_external_command_backend():
    code = "import sys,os; [print(os.environ['LADINMT_DIRECTION'] + ':' + l.strip().upper()) for l in sys.stdin]"
    be = ExternalCommandBackend("ext", [sys.executable, "-c", code])
    assert be.translate(["ab", "c"], "lvb-ita") == ["lvb-ita:AB", "lvb-ita:C"]
    fail = ExternalCommandBackend("ext", [sys.executable, "-c", "import sys; sys.exit(3)"])
    with pytest.raises(BackendError, match="exit status 3"):
        fail.translate(["a"], "lvb-ita")


def test_llm_backend_round_trip(authentic):
    pairs = [(r.src, r.tgt) for r in authentic]
    prompts = []

    def complete(prompt):
        prompts.append(prompt)
        _, todo = _json_blocks(prompt)
        return P.fill_response(prompt, [e["Ladin"].upper() for e in todo["translations"]])

    be = LLMJsonBackend("L1", "http://unused", pairs, seed=3, complete=complete)
    assert be.translate(["bun dé", "co vara"], "lvb-ita") == ["BUN DÉ", "CO VARA"]
    assert be.prompt_for(["bun dé", "co vara"]) == prompts[0]
    with pytest.raises(ConfigError):
        be.translate(["ciao"], "ita-lvb")


def test_llm_backend_invalid_response_is_backend_error(authentic):
    pairs = [(r.src, r.tgt) for r in authentic]
    be = LLMJsonBackend("L1", "http://unused", pairs, complete=lambda p: "sorry")
    with pytest.raises(BackendError, match="malformed"):
        be.translate(["bun dé"], "lvb-ita")


def test_backend_from_config(tmp_path):
    assert isinstance(backend_from_config({"id": "x", "kind": "identity"}), IdentityBackend)
    assert isinstance(backend_from_config({"id": "r", "kind": "internal-rbmt"}), RBMTBackend)
    with pytest.raises(ConfigError, match="unknown kind"):
        backend_from_config({"id": "x", "kind": "nope"})
    with pytest.raises(ConfigError):
        backend_from_config({"kind": "identity"})


# -- pipeline ------------------------------------------------------------------


class Flaky(FunctionBackend):
    """Fails the first ``failures`` calls for every batch containing ``poison``."""

    def __init__(self, failures, poison="boom"):
        self.calls = []
        self.left = failures

        def fn(sentences, direction):
            self.calls.append(list(sentences))
            if poison in sentences and self.left > 0:
                self.left -= 1
                raise BackendError("transient")
            return [s.upper() for s in sentences]

        super().__init__("flaky", fn, batch_size=2)


def test_retry_then_success():
    sleeps = []
    be = Flaky(2)
    out = list(translate_stream(be, ["a", "boom", "c"], "lvb-ita", retry=RetryPolicy(3, 0.5), sleep=sleeps.append))
    assert out == [("a", "A"), ("boom", "BOOM"), ("c", "C")]
    assert sleeps == [0.5, 1.0]


def test_quarantine_after_retries(tmp_path):
    q = tmp_path / "q.jsonl"
    report = RunReport()
    be = Flaky(10)
    out = list(
        translate_stream(be, ["a", "boom", "c", "d"], "lvb-ita", retry=RetryPolicy(2, 0), sleep=lambda s: None,
                         quarantine=q, report=report)
    )
    assert out == [("a", None), ("boom", None), ("c", "C"), ("d", "D")]
    (entry,) = [json.loads(l) for l in q.read_text(encoding="utf-8").splitlines()]
    assert entry["sentences"] == ["a", "boom"]
    assert entry["batch"] == batch_id(0, "lvb-ita", ["a", "boom"])
    assert (report.quarantined_batches, report.quarantined_sentences, report.retries) == (1, 2, 1)


def test_batch_size_error_is_not_retried():
    calls = []

    def fn(s, d):
        calls.append(s)
        return s[:1]

    out = list(translate_stream(FunctionBackend("short", fn, 2), ["a", "b"], "lvb-ita", sleep=lambda s: None))
    assert out == [("a", None), ("b", None)]
    assert len(calls) == 1


def test_checkpoint_resume(tmp_path):
    ck = tmp_path / "ck.jsonl"
    sents = [f"s{i}" for i in range(7)]
    first = list(translate_stream(FunctionBackend("f", lambda s, d: [x + "!" for x in s], 3), sents, "lvb-ita", checkpoint=ck))
    # a torn trailing line must be tolerated
    with open(ck, "a", encoding="utf-8") as fh:
        fh.write('{"batch": "0000')
    assert len(load_checkpoint(ck)) == 3
    calls = []
    report = RunReport()

    def never(s, d):
        calls.append(s)
        return s

    again = list(translate_stream(FunctionBackend("f", never, 3), sents, "lvb-ita", checkpoint=ck, report=report))
    assert again == first
    assert calls == []
    assert report.resumed_batches == 3


@pytest.mark.parametrize("jobs", [1, 3])
def test_stream_order_is_independent_of_jobs(jobs):
    import time

    def slow(s, d):
        time.sleep(0.001 * (len(s[0]) % 3))
        return [x[::-1] for x in s]

    sents = [f"sentence {i} " + "x" * (i % 5) for i in range(40)]
    out = list(translate_stream(FunctionBackend("slow", slow, 4), sents, "lvb-ita", jobs=jobs))
    assert out == [(s, s[::-1]) for s in sents]


def test_backtranslate_direction_and_text(dictionary, rules, mono_ita):
    be = RBMTBackend("R1", dictionary, rules)
    recs = list(backtranslate(be, mono_ita, "lvb-ita"))
    assert len(recs) == len(mono_ita)
    for r, s in zip(recs, mono_ita):
        assert r.tgt == s
        assert r.direction == "lvb-ita"
        assert r.origin == BACK_TRANSLATED and r.generator == "R1"
        assert r.src == be.translate([s], "ita-lvb")[0]


def test_health_probe_fails_fast():
    def broken(s, d):
        raise BackendError("down")

    with pytest.raises(BackendError):
        list(backtranslate(FunctionBackend("x", broken), ["a"], "lvb-ita"))


# -- recipes -------------------------------------------------------------------


@pytest.fixture(scope="module")
def registry(dictionary, rules, authentic, mono_lvb, mono_ita):
    be = RBMTBackend("R1", dictionary, rules)
    backends = {f"{f}{k}": be for f in "NRL" for k in range(1, 5)}
    datasets = {
        "authentic": Dataset.parallel("authentic", authentic),
        "mono_lvb": Dataset.monolingual("mono_lvb", "lvb", mono_lvb),
        "mono_ita": Dataset.monolingual("mono_ita", "ita", mono_ita),
    }
    return Registry(datasets, backends)


def test_standard_recipe_names():
    assert set(STANDARD_RECIPES) == {"N1", "N2", "N3", "N4", "N5", "R2", "R3", "R4", "R5", "L2", "L3", "L4", "L5", "A1", "A2"}
    for bad in ("R1", "L1"):
        with pytest.raises(RecipeError, match="translation system"):
            standard_recipe(bad)
    with pytest.raises(RecipeError):
        standard_recipe("Z9")


@pytest.mark.parametrize("name", ["N1", "N2", "N3", "N4", "N5", "A1", "A2"])
def test_recipe_counts_match_hand_computation(registry, authentic, mono_lvb, mono_ita, name):
    records, manifest = assemble(standard_recipe(name), registry, seed=1)
    expected = oracles.recipe_counts(len(authentic), len(mono_lvb), len(mono_ita), name)
    got = manifest.by_origin()
    assert {k: got.get(k, 0) for k in expected} == expected
    assert manifest.total == len(records) == sum(expected.values())


def test_synthetic_targets_are_verbatim(registry, mono_lvb, mono_ita):
    records, _ = assemble(standard_recipe("A2"), registry, seed=0)
    mono = {"lvb": set(mono_lvb), "ita": set(mono_ita)}
    for r in records:
        if r.origin == BACK_TRANSLATED:
            assert r.tgt in mono[r.direction.split("-")[1]]
        elif r.origin == FORWARD_TRANSLATED:
            assert r.src in mono[r.direction.split("-")[0]]


def test_assembly_is_seeded(registry):
    a, ma = assemble(standard_recipe("N5"), registry, seed=4)
    b, mb = assemble(standard_recipe("N5"), registry, seed=4)
    c, mc = assemble(standard_recipe("N5"), registry, seed=5)
    assert a == b and ma.sha256 == mb.sha256
    assert sorted(map(repr, a)) == sorted(map(repr, c)) and ma.sha256 != mc.sha256


def test_training_file(tmp_path, registry, authentic):
    records, manifest = assemble(standard_recipe("N2"), registry, seed=0)
    counts = emit_training_manifest(records, tmp_path / "train.tsv")
    lines = (tmp_path / "train.tsv").read_text(encoding="utf-8").splitlines()
    assert counts["lines"] == len(lines) == manifest.total + len(authentic)
    assert all(l.startswith((">>ita<< ", ">>lld_Latn<< ")) for l in lines)
    assert sum(l.startswith(">>ita<<") for l in lines) == len(authentic)


def test_recipe_errors(registry):
    with pytest.raises(RecipeError, match="authentic"):
        recipe_from_config("x", {"components": [{"kind": "back-translated", "dataset": "mono_lvb", "direction": "ita-lvb", "backend": "R1"}]})
    bad = recipe_from_config(
        "x",
        {"components": [
            {"kind": "authentic", "dataset": "authentic", "direction": "lvb-ita"},
            {"kind": "back-translated", "dataset": "mono_lvb", "direction": "lvb-ita", "backend": "R1"},
        ]},
    )
    with pytest.raises(RecipeError, match="direction mismatch"):
        assemble(bad, registry)
    missing = recipe_from_config(
        "y",
        {"components": [
            {"kind": "authentic", "dataset": "authentic", "direction": "lvb-ita"},
            {"kind": "back-translated", "dataset": "mono_lvb", "direction": "ita-lvb", "backend": "Q7"},
        ]},
    )
    with pytest.raises(RecipeError, match="missing backend"):
        assemble(missing, registry)


def test_monolingual_reader_skips_blank_lines(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("a\n\n  \nb\n", encoding="utf-8")
    assert read_monolingual(p) == ["a", "b"]
    assert read_monolingual(CORPUS / "mono_lvb.txt")[0].startswith("Sperun")

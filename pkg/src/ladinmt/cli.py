"""``ladinmt`` command-line entry point.

Every subcommand reads UTF-8 text (``-`` is stdin/stdout), prints results as
``key=value`` lines, and exits 0 on success or 2 with
``error[<kind>]: <message>`` on stderr.  Progress goes to stderr through
``logging`` as ``event=... key=value`` lines.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
import time
from functools import partial
from pathlib import Path

from .errors import ConfigError, LadinMTError

log = logging.getLogger("ladinmt")

HELP_WIDTH = 80


class _Formatter(argparse.HelpFormatter):
    """Fixed width so help text does not depend on the terminal; shows real defaults only."""

    def __init__(self, prog):
        super().__init__(prog, width=HELP_WIDTH, max_help_position=28)

    def _get_help_string(self, action):
        text = action.help or ""
        if action.default not in (None, False, argparse.SUPPRESS) and "%(default)" not in text:
            text += " (default: %(default)s)"
        return text


# ---------------------------------------------------------------------------
# small helpers


@contextlib.contextmanager
def _open_in(path):
    if path in (None, "-"):
        yield sys.stdin
    else:
        with open(path, encoding="utf-8") as fh:
            yield fh


@contextlib.contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
        sys.stdout.flush()
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _lines(fh):
    for line in fh:
        yield line.rstrip("\n").rstrip("\r")


def _kv_value(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, (list, tuple)):
        v = ",".join(map(str, v)) or "-"
    s = str(v)
    if not s or any(c.isspace() or c in '="' for c in s):
        return json.dumps(s, ensure_ascii=False)
    return s


def kv(**fields) -> str:
    return " ".join(f"{k}={_kv_value(v)}" for k, v in fields.items())


def _emit(lines, out=None):
    out = out or sys.stdout
    for line in lines:
        out.write(line + "\n")


def _config(args):
    from .config import PipelineConfig, fixture_config

    cfg = PipelineConfig.load(args.config) if args.config else fixture_config()
    cfg.validate()
    return cfg


def _seed(args, cfg=None) -> int:
    if args.seed is not None:
        return args.seed
    return cfg.seed if cfg is not None else 0


def _dictionary(args, cfg=None):
    from .morphodict import default_dictionary_dir, load_dictionary

    path = getattr(args, "dict", None)
    if path is None and cfg is not None:
        path = cfg.path("dict")
    return load_dictionary(path if path is not None else default_dictionary_dir())


def _transfer_rules(args, direction, cfg=None):
    from .rules import default_rules_path, load_rules

    path = getattr(args, "rules", None)
    if path is None and cfg is not None:
        path = cfg.rules_path(direction)
    return load_rules(path if path is not None else default_rules_path(direction))


def _direction(value: str) -> str:
    from .langs import parse_direction

    try:
        return parse_direction(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _retry(args):
    from .btx.pipeline import RetryPolicy

    return RetryPolicy(args.attempts, args.backoff)


# ---------------------------------------------------------------------------
# dict


def cmd_dict_compile(args) -> int:
    from .morphodict import SOURCE_FILES, compile_dictionary, default_dictionary_dir

    src = Path(str(args.dict or default_dictionary_dir()))
    d = compile_dictionary(*(src / name for name in SOURCE_FILES))
    _emit(d.report.lines())
    if args.emit:
        Path(args.emit).write_text(d.dumps(), encoding="utf-8")
        log.info(kv(event="emit", path=args.emit))
    return 0


def cmd_dict_coverage(args) -> int:
    from .morphodict import coverage

    d = _dictionary(args)
    with _open_in(args.input) as fh:
        rep = coverage(d, [s for s in _lines(fh) if s.strip()], args.lang)
    _emit([f"tokens={rep.tokens}", f"known={rep.known}", f"coverage={rep.fraction:.4f}"])
    for word, n in rep.unknown_types[: args.top]:
        print(kv(unknown=word, count=n))
    return 0


# ---------------------------------------------------------------------------
# translate / segment / normalize


def cmd_translate(args) -> int:
    from .parallel import ordered_map
    from .transfer import translate

    d = _dictionary(args)
    rules = _transfer_rules(args, args.direction)

    def one(line):
        if not line.strip():
            return None
        return translate(d, rules, line, args.direction)

    with _open_in(args.input) as fh, _open_out(args.output) as out:
        for n, res in enumerate(ordered_map(one, _lines(fh), args.jobs), 1):
            if res is None:
                out.write("\n")
                continue
            out.write(res.target_text + "\n")
            if args.trace:
                for t in res.trace:
                    sys.stderr.write(kv(line=n, **t) + "\n")
    return 0


def cmd_segment(args) -> int:
    from .normalizer import load_abbreviations, segment

    abbrev = load_abbreviations(args.abbreviations) if args.abbreviations else None
    with _open_in(args.input) as fh:
        text = fh.read()
    with _open_out(args.output) as out:
        for s in segment(text, abbrev):
            out.write(" ".join(s.split()) + "\n")
    return 0


def cmd_normalize(args) -> int:
    from .normalizer import FilterReport, Kept, load_respell_rules, normalize_sentence
    from .parallel import ordered_map

    d = _dictionary(args)
    rules = load_respell_rules(args.rules)
    report = FilterReport()
    with _open_in(args.input) as fh, _open_out(args.output) as out:
        sentences = (s for s in _lines(fh) if s.strip())
        for outcome in ordered_map(partial(normalize_sentence, d, rules, lang=args.lang), sentences, args.jobs):
            report.add(outcome)
            if isinstance(outcome, Kept):
                out.write(outcome.text + "\n")
    lines = report.lines()
    if args.report:
        Path(args.report).write_text("\n".join(lines) + "\n", encoding="utf-8")
    _emit(lines, sys.stderr if args.output in (None, "-") else sys.stdout)
    return 0


# ---------------------------------------------------------------------------
# classify


def _read_labelled(path):
    corpus = []
    with _open_in(path) as fh:
        for lineno, line in enumerate(_lines(fh), 1):
            if not line.strip():
                continue
            text, tab, label = line.rpartition("\t")
            if not tab:
                raise ConfigError(f"{path}:{lineno}: expected '<sentence>\\t<variant>'")
            corpus.append((text, label))
    return corpus


def cmd_classify_train(args) -> int:
    from .classifier import BoostParams, synthetic_corpus, train

    seed = _seed(args)
    if args.synthetic:
        corpus, _ = synthetic_corpus(per_label=args.synthetic, seed=seed)
    elif args.corpus:
        corpus = _read_labelled(args.corpus)
    else:
        raise ConfigError("give --corpus or --synthetic")
    params = BoostParams(args.rounds, args.depth, args.learning_rate, args.min_leaf, args.reg_lambda, args.bins)
    started = time.perf_counter()
    model, acc = train(corpus, args.split, params, seed, args.ngram, args.top_k)
    model.save(args.out)
    log.info(kv(event="trained", sentences=len(corpus), seconds=f"{time.perf_counter() - started:.2f}"))
    _emit([f"sentences={len(corpus)}", f"labels={','.join(model.labels)}", f"heldout_accuracy={acc:.4f}"])
    return 0


def cmd_classify_predict(args) -> int:
    from .classifier import VariantModel, predict

    model = VariantModel.load(args.model)
    with _open_in(args.input) as fh, _open_out(args.output) as out:
        sentences = [s for s in _lines(fh) if s.strip()]
        for s, (label, scores) in zip(sentences, predict(model, sentences)):
            out.write(f"{label}\t{scores[label]:.4f}\t{s}\n")
    return 0


def cmd_classify_partition(args) -> int:
    from .classifier import VariantModel, partition

    model = VariantModel.load(args.model)
    with _open_in(args.input) as fh:
        table = partition(model, (s for s in _lines(fh) if s.strip()), args.outdir)
    for label, (n, chars) in table.items():
        print(kv(variant=label, sentences=n, characters=chars))
    return 0


# ---------------------------------------------------------------------------
# back-translation, prompts, recipes


def _bt_options(args, cfg) -> dict:
    bt = cfg.bt
    opts = {
        "retry": _retry(args),
        "jobs": args.jobs,
    }
    batch = args.batch_size or bt.get("batch_size")
    if batch:
        opts["batch_size"] = int(batch)
    return opts


def cmd_bt_run(args) -> int:
    from .btx.corpus import write_jsonl
    from .btx.pipeline import RunReport, backtranslate

    cfg = _config(args)
    backends = cfg.build_backends()
    if args.backend not in backends:
        raise ConfigError(f"unknown backend {args.backend!r} (have {', '.join(sorted(backends))})")
    report = RunReport()
    with _open_in(args.input) as fh:
        mono = [s for s in _lines(fh) if s.strip()]
    records = backtranslate(
        backends[args.backend],
        mono,
        args.direction,
        quarantine=args.quarantine,
        checkpoint=args.checkpoint,
        report=report,
        **_bt_options(args, cfg),
    )
    if args.output in (None, "-"):
        n = 0
        for r in records:
            print(r.to_json())
            n += 1
    else:
        n = write_jsonl(records, args.output)
    _emit(report.lines() + [f"records={n}"], sys.stderr if args.output in (None, "-") else sys.stdout)
    return 0


def cmd_prompt_build(args) -> int:
    from .btx.corpus import read_tsv
    from .btx.prompt import build_prompt

    pairs = [(r.src, r.tgt) for r in read_tsv(args.authentic)]
    with _open_in(args.input) as fh:
        targets = [s for s in _lines(fh) if s.strip()]
    try:
        text = build_prompt(pairs, targets, _seed(args), args.exemplars, args.max_targets)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    with _open_out(args.output) as out:
        out.write(text)
    return 0


def cmd_prompt_parse(args) -> int:
    from .btx.prompt import parse_response

    with _open_in(args.sources) as fh:
        sources = [s for s in _lines(fh) if s.strip()]
    with _open_in(args.input) as fh:
        text = fh.read()
    pairs = parse_response(text, sources)
    with _open_out(args.output) as out:
        for s, t in pairs:
            out.write(f"{s}\t{t}\n")
    return 0


def _recipe(name, cfg):
    from .btx.recipes import recipe_from_config, standard_recipe

    if name in cfg.recipes:
        return recipe_from_config(name, cfg.recipes[name])
    return standard_recipe(name)


def cmd_recipe_assemble(args) -> int:
    from .btx.corpus import write_jsonl
    from .btx.recipes import Registry, assemble, emit_training_manifest

    cfg = _config(args)
    recipe = _recipe(args.name, cfg)
    opts = _bt_options(args, cfg)
    qdir = args.quarantine_dir or (cfg.resolve(cfg.bt["quarantine_dir"]) if "quarantine_dir" in cfg.bt else None)
    cdir = args.checkpoint_dir or (cfg.resolve(cfg.bt["checkpoint_dir"]) if "checkpoint_dir" in cfg.bt else None)
    if qdir:
        opts["quarantine"] = qdir
    if cdir:
        opts["checkpoint"] = cdir
    registry = Registry(cfg.build_datasets(), cfg.build_backends(), opts)
    started = time.perf_counter()
    records, manifest = assemble(recipe, registry, _seed(args, cfg))
    log.info(kv(event="assembled", recipe=recipe.name, records=len(records), seconds=f"{time.perf_counter() - started:.2f}"))
    if args.out:
        write_jsonl(records, args.out)
    if args.manifest:
        Path(args.manifest).write_text(manifest.to_json(), encoding="utf-8")
    lines = [f"recipe={manifest.recipe}", f"total={manifest.total}"]
    lines += [f"origin[{k}]={v}" for k, v in sorted(manifest.by_origin().items())]
    lines += [f"generator[{k}]={v}" for k, v in sorted(manifest.by_generator().items())]
    if args.training:
        counts = emit_training_manifest(records, args.training)
        lines += [f"training_{k}={v}" for k, v in counts.items()]
    lines.append(f"sha256={manifest.sha256}")
    _emit(lines)
    return 0


def cmd_recipe_manifest(args) -> int:
    from .btx.corpus import read_jsonl
    from .btx.recipes import corpus_digest

    if args.records:
        records = read_jsonl(args.records)
        counts: dict = {}
        for r in records:
            key = (r.origin, r.direction, r.generator)
            counts[key] = counts.get(key, 0) + 1
        for (origin, direction, generator), n in sorted(counts.items()):
            print(kv(origin=origin, direction=direction, generator=generator, count=n))
        _emit([f"total={len(records)}", f"sha256={corpus_digest(records)}"])
        return 0
    if not args.name:
        raise ConfigError("give --name or --records")
    cfg = _config(args)
    recipe = _recipe(args.name, cfg)
    plan = {
        "recipe": recipe.name,
        "description": recipe.description,
        "components": [c.describe() for c in recipe.components],
        "backends": recipe.backends(),
        "metadata": recipe.metadata,
    }
    print(json.dumps(plan, ensure_ascii=False, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# eval


def _read_pair(hyp, ref):
    with _open_in(hyp) as fh:
        hyps = list(_lines(fh))
    with _open_in(ref) as fh:
        refs = list(_lines(fh))
    return hyps, refs


def _json_report(path, report, details=None):
    if not path:
        return
    from dataclasses import asdict

    obj = asdict(report)
    if details is not None:
        obj["per_sentence"] = details
    Path(path).write_text(json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _per_sentence(hyps, refs, pretokenized):
    from . import metrics

    out = []
    for i, (h, r) in enumerate(zip(hyps, refs)):
        b = metrics.bleu([h], [r], pretokenized, smooth_k=1.0)
        out.append(
            {"index": i, "hyp": h, "ref": r, "bleu_add1": b.bleu, "chrfpp": metrics.sentence_chrfpp(h, r, pretokenized)}
        )
    return out


def cmd_eval_bleu(args) -> int:
    from . import metrics

    hyps, refs = _read_pair(args.hyp, args.ref)
    report = metrics.bleu(hyps, refs, args.pretokenized, args.smooth_k)
    _emit(report.lines())
    _json_report(args.json_report, report, _per_sentence(hyps, refs, args.pretokenized))
    return 0


def cmd_eval_chrf(args) -> int:
    from . import metrics

    hyps, refs = _read_pair(args.hyp, args.ref)
    report = metrics.chrfpp(hyps, refs, args.pretokenized)
    _emit(report.lines())
    _json_report(args.json_report, report, _per_sentence(hyps, refs, args.pretokenized))
    return 0


def cmd_eval_rtt(args) -> int:
    from . import metrics

    cfg = _config(args)
    backends = cfg.build_backends()
    options = {"jobs": args.jobs, "retry": _retry(args)}
    if args.pairs:
        pairs = [tuple(p.split("/")) for p in args.pairs.split(",")]
        for a, b in pairs:
            for id_ in (a, b):
                if id_ not in backends:
                    raise ConfigError(f"unknown backend {id_!r}")
        with _open_in(args.lvb) as fh:
            lvb = [s for s in _lines(fh) if s.strip()]
        with _open_in(args.ita) as fh:
            ita = [s for s in _lines(fh) if s.strip()]
        rows = metrics.rtt_table(backends, pairs, lvb[: args.sample_size], ita[: args.sample_size], **options)
        sys.stdout.write(metrics.format_rtt_table(rows))
        if args.json_report:
            from dataclasses import asdict

            obj = [asdict(r) for r in rows]
            Path(args.json_report).write_text(json.dumps(obj, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
        return 0
    for id_ in (args.a, args.b):
        if id_ not in backends:
            raise ConfigError(f"unknown backend {id_!r} (have {', '.join(sorted(backends))})")
    with _open_in(args.input) as fh:
        sentences = [s for s in _lines(fh) if s.strip()]
    config = metrics.RTTConfig(backends[args.a], backends[args.b], args.direction, args.sample_size, args.worst, options)
    report = metrics.round_trip(config, sentences)
    _emit(report.lines())
    for w in report.worst:
        print(kv(worst=w["index"], chrfpp=f"{w['chrfpp']:.2f}", source=w["source"], back=w["back"]))
    _json_report(args.json_report, report)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=None, help="random seed (default: config seed, else 0)")
    g.add_argument("--jobs", type=int, default=1, help="worker threads for per-sentence stages")
    g.add_argument("--config", help="JSON run configuration (default: bundled fixtures)")
    g.add_argument(
        "--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="stderr log level"
    )

    def io(p, output=True):
        p.add_argument("--in", dest="input", default="-", help="input file, one item per line")
        if output:
            p.add_argument("--out", dest="output", default="-", help="output file")

    def sub(parent, name, help_, fn=None):
        p = parent.add_parser(name, help=help_, description=help_, parents=[common], formatter_class=_Formatter)
        if fn is not None:
            p.set_defaults(func=fn)
        return p

    def retry_flags(p):
        p.add_argument("--batch-size", type=int, default=None, help="sentences per backend call")
        p.add_argument("--attempts", type=int, default=3, help="tries per batch before quarantine")
        p.add_argument("--backoff", type=float, default=1.0, help="seconds before the first retry; doubles after")

    parser = argparse.ArgumentParser(
        prog="ladinmt",
        description="Ladin (Val Badia) - Italian translation toolkit.",
        formatter_class=_Formatter,
    )
    cmds = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    # dict
    p = cmds.add_parser("dict", help="compile and inspect the dictionary", formatter_class=_Formatter)
    dsub = p.add_subparsers(dest="action", metavar="ACTION", required=True)
    q = sub(dsub, "compile", "compile dictionary sources and print counts", cmd_dict_compile)
    q.add_argument("--dict", help="directory with paradigms.txt, lemmas.txt, bilingual.txt")
    q.add_argument("--emit", help="write the canonical text dump here")
    q = sub(dsub, "coverage", "share of tokens the dictionary can analyze", cmd_dict_coverage)
    q.add_argument("--dict", help="dictionary directory or dump file")
    q.add_argument("--lang", default="lvb", choices=["lvb", "ita"], help="corpus language")
    q.add_argument("--top", type=int, default=20, help="unknown word types to list")
    io(q, output=False)

    # translate
    p = sub(cmds, "translate", "rule-based translation, one sentence per line", cmd_translate)
    p.add_argument("--direction", type=_direction, default="lvb-ita", help="lvb-ita or ita-lvb")
    p.add_argument("--dict", help="dictionary directory or dump file")
    p.add_argument("--rules", help="transfer rule file for the direction")
    p.add_argument("--trace", action="store_true", help="per-token key=value trace on stderr")
    io(p)

    # segment
    p = sub(cmds, "segment", "split running text into one sentence per line", cmd_segment)
    p.add_argument("--abbreviations", help="abbreviation list, one per line")
    io(p)

    # normalize
    p = sub(cmds, "normalize", "respell to current orthography; drop sentences with unknown words", cmd_normalize)
    p.add_argument("--dict", help="dictionary directory or dump file")
    p.add_argument("--rules", help="respelling rule file")
    p.add_argument("--lang", default="lvb", choices=["lvb", "ita"], help="corpus language")
    p.add_argument("--report", help="write the key=value filter report here")
    io(p)

    # classify
    p = cmds.add_parser("classify", help="Ladin variant classifier", formatter_class=_Formatter)
    csub = p.add_subparsers(dest="action", metavar="ACTION", required=True)
    q = sub(csub, "train", "train on labelled sentences and report held-out accuracy", cmd_classify_train)
    q.add_argument("--corpus", help="TSV of '<sentence>\\t<variant>'")
    q.add_argument("--synthetic", type=int, metavar="N", help="train on a synthetic corpus, N sentences per variant")
    q.add_argument("--split", type=float, default=0.75, help="training share")
    q.add_argument("--out", required=True, help="model file")
    q.add_argument("--ngram", type=int, default=3, help="character n-gram size")
    q.add_argument("--top-k", type=int, default=2500, help="most frequent n-grams kept as features")
    q.add_argument("--rounds", type=int, default=200, help="boosting rounds")
    q.add_argument("--depth", type=int, default=4, help="tree depth")
    q.add_argument("--learning-rate", type=float, default=0.1, help="shrinkage")
    q.add_argument("--min-leaf", type=int, default=5, help="minimum rows per leaf")
    q.add_argument("--reg-lambda", type=float, default=1.0, help="L2 penalty on leaf values")
    q.add_argument("--bins", type=int, default=16, help="count histogram bins")
    q = sub(csub, "predict", "label each sentence: '<variant>\\t<score>\\t<sentence>'", cmd_classify_predict)
    q.add_argument("--model", required=True, help="model file")
    io(q)
    q = sub(csub, "partition", "split a corpus into one file per variant", cmd_classify_partition)
    q.add_argument("--model", required=True, help="model file")
    q.add_argument("--outdir", required=True, help="output directory")
    io(q, output=False)

    # bt
    p = cmds.add_parser("bt", help="back-translation", formatter_class=_Formatter)
    bsub = p.add_subparsers(dest="action", metavar="ACTION", required=True)
    q = sub(bsub, "run", "back-translate monolingual text into JSONL records", cmd_bt_run)
    q.add_argument("--backend", default="R1", help="backend id from the config")
    q.add_argument("--direction", type=_direction, default="lvb-ita", help="direction of the produced records")
    q.add_argument("--quarantine", help="append failed batches to this JSONL file")
    q.add_argument("--checkpoint", help="resume file; finished batches are skipped")
    retry_flags(q)
    io(q)

    # prompt
    p = cmds.add_parser("prompt", help="LLM few-shot prompts", formatter_class=_Formatter)
    psub = p.add_subparsers(dest="action", metavar="ACTION", required=True)
    q = sub(psub, "build", "build a few-shot JSON prompt for the input sentences", cmd_prompt_build)
    q.add_argument("--authentic", required=True, help="TSV of Ladin/Italian exemplar pairs")
    q.add_argument("--exemplars", type=int, default=8, help="exemplar pairs per prompt")
    q.add_argument("--max-targets", type=int, default=16, help="sentences per prompt")
    io(q)
    q = sub(psub, "parse", "validate a filled response; print '<source>\\t<translation>'", cmd_prompt_parse)
    q.add_argument("--sources", required=True, help="the sentences the prompt asked for")
    io(q)

    # recipe
    p = cmds.add_parser("recipe", help="training-set recipes", formatter_class=_Formatter)
    rsub = p.add_subparsers(dest="action", metavar="ACTION", required=True)
    q = sub(rsub, "assemble", "build a recipe's training corpus and provenance manifest", cmd_recipe_assemble)
    q.add_argument("--name", required=True, help="recipe name (N1..N5, R2..R5, L2..L5, A1, A2 or from config)")
    q.add_argument("--out", help="write records as JSONL")
    q.add_argument("--manifest", help="write the JSON manifest")
    q.add_argument("--training", help="write the tagged source<TAB>target training file")
    q.add_argument("--quarantine-dir", help="per-component quarantine files")
    q.add_argument("--checkpoint-dir", help="per-component checkpoint files")
    retry_flags(q)
    q = sub(rsub, "manifest", "show a recipe plan, or recount an assembled JSONL corpus", cmd_recipe_manifest)
    q.add_argument("--name", help="recipe name")
    q.add_argument("--records", help="assembled JSONL corpus to recount")

    # eval
    p = cmds.add_parser("eval", help="BLEU, chrF++ and round-trip scoring", formatter_class=_Formatter)
    esub = p.add_subparsers(dest="action", metavar="ACTION", required=True)
    for name, fn, help_ in (
        ("bleu", cmd_eval_bleu, "corpus BLEU"),
        ("chrf", cmd_eval_chrf, "corpus chrF++"),
    ):
        q = sub(esub, name, help_, fn)
        q.add_argument("--hyp", required=True, help="hypotheses, one per line")
        q.add_argument("--ref", required=True, help="references, one per line")
        q.add_argument("--pretokenized", action="store_true", help="split on whitespace only")
        if name == "bleu":
            q.add_argument("--smooth-k", type=float, default=0.0, help="add-k smoothing for orders 2-4")
        q.add_argument("--json-report", help="write the report with per-sentence scores here")
    q = sub(esub, "rtt", "round-trip translation: B(A(x)) scored against x", cmd_eval_rtt)
    q.add_argument("--a", default="R1", help="forward backend id")
    q.add_argument("--b", default="R1", help="backward backend id")
    q.add_argument("--direction", type=_direction, default="lvb-ita", help="direction of backend A")
    q.add_argument("--pairs", help="comma-separated A/B list for a full table, e.g. R4/R4,N4/R4")
    q.add_argument("--lvb", help="Ladin sentences for --pairs")
    q.add_argument("--ita", help="Italian sentences for --pairs")
    q.add_argument("--sample-size", type=int, default=None, help="score only the first N sentences")
    q.add_argument("--worst", type=int, default=10, help="lowest-scoring sentences to list")
    q.add_argument("--json-report", help="write the full report here")
    retry_flags(q)
    q.add_argument("--in", dest="input", default="-", help="source sentences, one per line")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="level=%(levelname)s logger=%(name)s %(message)s",
        stream=sys.stderr,
    )
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    started = time.perf_counter()
    name = " ".join(x for x in (args.command, getattr(args, "action", None)) if x)
    try:
        code = args.func(args)
    except LadinMTError as exc:
        print(f"error[{exc.kind}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error[value]: {exc}", file=sys.stderr)
        return 2
    log.info(kv(event="done", command=name, seconds=f"{time.perf_counter() - started:.2f}"))
    return code


if __name__ == "__main__":
    sys.exit(main())

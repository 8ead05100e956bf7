"""Back-translation orchestration: backends, prompts, provenance, recipes."""

from .backends import (
    Backend,
    ExternalCommandBackend,
    FunctionBackend,
    HttpBackend,
    IdentityBackend,
    LLMJsonBackend,
    RBMTBackend,
    backend_from_config,
)
from .corpus import (
    AUTHENTIC,
    BACK_TRANSLATED,
    FORWARD_TRANSLATED,
    ORIGINS,
    CorpusRecord,
    read_jsonl,
    read_monolingual,
    read_records,
    read_tsv,
    write_jsonl,
    write_tsv,
)
from .pipeline import RetryPolicy, RunReport, backtranslate, probe, translate_stream
from .prompt import PromptBatch, build_prompt, fill_response, make_batch, parse_response
from .recipes import (
    STANDARD_RECIPES,
    TRAINER_SETTINGS,
    Component,
    Dataset,
    Manifest,
    Recipe,
    Registry,
    assemble,
    emit_training_manifest,
    recipe_from_config,
    standard_recipe,
)

__all__ = [name for name in dir() if not name.startswith("_")]

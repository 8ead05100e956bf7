"""Exception hierarchy shared by every module of the toolkit."""


class LadinMTError(Exception):
    """Base class; the CLI prints ``error[<kind>]: <message>`` for these."""

    kind = "error"


class CompileError(LadinMTError):
    kind = "compile"

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


class RuleSyntaxError(CompileError):
    kind = "rule-syntax"


class EmptyCorpusError(LadinMTError):
    kind = "empty-corpus"


class TrainingError(LadinMTError):
    kind = "training"


class BackendError(LadinMTError):
    """A backend call failed (transport, process, or timeout)."""

    kind = "backend"


class BatchSizeError(BackendError):
    """Backend returned a different number of outputs than inputs; never retried."""

    kind = "batch-size"


class ValidationError(LadinMTError):
    """An LLM response did not satisfy the prompt contract.

    ``reason`` is one of ``malformed``, ``count-mismatch``, ``source-mutated``,
    ``empty-translation``.
    """

    kind = "validation"
    REASONS = ("malformed", "count-mismatch", "source-mutated", "empty-translation")

    def __init__(self, reason, message):
        if reason not in self.REASONS:
            raise ValueError(f"unknown validation reason {reason!r}")
        super().__init__(f"{reason}: {message}")
        self.reason = reason


class RecipeError(LadinMTError):
    kind = "recipe"


class ConfigError(LadinMTError):
    kind = "config"


class MetricError(LadinMTError):
    kind = "metric"

"""Exception types shared across the toolkit.

Every error carries a short machine-parseable ``code``; the CLI renders
failures as one ``error[<code>]: <message>`` line on stderr.
"""

from __future__ import annotations


class ChairkitError(Exception):
    """Base class for all toolkit errors (CLI exit code 1)."""

    code = "error"


class ParseError(ChairkitError):
    """Malformed input text, e.g. a lexicon line with an empty category."""

    code = "parse"


class ConflictError(ChairkitError):
    """The same fine-grained surface form claims two coarse categories."""

    code = "conflict"


class StructureError(ChairkitError):
    """Structurally invalid hierarchy input (e.g. a cycle)."""

    code = "structure"


class MappingError(ChairkitError):
    """A hierarchy node cannot be mapped to any retained category."""

    code = "mapping"


class IntegrityError(ChairkitError):
    """Cross-file referential integrity violation in dataset inputs."""

    code = "integrity"


class FormatError(ChairkitError):
    """A well-formed file whose payload violates the expected schema."""

    code = "format"


class ConfigError(ChairkitError):
    """Invalid or inconsistent configuration for the requested operation."""

    code = "config"


class ValidationError(ChairkitError):
    """Inputs that are readable but unusable (e.g. an empty corpus)."""

    code = "validation"


class MissingPredictionsError(ValidationError):
    """Records in scope lack predictions and --allow-missing is off."""

    code = "missing-predictions"

    def __init__(self, image_ids):
        self.image_ids = list(image_ids)
        shown = ", ".join(str(i) for i in self.image_ids[:10])
        more = "" if len(self.image_ids) <= 10 else f" (+{len(self.image_ids) - 10} more)"
        super().__init__(
            f"{len(self.image_ids)} record(s) have no prediction: {shown}{more}"
        )

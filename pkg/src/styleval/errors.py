"""Exception types shared across the package.

Each error corresponds to a documented failure mode of one operation;
callers catch the narrow class, the CLI maps groups of them to exit codes.
"""


class StylevalError(Exception):
    """Base class for all errors raised by this package."""


# --- text processing ---------------------------------------------------------

class InvalidN(StylevalError):
    """n-gram order must be >= 1."""


class EmptyDocument(StylevalError):
    """Operation requires a document with at least one word."""


# --- register-analysis model -------------------------------------------------

class InsufficientCorpus(StylevalError):
    """Model fitting needs at least two feature vectors."""


class DegenerateCorpus(StylevalError):
    """Every feature has zero variance; nothing to factor."""


class CatalogMismatch(StylevalError):
    """Feature vector comes from a different catalog version than the model."""


class ZeroVector(StylevalError):
    """Cosine distance is undefined for a zero vector."""


# --- metrics -----------------------------------------------------------------

class NoReferences(StylevalError):
    """Reference-based metric called with an empty reference list."""


class InvalidProbability(StylevalError):
    """Probability argument outside [0, 1]."""


# --- providers ---------------------------------------------------------------

class ProviderError(StylevalError):
    """Base class for chat-endpoint and scorer-sidecar failures."""


class EndpointUnavailable(ProviderError):
    """Chat endpoint unreachable after all retries."""


class BadRequest(ProviderError):
    """Server rejected the request (HTTP 4xx); message carries the server text."""


class EmptyCompletion(ProviderError):
    """Chat endpoint returned an empty assistant message."""


class ScorerUnavailable(ProviderError):
    """Scoring sidecar unreachable; callers degrade to native metrics."""


# --- pipelines ---------------------------------------------------------------

class MissingBinding(StylevalError):
    """Prompt template rendered with an unbound placeholder."""


class NoGoldReference(StylevalError):
    """Gold baseline requires the case to carry reference texts."""


# --- datasets ----------------------------------------------------------------

class IoFailure(StylevalError):
    """File could not be read or written."""


class SchemaViolation(StylevalError):
    """Corpus record malformed; carries the 1-based line number."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class InsufficientAuthors(StylevalError):
    """Not enough eligible authors for the requested pairing variant."""

    def __init__(self, variant: str, found: int, needed: int):
        super().__init__(
            f"variant {variant!r}: found {found} eligible authors, need {needed}"
        )
        self.variant = variant
        self.found = found
        self.needed = needed


class InsufficientPool(StylevalError):
    """Target selection pool smaller than the requested sample size."""


class ConfigError(StylevalError):
    """Run configuration invalid or incomplete."""

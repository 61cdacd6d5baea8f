"""Shared exception hierarchy.

Every error raised by the engine derives from RestakelabError so the CLI
and the HTTP service can map engine failures to exit code 1 / HTTP 4xx-5xx
without leaking tracebacks.
"""


class RestakelabError(Exception):
    """Base class for all engine errors."""


class GraphError(RestakelabError):
    """Malformed or inconsistent value-flow graph document."""


class UndefinedRatioError(RestakelabError):
    """A ratio was requested with a zero denominator."""


class ScenarioError(RestakelabError):
    """Invalid stress-scenario configuration."""


class DesignError(RestakelabError):
    """Invalid design matrix (shape, rank, or degenerate columns)."""


class SingularDesignError(DesignError):
    """Perfectly collinear design; carries the offending column names."""

    def __init__(self, columns, message=None):
        self.columns = list(columns)
        super().__init__(message or f"singular design, offending columns: {self.columns}")


class InsufficientDataError(RestakelabError):
    """Too few observations for the requested operation."""


class IngestError(RestakelabError):
    """Data-source fetch, cache or parse failure."""


class CacheMissError(IngestError):
    """Offline mode requested but no cached or fixture copy exists."""


class AlignmentError(RestakelabError):
    """Daily-panel alignment failure (gaps, duplicates, coverage)."""


class TransformError(RestakelabError):
    """Feature-engineering transform applied outside its domain."""


class RenderError(RestakelabError):
    """Report rendering failed; no partial artifacts are written."""

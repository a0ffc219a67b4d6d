"""Exception hierarchy shared across the pipeline."""


class ModalLensError(Exception):
    """Base class for all package errors."""


class ParseError(ModalLensError):
    """Input file could not be parsed."""


class SchemaError(ModalLensError):
    """Feature schema violates a structural invariant."""


class ShapeError(ModalLensError):
    """Array shape disagrees with the schema or token count."""


class RangeError(ModalLensError):
    """A value falls outside its allowed range."""


class ArgumentError(ModalLensError):
    """Invalid argument to an operation."""


class DegenerateError(ModalLensError):
    """The statistic is undefined for this input (e.g. constant vectors)."""


class TooManyUnits(ModalLensError):
    """Exact enumeration requested above the tractable unit bound."""


class ProviderError(ModalLensError):
    """The prediction provider failed; carries instance/coalition context."""


class SingularSystem(ModalLensError):
    """Weighted least-squares system stayed singular after retries."""


class MissingAttribution(ModalLensError):
    """No attribution record exists for the requested instance."""


class MissingFeature(ModalLensError):
    """Schema lacks a feature set required by a glyph component."""


class NotReady(ModalLensError):
    """A served artifact's upstream analysis stage has not completed."""


class NotFound(ModalLensError):
    """Requested entity does not exist."""


class IncompleteUpstream(ModalLensError):
    """A pipeline stage ran before its upstream stage; names the missing stage."""

    def __init__(self, missing_stage: str):
        super().__init__(f"missing upstream stage: run `{missing_stage}` first")
        self.missing_stage = missing_stage

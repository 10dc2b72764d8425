"""Exception types shared across the package."""


class FieldnetError(Exception):
    """Base class for all package-specific errors."""


class DegenerateInputError(FieldnetError, ValueError):
    """Input too short or otherwise degenerate for the requested operation."""


class DomainError(FieldnetError, ValueError):
    """Value outside the mathematical domain of an encoder."""


class BinningError(FieldnetError, ValueError):
    """Invalid quantile-bin request, e.g. more bins than samples."""


class ShapeError(FieldnetError, ValueError):
    """Array shapes incompatible with the requested operation."""


class ConfigurationError(FieldnetError, ValueError):
    """Invalid model/feature/task combination or training configuration."""


class StratificationError(FieldnetError, ValueError):
    """A class has too few samples for the requested fold count."""


class FormatError(FieldnetError, ValueError):
    """Malformed dataset, field, checkpoint, or report file."""

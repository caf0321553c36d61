class ConfigurationError(Exception):
    """Errors in what the user asked for. The CLI exits with code 2."""
    exit_code = 2


class NumericAbort(Exception):
    """Errors raised by the numeric machinery. The CLI exits with code 3."""
    exit_code = 3


class ShapeMismatchError(NumericAbort):
    def __init__(self, primitive: str, shape_a, shape_b):
        self.primitive = primitive
        self.shape_a = tuple(shape_a)
        self.shape_b = tuple(shape_b)
        msg = f"Primitive '{primitive}' cannot combine shapes {self.shape_a} and {self.shape_b}"
        super().__init__(msg)


class NonFiniteError(NumericAbort):
    def __init__(self, operation: str, detail: str = ''):
        self.operation = operation
        msg = f"Non finite value produced by '{operation}'"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NonScalarOutputError(NumericAbort):
    def __init__(self, shape):
        msg = f"Gradient requires a scalar output, got shape {tuple(shape)}"
        super().__init__(msg)


class DimensionMismatchError(NumericAbort):
    def __init__(self, what: str, expected, got):
        msg = f"{what}: expected {expected}, got {got}"
        super().__init__(msg)


class EmptyBufferError(NumericAbort):
    def __init__(self):
        super().__init__("Cannot sample from an empty buffer")


class MissingRetainedPathError(NumericAbort):
    def __init__(self):
        msg = "Meta update requires the retained path of the actor step performed just before it"
        super().__init__(msg)


class NetworkSpecError(ConfigurationError):
    def __init__(self, reason: str):
        super().__init__(f"Invalid network specification: {reason}")


class UnknownEnvironmentError(ConfigurationError):
    def __init__(self, env_id: str, known):
        msg = f"Unknown environment '{env_id}', available: {', '.join(sorted(known))}"
        super().__init__(msg)


class MissingProgressCoordinateError(ConfigurationError):
    def __init__(self, env_name: str):
        msg = f"{env_name} exposes no progress coordinate and cannot be sparsified"
        super().__init__(msg)


class RunConfigError(ConfigurationError):
    def __init__(self, reason: str, line: int = None):
        msg = reason if line is None else f"line {line}: {reason}"
        super().__init__(msg)


class DemoParseError(ConfigurationError):
    def __init__(self, file, line: int, reason: str):
        self.line = line
        msg = f"Cannot parse demonstrations {file} at line {line}: {reason}"
        super().__init__(msg)


class CheckpointFormatError(ConfigurationError):
    def __init__(self, file, reason: str):
        super().__init__(f"Invalid checkpoint {file}: {reason}")


class NoQualifyingCheckpointError(ConfigurationError):
    def __init__(self, rho: float, threshold: float, best: float):
        msg = (f"No checkpoint reaches the selection threshold {threshold:.4f} (rho {rho}), "
               f"best checkpoint return is {best:.4f}; use a lower rho")
        super().__init__(msg)


class UnsupportedActorError(ConfigurationError):
    def __init__(self, operation: str, actor):
        msg = f"{operation} is not supported for {actor.__class__.__name__}"
        super().__init__(msg)


class EmptyLogError(ConfigurationError):
    def __init__(self, file):
        super().__init__(f"{file} contains no records")


class NonPositiveExpertReturnError(ConfigurationError):
    def __init__(self, expert: float):
        super().__init__(f"Normalized scores need a positive expert return, got {expert}")

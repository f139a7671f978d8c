"""Exception types shared across the package."""


class CycleresError(Exception):
    """Base class for all cycleres errors."""


class NonFiniteState(CycleresError):
    """A reservoir state turned NaN/Inf (divergent configuration)."""

    def __init__(self, step: int):
        super().__init__(f"non-finite reservoir state at step {step}")
        self.step = step


class CyclicGraph(CycleresError):
    """A cycle survived where an acyclic graph was required."""


class NonFiniteInput(CycleresError):
    """Input array contains NaN/Inf."""


class SingularSystem(CycleresError):
    """Unregularized normal equations are rank-deficient."""


class DimensionMismatch(CycleresError):
    """Array shapes are inconsistent."""


class EmptyInput(CycleresError):
    """Operation requires at least one element."""


class ParseError(CycleresError):
    """Malformed data file."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class TooShort(CycleresError):
    """Series too short for the requested task."""


class ConstantSeries(CycleresError):
    """Min-max normalization needs max > min."""


class PersistentDivergence(CycleresError):
    """NARMA generation diverged for every attempted seed."""


class ConfigError(CycleresError):
    """Invalid experiment configuration."""

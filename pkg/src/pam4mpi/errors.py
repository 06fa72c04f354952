"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """A parameter is outside its physical or structural domain."""


class SizeError(ValueError):
    """Sequence lengths or window bounds do not line up."""


class DecisionError(ValueError):
    """A slicer input was not a finite number."""


class DivergenceError(RuntimeError):
    """Equalizer adaptation left the numeric guard rails.

    ``symbol_index`` is the symbol at which the guard tripped.  When the
    failure happened inside a single-point run, ``link_config`` carries the
    offending configuration.
    """

    def __init__(self, message: str, symbol_index: int):
        super().__init__(message)
        self.symbol_index = symbol_index
        self.link_config = None


class SweepError(RuntimeError):
    """A sweep cell failed.

    Carries the coordinates of the failing cell, the underlying exception,
    and every record completed before the abort so a partial-results
    manifest can be written.
    """

    def __init__(self, message: str, point_key, cause: BaseException, completed):
        super().__init__(message)
        self.point_key = point_key
        self.cause = cause
        self.completed = completed

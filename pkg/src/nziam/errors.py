"""Exception types shared across the model."""


class NziamError(Exception):
    """Base class for all model errors."""


class ConfigError(NziamError):
    """Scenario file is missing, malformed, or violates an invariant.

    `path` is the dotted key path of the offending entry; `line` is the
    line number in the source file when known.
    """

    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.path = path
        self.line = line
        loc = path or "<config>"
        if line is not None:
            loc += f" (line {line})"
        super().__init__(f"{loc}: {message}")


class InfeasibleError(NziamError):
    """The emissions cap cannot be met in some period."""

    def __init__(self, message: str, year: int | None = None, region: str | None = None):
        self.year = year
        self.region = region
        prefix = ""
        if region is not None:
            prefix += f"[{region}] "
        if year is not None:
            prefix += f"year {year}: "
        super().__init__(prefix + message)


class StorageExhaustedError(InfeasibleError):
    """Cumulative CO2 injection demand exceeds total geologic storage capacity."""

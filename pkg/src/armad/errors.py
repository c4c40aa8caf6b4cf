"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: validation-type failures
(bad input, bad configuration, contract misuse) exit 2, I/O failures
exit 3, and mathematically undefined results exit 4.
"""


class ArmadError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ArmadError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyContextError(ArmadError):
    """Input produced a transaction database with no objects."""


class ConfigError(ArmadError):
    """Invalid run configuration (flags, thresholds, tags)."""


class DomainError(ArmadError):
    """Item/tid id out of range, or an out-of-domain threshold."""


class ContractError(ArmadError):
    """API used against its stated contract (e.g. rule-kind mismatch)."""


class UndefinedConfidenceError(ArmadError):
    """Rule confidence requested for an antecedent with zero support."""


class UndefinedWeightError(ArmadError):
    """Rule weight undefined under the selected interest mode."""


class UndefinedMetricError(ArmadError):
    """Evaluation metric undefined (empty labels, degenerate dataset)."""

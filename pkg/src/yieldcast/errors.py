"""Exception hierarchy shared by all yieldcast modules.

Every error carries a stable ``code`` string that the CLI emits in its
machine-readable error JSON, and maps to one of the exit-code classes
(2 = input error, 3 = computation error, 4 = configuration error).
"""


class YieldcastError(Exception):
    """Base class; ``code`` is the stable machine-readable identifier."""

    code = "Error"
    exit_code = 3

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context


class InputError(YieldcastError):
    exit_code = 2


class ComputationError(YieldcastError):
    exit_code = 3


class ConfigError(YieldcastError):
    code = "ConfigError"
    exit_code = 4


# --- input / parsing ---------------------------------------------------

class InputMissing(InputError):
    code = "InputMissing"


class MalformedRow(InputError):
    code = "MalformedRow"

    def __init__(self, message, line=None, **context):
        super().__init__(message, line=line, **context)
        self.line = line

    def __str__(self):
        base = super().__str__()
        return f"line {self.line}: {base}" if self.line is not None else base


class DuplicateSample(InputError):
    code = "DuplicateSample"


class UnknownUnit(InputError):
    code = "UnknownUnit"


class CoverageGap(InputError):
    code = "CoverageGap"


class TooFewYears(InputError):
    code = "TooFewYears"


class MissingWeight(InputError):
    code = "MissingWeight"


# --- phenology ---------------------------------------------------------

class NoSeasonality(ComputationError):
    code = "NoSeasonality"


class NonConvergence(ComputationError):
    code = "NonConvergence"


class DegenerateSeason(ComputationError):
    code = "DegenerateSeason"


# --- features / models -------------------------------------------------

class DegenerateColumn(ComputationError):
    code = "DegenerateColumn"


class SchemaMismatch(ComputationError):
    code = "SchemaMismatch"


class SingularFit(ComputationError):
    code = "SingularFit"


class DegeneratePredictor(ComputationError):
    code = "DegeneratePredictor"


# --- cv / metrics / comparison ----------------------------------------

class AllGridPointsFailed(ComputationError):
    code = "AllGridPointsFailed"


class DegenerateFold(ComputationError):
    code = "DegenerateFold"


class MisalignedFolds(ComputationError):
    code = "MisalignedFolds"


class UnpairedConfigs(ComputationError):
    code = "UnpairedConfigs"


class InfeasibleSpec(ConfigError):
    code = "InfeasibleSpec"

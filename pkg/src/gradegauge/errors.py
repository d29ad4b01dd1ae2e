"""Error taxonomy shared by all gradegauge modules.

Every failure surfaced to callers is a subclass of :class:`GradeGaugeError`,
so the CLI and HTTP layers can map "domain error" to exit code 1 / HTTP 4xx
uniformly while keeping the specific condition in the class name.
"""


class GradeGaugeError(Exception):
    """Base class for all domain errors raised by this package."""


# dataset ingestion
class MalformedCsv(GradeGaugeError):
    pass


class UnknownColumn(GradeGaugeError):
    pass


class DomainViolation(GradeGaugeError):
    pass


class NumericParse(GradeGaugeError):
    pass


class NoSuchAttribute(GradeGaugeError):
    pass


class NotCategorical(GradeGaugeError):
    pass


# preprocessing
class OutOfRange(GradeGaugeError):
    pass


class EmptyCode(GradeGaugeError):
    pass


# induction
class EmptyDistribution(GradeGaugeError):
    pass


class TooFewDistinctValues(GradeGaugeError):
    pass


class EmptyDataset(GradeGaugeError):
    pass


class MissingValuesPresent(GradeGaugeError):
    pass


class MissingFeature(GradeGaugeError):
    pass


# evaluation
class SchemaMismatch(GradeGaugeError):
    pass


class LengthMismatch(GradeGaugeError):
    pass


class UnlabeledRows(GradeGaugeError):
    def __init__(self, indices):
        super().__init__(f"rows without a class label: {sorted(indices)}")
        self.indices = sorted(indices)


class EmptyInput(GradeGaugeError):
    pass


# codegen
class InvalidIdentifier(GradeGaugeError):
    pass


# persistence / accounts
class NotFound(GradeGaugeError):
    pass


class CorruptDocument(GradeGaugeError):
    pass


class DuplicateEmail(GradeGaugeError):
    pass


class WeakPassword(GradeGaugeError):
    pass


class InvalidEmail(GradeGaugeError):
    pass


class BadCredentials(GradeGaugeError):
    pass


class AuthRequired(GradeGaugeError):
    pass


class Forbidden(GradeGaugeError):
    pass


class UploadTooLarge(GradeGaugeError):
    pass


# configuration
class ConfigError(GradeGaugeError):
    pass

"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the CLI prints on
stderr, and an ``exit_status`` used as the process exit code.
"""


class CurateError(Exception):
    code = "error"
    exit_status = 3


class ParseError(CurateError):
    code = "parse_error"


class SchemaError(CurateError):
    code = "schema_error"


class DuplicateIdError(CurateError):
    code = "duplicate_id"


class EmptyInputError(CurateError):
    code = "empty_input"


class ZeroMassError(CurateError):
    code = "zero_mass"


class ArityError(CurateError):
    code = "arity"


class TooLargeError(CurateError):
    code = "too_large"


class SizeError(CurateError):
    code = "size"


class OneClassError(CurateError):
    code = "one_class"


class EmptyError(CurateError):
    code = "empty"


class DuplicatePairError(CurateError):
    code = "duplicate_pair"


class LengthMismatchError(CurateError):
    code = "length_mismatch"


class MissingCellError(CurateError):
    code = "missing_cell"


class InvariantError(CurateError):
    code = "invariant"
    exit_status = 4


class DomainError(CurateError, ValueError):
    """An argument outside the domain an operation is defined on."""

    code = "domain"

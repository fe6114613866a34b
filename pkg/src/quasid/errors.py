"""Exception hierarchy shared across the package.

Each class carries the process exit code the CLI maps it to:
config/usage problems exit 2, data/format problems exit 3, numeric
failures exit 4.
"""


class QuasidError(Exception):
    exit_code = 1


class ConfigError(QuasidError):
    """Bad configuration value or flag combination."""

    exit_code = 2


class ContractError(QuasidError):
    """An operation was called with inputs violating its precondition."""

    exit_code = 3


class DataError(QuasidError):
    """Malformed or inconsistent input data (files, ids, indices)."""

    exit_code = 3


class NumericError(QuasidError):
    """Non-finite values or a failed numeric check."""

    exit_code = 4

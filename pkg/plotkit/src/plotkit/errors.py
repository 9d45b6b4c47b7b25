"""Errors raised while reading experiment CSVs."""


class PlotkitError(Exception):
    """Base class for plotkit failures."""


class SchemaMismatch(PlotkitError):
    """The CSV header lacks a column the plot needs."""


class EmptyInput(PlotkitError):
    """The CSV contains a header but no data rows."""

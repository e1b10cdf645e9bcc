"""Exceptions shared across the package."""


class ParseError(ValueError):
    """An input file is malformed (bad JSON, missing keys, wrong types)."""


class ValidationError(ValueError):
    """A precondition or structural invariant is violated."""

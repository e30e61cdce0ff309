"""Exception types shared across the package.

The CLI maps these onto process exit codes, so library code should raise
the most specific class that applies rather than bare ValueError whenever
the failure is about input data instead of programmer error.
"""

from __future__ import annotations


class ParseError(ValueError):
    """Malformed textual input: bad dyadic literal, bad bit string, bad JSON shape."""


class PreconditionError(ValueError):
    """A documented caller obligation (certificate, strictness, cap) does not hold."""


class CertificateError(PreconditionError):
    """A caller-supplied certificate was checked on concrete data and failed."""

    def __init__(self, message: str, witness: str | None = None):
        super().__init__(message)
        self.witness = witness


class AmbiguityError(PreconditionError):
    """Both children of a node reached the decoding threshold at the same stage."""

    def __init__(self, message: str, node: str, stage: int):
        super().__init__(message)
        self.node = node
        self.stage = stage


class BudgetExhaustedError(RuntimeError):
    """A stage budget ran out before the wanted event was observed."""

    def __init__(self, message: str, position: int, max_stage: int):
        super().__init__(message)
        self.position = position
        self.max_stage = max_stage

"""Exception types shared across the package.

Every error raised for bad input carries a short machine-readable ``code``
(``"not-complete"``, ``"kernel-meets-cone"``, ...) so the CLI can report it
and tests can match on it.
"""

from __future__ import annotations


class ToricError(ValueError):
    """Base class for input/precondition failures."""

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}" if detail else code)


class LPError(ToricError):
    pass


class ConeError(ToricError):
    pass


class FanValidationError(ToricError):
    """Raised with the full list of axiom violations found in a fan."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__(self.violations[0].split("(")[0], "; ".join(self.violations))


class RatFuncError(ToricError):
    pass


class ParseError(ToricError):
    pass

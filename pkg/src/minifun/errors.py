"""Refusal codes and error types shared across the engine.

Every operator failure is a `Refusal` carrying a machine-readable code, a
human-readable detail string, and the locations (selector strings or
equation coordinates) that witnessed the problem.
"""
from __future__ import annotations

from dataclasses import dataclass, field


# Catalogue of refusal/error codes.  Kept as one flat tuple so tests can
# assert exhaustive coverage of the documented failure modes.  Parse errors
# (SyntaxError, DuplicateName, ArityMismatch) travel as SourceError, whose
# codes are listed separately below.
REFUSAL_CODES = (
    # name resolution / module shape
    "UnknownName",
    "UnknownType",
    "KindMismatch",
    "NameClash",
    "ArityMismatch",
    # selectors and focus
    "BadPath",
    "BadIndex",
    "NoFocus",
    "MultipleFoci",
    "AlreadyFocused",
    # operator-specific preconditions
    "BadPermutation",
    "NotAnAlias",
    "RhsMismatch",
    "BadArgMap",
    "NotAliasApplication",
    "CyclicAlias",
    "BadRange",
    "NotATuple",
    "NotANewtype",
    "NotConvertibleToNewtype",
    "NotEquivalent",
    "NotAnApplicationOfOld",
    "UnifierInvalid",
    "NotAData",
    "UnboundTypeVar",
    "LastConstructor",
    "NotADataOrNewtypeCons",
    "NotANewtypeTarget",
    "StillReferenced",
    # program-level lifting
    "UnsaturatedUntuplable",
    "UnsignedFunctionUsesType",
    "NestedOccurrenceUnsupported",
    "WouldEmptyFunction",
    "UnsaturatedPattern",
    "BoundaryPatternUnsupported",
    # engine
    "BadArguments",
    "EmptyHistory",
)

EVAL_CODES = ("HitBottom", "PatternMatchFailure", "Unbound", "FuelExhausted")

SOURCE_CODES = ("SyntaxError", "DuplicateName", "ArityMismatch")


class MiniFunError(Exception):
    """Base class for everything this package raises on purpose."""


@dataclass
class Refusal(MiniFunError):
    """A transformation (or query) declined to run; the input is untouched."""

    code: str
    detail: str
    locations: tuple[str, ...] = field(default=())
    step: int | None = None  # 1-based step index inside a script/compound

    def __post_init__(self) -> None:
        assert self.code in REFUSAL_CODES, f"uncatalogued refusal code {self.code}"
        super().__init__(f"{self.code}: {self.detail}")

    def format(self) -> str:
        where = ",".join(self.locations) if self.locations else "-"
        at_step = f" (step {self.step})" if self.step is not None else ""
        return f"{self.code}: {self.detail}{at_step} @ {where}"


class SourceError(MiniFunError):
    """Concrete-syntax problem with a position."""

    def __init__(self, code: str, message: str, line: int, column: int):
        self.code = code
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{code}: {message} @ {line}:{column}")

    def format(self) -> str:
        return f"{self.code}: {self.message} @ {self.line}:{self.column}"


class EvalError(MiniFunError):
    """Evaluator failure; `code` is one of EVAL_CODES."""

    def __init__(self, code: str, detail: str = ""):
        assert code in EVAL_CODES
        self.code = code
        super().__init__(f"{code}: {detail}" if detail else code)


def refuse(code: str, detail: str, locations: tuple[str, ...] = ()) -> Refusal:
    raise Refusal(code, detail, locations)

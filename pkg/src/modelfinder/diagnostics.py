"""Source locations and diagnostic types shared by all front-end stages."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SourceLocation:
    file: str
    line: int  # 1-based
    column: int  # 1-based

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError("line and column are 1-based")

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


NOWHERE = SourceLocation("<builtin>", 1, 1)


@dataclass(frozen=True)
class Diagnostic:
    """Base for all reported problems; `code` is a stable machine-readable kind."""

    code: str
    message: str
    location: SourceLocation = field(default=NOWHERE)

    def __str__(self):
        return f"{self.location}: {self.message}"


class ParseError(Diagnostic):
    pass


class ModelError(Diagnostic):
    pass


class OclTypeError(Diagnostic):
    pass


class StateError(Diagnostic):
    pass


@dataclass(frozen=True)
class ConfigError:
    """A rejected configuration entry; `key` names the offending key."""

    key: str
    message: str
    location: SourceLocation = field(default=NOWHERE)

    def __str__(self):
        return f"{self.location}: {self.key}: {self.message}"


class InputError(Exception):
    """Raised where an operation cannot return diagnostics as a value."""

    def __init__(self, diagnostics):
        if not isinstance(diagnostics, (list, tuple)):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))

"""Small pass/fail report structures shared by the checkers.

Witnesses are serialized polynomials or index data, never bare booleans, so a
failing report always says what broke.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckItem:
    name: str
    passed: bool
    witness: str | None = None

    def __str__(self):
        tail = "" if self.passed or not self.witness else f"  [{self.witness}]"
        return f"{self.name}: {'pass' if self.passed else 'fail'}{tail}"


@dataclass(frozen=True)
class Report:
    items: tuple[CheckItem, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(it.passed for it in self.items)

    @property
    def witness(self) -> str | None:
        for it in self.items:
            if not it.passed:
                return it.witness or it.name
        return None

    def __str__(self):
        head = "pass" if self.passed else "fail"
        body = "; ".join(str(it) for it in self.items)
        return f"{head} ({body})"

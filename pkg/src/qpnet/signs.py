"""The four-valued qualitative sign domain and its two combination operators."""
from __future__ import annotations

import enum
from typing import Iterable


class Sign(enum.Enum):
    """Qualitative sign of a probabilistic influence or a node's direction of change."""

    PLUS = "+"
    MINUS = "-"
    ZERO = "0"
    AMBIGUOUS = "?"

    def __str__(self) -> str:
        return self.value

    def __repr__(self) -> str:
        return f"Sign({self.value!r})"

    @classmethod
    def from_bool(cls, value: bool) -> "Sign":
        """Sign of an observation: true observes as '+', false as '-'."""
        return cls.PLUS if value else cls.MINUS


PLUS = Sign.PLUS
MINUS = Sign.MINUS
ZERO = Sign.ZERO
AMBIGUOUS = Sign.AMBIGUOUS

# Sign product: combines signs along a chain of influences.
# Zero annihilates, plus is the identity, ambiguity survives anything nonzero.
_PRODUCT = {
    (PLUS, PLUS): PLUS, (PLUS, MINUS): MINUS, (PLUS, ZERO): ZERO, (PLUS, AMBIGUOUS): AMBIGUOUS,
    (MINUS, PLUS): MINUS, (MINUS, MINUS): PLUS, (MINUS, ZERO): ZERO, (MINUS, AMBIGUOUS): AMBIGUOUS,
    (ZERO, PLUS): ZERO, (ZERO, MINUS): ZERO, (ZERO, ZERO): ZERO, (ZERO, AMBIGUOUS): ZERO,
    (AMBIGUOUS, PLUS): AMBIGUOUS, (AMBIGUOUS, MINUS): AMBIGUOUS, (AMBIGUOUS, ZERO): ZERO,
    (AMBIGUOUS, AMBIGUOUS): AMBIGUOUS,
}

# Sign addition: combines parallel influences on one node.
# Zero is the identity, ambiguity absorbs, opposite signs clash into ambiguity.
_ADD = {
    (PLUS, PLUS): PLUS, (PLUS, MINUS): AMBIGUOUS, (PLUS, ZERO): PLUS, (PLUS, AMBIGUOUS): AMBIGUOUS,
    (MINUS, PLUS): AMBIGUOUS, (MINUS, MINUS): MINUS, (MINUS, ZERO): MINUS, (MINUS, AMBIGUOUS): AMBIGUOUS,
    (ZERO, PLUS): PLUS, (ZERO, MINUS): MINUS, (ZERO, ZERO): ZERO, (ZERO, AMBIGUOUS): AMBIGUOUS,
    (AMBIGUOUS, PLUS): AMBIGUOUS, (AMBIGUOUS, MINUS): AMBIGUOUS, (AMBIGUOUS, ZERO): AMBIGUOUS,
    (AMBIGUOUS, AMBIGUOUS): AMBIGUOUS,
}


def product(s1: Sign, s2: Sign) -> Sign:
    """Chain two signs."""
    return _PRODUCT[(s1, s2)]


def add(s1: Sign, s2: Sign) -> Sign:
    """Combine two parallel signs."""
    return _ADD[(s1, s2)]


def add_all(signs: Iterable[Sign]) -> Sign:
    """Fold `add` over `signs`; the empty combination is ZERO."""
    total = ZERO
    for s in signs:
        total = add(total, s)
    return total

from __future__ import annotations

import enum


class Label(str, enum.Enum):
    """Three-way verdict. Files store the value; classification exports the letter."""

    TRUE = "True"
    FALSE = "False"
    UNCERTAIN = "Uncertain"

    def __str__(self) -> str:
        return self.value

    @property
    def letter(self) -> str:
        return _LETTERS[self]

    @classmethod
    def from_letter(cls, letter: str) -> "Label":
        for label, value in _LETTERS.items():
            if value == letter:
                return label
        raise ValueError(f"unknown label letter {letter!r}")

    @classmethod
    def parse(cls, text: str) -> "Label":
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"label must be one of True/False/Uncertain, got {text!r}") from None


_LETTERS = {Label.TRUE: "A", Label.FALSE: "B", Label.UNCERTAIN: "C"}

ORDER = (Label.TRUE, Label.FALSE, Label.UNCERTAIN)

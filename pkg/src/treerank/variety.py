"""Tree variety tags shared by every module."""

from __future__ import annotations

import enum


class TreeVariety(enum.Enum):
    """Which 1-2 tree family a computation refers to.

    NONPLANE: sibling order is irrelevant; the trees on [n] are counted
    by the zigzag numbers 1, 1, 1, 2, 5, 16, 61, ...
    PLANE: sibling order matters; the counts are 1, 1, 1, 3, 9, 39, ...
    """

    NONPLANE = "nonplane"
    PLANE = "plane"

    def __str__(self) -> str:
        return self.value


def parse_variety(text: str) -> TreeVariety:
    try:
        return TreeVariety(text.lower())
    except ValueError:
        raise ValueError(f"unknown variety {text!r}; expected 'nonplane' or 'plane'") from None

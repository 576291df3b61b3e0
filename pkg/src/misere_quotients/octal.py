"""Octal game rules: parsing game codes and generating single-heap moves.

A game code like "0.123" assigns an octal digit to each number of removed
tokens.  Digit k (k >= 1 is the k-th digit after the point) is a bit mask:

    bit 1: remove k tokens taking a whole heap (heap size exactly k)
    bit 2: remove k tokens leaving one nonempty heap
    bit 4: remove k tokens leaving two nonempty heaps

The digit before the point governs removing zero tokens; only bit 4 (pure
split) is meaningful there, so the pre-point digit must be 0 or 4.  Digits
past the last written one are 0: no move removes more tokens than the code
has places.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable


class GameCodeError(ValueError):
    """Raised for malformed or unsupported game code strings."""


@dataclass(frozen=True)
class GameCode:
    """A parsed octal game code."""

    pre_point_digit: int
    post_point_digits: tuple[int, ...]

    @property
    def places(self) -> int:
        """Number of digits after the point."""
        return len(self.post_point_digits)

    def digit(self, k: int) -> int:
        """The digit governing removal of exactly k tokens (0 beyond the code)."""
        if k == 0:
            return self.pre_point_digit
        if 1 <= k <= len(self.post_point_digits):
            return self.post_point_digits[k - 1]
        return 0

    def __str__(self) -> str:
        return "%d.%s" % (
            self.pre_point_digit,
            "".join(str(d) for d in self.post_point_digits),
        )


_CODE_RE = re.compile(r"^([0-7])\.([0-7]+)$")


def parse_game_code(text: str) -> GameCode:
    """Parse a game code string of the form d.ddd with octal digits."""
    m = _CODE_RE.match(text.strip())
    if m is None:
        raise GameCodeError("malformed game code: %r" % (text,))
    pre = int(m.group(1))
    post = tuple(int(ch) for ch in m.group(2))
    if pre not in (0, 4):
        raise GameCodeError(
            "pre-point digit must be 0 or 4, got %d in %r" % (pre, text)
        )
    if pre == 0 and all(d == 0 for d in post):
        raise GameCodeError("game code %r permits no move at all" % (text,))
    return GameCode(pre, post)


@dataclass(frozen=True, order=True)
class Position:
    """A finite multiset of heap sizes, the canonical form of a game position.

    Stored as a sorted tuple; the empty position (no heaps) is the endgame.
    Multiplication of positions is disjoint union of their heaps.
    """

    heaps: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(h < 1 for h in self.heaps):
            raise ValueError("heap sizes must be >= 1: %r" % (self.heaps,))
        if tuple(sorted(self.heaps)) != self.heaps:
            object.__setattr__(self, "heaps", tuple(sorted(self.heaps)))

    @classmethod
    def of(cls, *heaps: int) -> "Position":
        return cls(tuple(heaps))

    @classmethod
    def from_heaps(cls, heaps: Iterable[int]) -> "Position":
        return cls(tuple(heaps))

    def exponents(self) -> dict[int, int]:
        """Sparse heap-size -> multiplicity view."""
        out: dict[int, int] = {}
        for h in self.heaps:
            out[h] = out.get(h, 0) + 1
        return out

    def __mul__(self, other: "Position") -> "Position":
        return Position(self.heaps + other.heaps)

    def add_heaps(self, heaps: Iterable[int]) -> "Position":
        return Position(self.heaps + tuple(heaps))

    def remove_one(self, size: int) -> "Position":
        """The position with one heap of the given size taken out."""
        i = self.heaps.index(size)
        return Position(self.heaps[:i] + self.heaps[i + 1 :])

    def tokens(self) -> int:
        return sum(self.heaps)

    def is_empty(self) -> bool:
        return not self.heaps

    def __len__(self) -> int:
        return len(self.heaps)

    def __str__(self) -> str:
        return "[" + ",".join(str(h) for h in self.heaps) + "]"


EMPTY = Position()


@lru_cache(maxsize=None)
def moves_from_heap(code: GameCode, f: int) -> frozenset[Position]:
    """All replacement multisets reachable by one legal move from a heap of size f.

    Splits are unordered: a remainder s yields pairs {a, s-a} for
    1 <= a <= s // 2.  Returns the empty set when the heap has no move.
    """
    if f < 1:
        raise ValueError("heap size must be >= 1, got %d" % (f,))
    out: set[Position] = set()
    for k in range(0, f + 1):
        d = code.digit(k)
        if d == 0:
            continue
        rest = f - k
        if d & 1 and rest == 0 and k >= 1:
            out.add(EMPTY)
        if d & 2 and rest >= 1:
            out.add(Position.of(rest))
        if d & 4 and rest >= 2:
            for a in range(1, rest // 2 + 1):
                out.add(Position.of(a, rest - a))
    return frozenset(out)

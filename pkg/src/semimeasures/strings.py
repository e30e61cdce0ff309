"""Finite binary strings and the cylinder-set algebra over them.

Strings are plain Python ``str`` over the alphabet {0, 1}; the empty string
is the root of the binary tree.  A finite set of pairwise prefix-incomparable
strings (an antichain) denotes the clopen union of its cylinders, and all set
operations here keep that representation canonical: sorted by (length,
lexicographic), duplicates removed.

For antichains plain string sorting agrees with left-to-right order of the
cylinders on the unit interval, which the interval-allocation code relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .dyadic import Dyadic, ZERO
from .errors import ParseError

EPSILON = ""

StringSet = tuple[str, ...]


def check_bits(s: str) -> str:
    """Validate a 0/1 literal and return it unchanged."""
    if not isinstance(s, str) or any(c not in "01" for c in s):
        raise ParseError(f"not a binary string: {s!r}")
    return s


def is_prefix(a: str, b: str) -> bool:
    """True when a is a (not necessarily proper) prefix of b."""
    return b.startswith(a)


def comparable(a: str, b: str) -> bool:
    return a.startswith(b) or b.startswith(a)


def sort_key(s: str):
    return (len(s), s)


def canon(strings: Iterable[str]) -> StringSet:
    """Deduplicate and sort into the canonical (length, lex) order."""
    return tuple(sorted(set(strings), key=sort_key))


def all_strings(length: int) -> Iterator[str]:
    """All binary strings of exactly the given length, in lex order."""
    if length == 0:
        yield EPSILON
        return
    for k in range(1 << length):
        yield format(k, f"0{length}b")


def strings_up_to(depth: int) -> Iterator[str]:
    """All binary strings of length <= depth, shortest first."""
    for n in range(depth + 1):
        yield from all_strings(n)


def extensions(s: str, m: int) -> Iterator[str]:
    for tail in all_strings(m):
        yield s + tail


def leading_ones(s: str) -> int:
    """Length of the maximal all-ones prefix."""
    n = 0
    for c in s:
        if c != "1":
            break
        n += 1
    return n


def is_prefix_free(strings: Iterable[str]) -> bool:
    items = canon(strings)
    for i, a in enumerate(items):
        for b in items[i + 1 :]:
            if b.startswith(a):
                return False
    return True


def prefix_free_normalize(strings: Iterable[str]) -> StringSet:
    """Minimal members of the set: drop every proper extension of a member.

    The result denotes the same open set of infinite sequences and is an
    antichain.  Normalising twice is the same as normalising once.
    """
    kept: list[str] = []
    for s in canon(strings):  # shortest first, so minimal members survive
        if not any(s.startswith(k) for k in kept):
            kept.append(s)
    return tuple(kept)


def lebesgue_of_set(strings: Iterable[str]) -> Dyadic:
    """Uniform measure of the union of cylinders, normalising first."""
    total = ZERO
    for s in prefix_free_normalize(strings):
        total = total + Dyadic.pow2(-len(s))
    return total


def extend_set(strings: Iterable[str], m: int) -> StringSet:
    """Replace each member of an antichain by all its length +m extensions.

    Measure is preserved and the result is again an antichain.
    """
    if m < 0:
        raise ValueError("extension depth must be non-negative")
    items = canon(strings)
    if not is_prefix_free(items):
        raise ValueError("extend_set requires a prefix-free set")
    return canon(e for s in items for e in extensions(s, m))


def intersect_sets(a: Iterable[str], b: Iterable[str]) -> StringSet:
    """Antichain denoting the intersection of the two cylinder unions.

    For comparable members the longer one carves out the overlap; for
    prefix-free inputs the result is prefix-free.
    """
    out = []
    items_b = canon(b)
    for x in canon(a):
        for y in items_b:
            if y.startswith(x):
                out.append(y)
            elif x.startswith(y):
                out.append(x)
    return prefix_free_normalize(out)


def subtract_sets(a: Iterable[str], b: Iterable[str]) -> StringSet:
    """Antichain denoting (union of a) minus (union of b)."""
    removed = canon(b)

    def carve(cyl: str, blockers: Sequence[str]) -> list[str]:
        if any(cyl.startswith(q) for q in blockers):
            return []
        inner = [q for q in blockers if q.startswith(cyl) and q != cyl]
        if not inner:
            return [cyl]
        return carve(cyl + "0", inner) + carve(cyl + "1", inner)

    out: list[str] = []
    for cyl in canon(a):
        out.extend(carve(cyl, removed))
    return canon(out)


@dataclass(frozen=True)
class StagedFamily:
    """Stagewise enumeration of an indexed family of string sets.

    ``events`` lists (stage, level, string) entries; the set at a level is
    cumulative in the stage.  Enumeration order within the event tuple is
    meaningful and ties are broken by it.
    """

    events: tuple[tuple[int, int, str], ...]

    @classmethod
    def from_events(cls, events: Iterable[tuple[int, int, str]]) -> "StagedFamily":
        evs = []
        for stage, level, s in events:
            if stage < 0 or level < 0:
                raise ValueError("stage and level must be non-negative")
            evs.append((int(stage), int(level), check_bits(s)))
        return cls(tuple(evs))

    def level_at(self, level: int, stage: int) -> StringSet:
        seen = []
        for t, lv, s in self.events:
            if lv == level and t <= stage and s not in seen:
                seen.append(s)
        return tuple(seen)

    def entry_stage(self, level: int, s: str, stage: int) -> int | None:
        """First stage <= ``stage`` at which ``s`` appears on ``level``."""
        best = None
        for t, lv, x in self.events:
            if lv == level and x == s and t <= stage and (best is None or t < best):
                best = t
        return best

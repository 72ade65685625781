"""Free-group words over a_1..a_m, plus the mixed alphabet with the stable letter s.

A word is a tuple of signed ints: ``i`` stands for a_i, ``-i`` for a_i^-1.
The stable letter s is the reserved index ``S`` (so ``-S`` is s^-1); words
over the free group F(a_1..a_m) simply never contain ``+-S``.  Tuples are
immutable, so every operation here is a pure function.
"""

from __future__ import annotations

import re
from typing import Iterator

Word = tuple[int, ...]

# Reserved letter index for the stable generator s.  Generator subscripts are
# small (the rank m of practical sessions is single-digit), so any large
# sentinel is safe.
S = 1 << 20

EMPTY: Word = ()


class WordError(ValueError):
    """Malformed word input (bad index, s where an a-word is required, parse error)."""


def is_a_word(w: Word) -> bool:
    return all(abs(x) != S for x in w)


def check_rank(w: Word, m: int) -> None:
    for x in w:
        if abs(x) != S and not 1 <= abs(x) <= m:
            raise WordError(f"letter index {abs(x)} exceeds rank bound {m}")


def free_reduce(w) -> Word:
    """Freely reduce a raw letter sequence (cancel adjacent x x^-1 pairs)."""
    out: list[int] = []
    for x in w:
        if x == 0:
            raise WordError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def reduce_a_word(w) -> Word:
    """free_reduce restricted to the a-alphabet; s-letters are a domain error."""
    for x in w:
        if abs(x) == S:
            raise WordError("s-letter in a free-group word")
    return free_reduce(w)


def concat(*words) -> Word:
    """Freely reduced product of already-reduced words."""
    out: list[int] = []
    for w in words:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def invert(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def conjugate(w: Word, c: Word) -> Word:
    """reduce(c^-1 w c)."""
    return concat(invert(c), w, c)


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split w = y . core . y^-1 with core cyclically reduced.

    Returns (core, y); y is the peeled prefix of w, and y^-1 w y = core.
    """
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j], w[:i]


def is_cyclically_reduced(w: Word) -> bool:
    return not w or w[0] != -w[-1]


def rotations(w: Word) -> Iterator[Word]:
    for k in range(len(w)):
        yield w[k:] + w[:k]


def subwords(w: Word) -> Iterator[Word]:
    """All nonempty subwords, by start index then end index."""
    n = len(w)
    for i in range(n):
        for j in range(i + 1, n + 1):
            yield w[i:j]


def prefixes(w: Word, include_empty: bool = True) -> Iterator[Word]:
    if include_empty:
        yield EMPTY
    for j in range(1, len(w) + 1):
        yield w[:j]


def suffixes(w: Word, include_empty: bool = True) -> Iterator[Word]:
    if include_empty:
        yield EMPTY
    for i in range(len(w) - 1, -1, -1):
        yield w[i:]


def common_prefix_len(u: Word, v: Word) -> int:
    n = min(len(u), len(v))
    k = 0
    while k < n and u[k] == v[k]:
        k += 1
    return k


def exp_sum(w: Word, index: int) -> int:
    """Exponent sum of the generator with the given index (use S for s)."""
    return sum(1 if x == index else -1 if x == -index else 0 for x in w)


def abelianization(w: Word, m: int) -> tuple[int, ...]:
    """Exponent-sum vector over (a_1, .., a_m); s-letters are ignored."""
    v = [0] * m
    for x in w:
        i = abs(x)
        if i != S:
            v[i - 1] += 1 if x > 0 else -1
    return tuple(v)


# ---------------------------------------------------------------------------
# Parsing and printing.
#
# Grammar:  WORD := eps | TOKEN (WS TOKEN)* ;  TOKEN := GEN POW? ;
#           GEN := 'a' DIGITS | 'A' DIGITS | 's' | 'S' ;  POW := '^' SIGNED_INT
# 'A k' means a_k^-1 and 'S' means s^-1; a power applies to its token.
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"([aA])(\d+)(?:\^(-?\d+))?$|([sS])(?:\^(-?\d+))?$")


def parse_word(text: str, m: int, allow_s: bool = True) -> Word:
    """Parse the CLI word grammar into a raw (unreduced) word."""
    letters: list[int] = []
    for tok in text.split():
        match = _TOKEN_RE.match(tok)
        if not match:
            raise WordError(f"bad token {tok!r}")
        if match.group(1):
            idx = int(match.group(2))
            if not 1 <= idx <= m:
                raise WordError(f"generator a{idx} exceeds rank {m}")
            base = idx if match.group(1) == "a" else -idx
            power = int(match.group(3)) if match.group(3) else 1
        else:
            if not allow_s:
                raise WordError("s is not allowed here")
            base = S if match.group(4) == "s" else -S
            power = int(match.group(5)) if match.group(5) else 1
        if power < 0:
            base, power = -base, -power
        letters.extend([base] * power)
    return tuple(letters)


def format_word(w: Word) -> str:
    """Lowercase-caret form, runs collapsed: e.g. 'a3^-1 s^2'."""
    if not w:
        return ""
    parts: list[str] = []
    run_letter, run_len = w[0], 1
    for x in w[1:]:
        if x == run_letter:
            run_len += 1
        else:
            parts.append(_format_run(run_letter, run_len))
            run_letter, run_len = x, 1
    parts.append(_format_run(run_letter, run_len))
    return " ".join(parts)


def _format_run(letter: int, count: int) -> str:
    name = "s" if abs(letter) == S else f"a{abs(letter)}"
    exp = count if letter > 0 else -count
    return name if exp == 1 else f"{name}^{exp}"

"""Ground-truth brute force: BFS conjugator search in H and exhaustive
twisted-equation search in F.

Both enumerations run over freely reduced words in shortlex order (letters
ordered a1 < a1^-1 < a2 < a2^-1 < ... < s < s^-1) and are exponential by
design; callers supply the caps and absence only certifies the searched ball.
"""

from __future__ import annotations

from typing import Iterator

from .words import Word, EMPTY, S, concat, invert
from .automorphism import apply_phi_power
from .group import HElem, check_conjugation, normal_form


def letter_order(m: int, with_s: bool = True) -> tuple[int, ...]:
    letters: list[int] = []
    for i in range(1, m + 1):
        letters.extend((i, -i))
    if with_s:
        letters.extend((S, -S))
    return tuple(letters)


def reduced_words(m: int, max_len: int, with_s: bool = True) -> Iterator[Word]:
    """All freely reduced words of length <= max_len, shortlex."""
    alphabet = letter_order(m, with_s)
    frontier: list[Word] = [EMPTY]
    yield EMPTY
    for _ in range(max_len):
        nxt: list[Word] = []
        for w in frontier:
            last = w[-1] if w else 0
            for x in alphabet:
                if x != -last:
                    nw = w + (x,)
                    nxt.append(nw)
                    yield nw
        frontier = nxt


def oracle_conjugate(u: HElem, v: HElem, max_len: int, m: int) -> Word | None:
    """First mixed word w (shortlex, length <= max_len) conjugating u to v."""
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    for w in reduced_words(m, max_len):
        if check_conjugation(u, normal_form(w), v):
            return w
    return None


def oracle_twisted(
    u_tilde: Word,
    v_tilde: Word,
    p: int,
    r_range: int,
    w_len: int,
    m: int,
) -> tuple[int, Word] | None:
    """First (r, w~) with u~ phi^-p(w~) = w~ phi^-r(v~) within the caps.

    r runs over [0, p) when p > 0, else over 0, 1, -1, .., r_range, -r_range.
    """
    if p > 0:
        r_values = list(range(p))
    else:
        r_values = [0]
        for k in range(1, r_range + 1):
            r_values.extend((k, -k))
    images = {r: apply_phi_power(v_tilde, -r) for r in r_values}
    for w in reduced_words(m, w_len, with_s=False):
        lhs = concat(u_tilde, apply_phi_power(w, -p))
        for r in r_values:
            if lhs == concat(w, images[r]):
                return r, w
    return None

"""The defining automorphism: phi(a_i) = a_i a_{i-1} for i >= 2, phi(a_1) = a_1.

Letter images under arbitrary powers are built from the reduced closed forms

    phi^r(a_i)  = phi^{r-1}(a_i) . phi^{r-1}(a_{i-1})          (r > 0)
    phi^r(a_i)  = phi^{r+1}(a_i) . phi^{r}(a_{i-1})^-1         (r < 0)

which concatenate without cancellation, so cache entries are reduced by
construction.  Image lengths obey exact binomial formulas, used both for the
growth data and as a cheap guard against runaway expansion.
"""

from __future__ import annotations

import itertools
from math import comb

from .words import Word, EMPTY, S, WordError, invert

INT64_MAX = (1 << 63) - 1

# Budget on total intermediate letters materialized by a single word-image
# computation.  The solvers only need |r| linear in input size; this stops the
# CLI from hanging on hostile powers.
DEFAULT_BUDGET = 10_000_000


class BudgetError(ResourceWarning):
    """Raised when a phi-power application would exceed its letter budget."""


# (generator index, power) -> reduced word phi^power(a_index).  Concurrent
# fill-or-read is safe: inserts are idempotent and assignment is atomic.
_CACHE: dict[tuple[int, int], Word] = {(1, 0): (1,)}


def phi_letter(i: int, r: int, budget: int = DEFAULT_BUDGET) -> Word:
    """Reduced word phi^r(a_i) for a positive letter index i."""
    if i < 1:
        raise WordError(f"bad generator index {i}")
    if i == 1 or r == 0:
        return (i,)
    key = (i, r)
    cached = _CACHE.get(key)
    if cached is not None:
        return cached
    if letter_image_length(i, r) > budget:
        raise BudgetError(f"phi^{r}(a_{i}) exceeds budget {budget}")
    if r > 0:
        word = phi_letter(i, r - 1, budget) + phi_letter(i - 1, r - 1, budget)
    else:
        word = phi_letter(i, r + 1, budget) + invert(phi_letter(i - 1, r, budget))
    _CACHE[key] = word
    return word


def phi_letter_closed_form(i: int, r: int, budget: int = DEFAULT_BUDGET) -> Word:
    """phi^r(a_i) assembled letterwise from the closed form; i >= 2, r != 0.

    For r > 0 this is a_i a_{i-1} phi(a_{i-1}) ... phi^{r-1}(a_{i-1}); for
    r < 0 it is a_i phi^-1(a_{i-1})^-1 ... phi^r(a_{i-1})^-1.  The pieces
    concatenate with no cancellation.
    """
    if i < 2:
        raise WordError("closed form needs i >= 2")
    if r == 0:
        raise WordError("closed form needs r != 0")
    parts: list[Word] = [(i,)]
    if r > 0:
        parts.extend(phi_letter(i - 1, k, budget) for k in range(r))
    else:
        parts.extend(invert(phi_letter(i - 1, -k, budget)) for k in range(1, -r + 1))
    return tuple(itertools.chain.from_iterable(parts))


def letter_image_length(i: int, r: int) -> int:
    """|phi^r(a_i)| by the binomial formulas, with a 64-bit overflow check."""
    if i < 1:
        raise WordError(f"bad generator index {i}")
    if r >= 0:
        n = sum(comb(r, j) for j in range(i))
    else:
        n = sum(comb(-r + j - 1, j) for j in range(i))
    if n > INT64_MAX:
        raise OverflowError(f"|phi^{r}(a_{i})| overflows 64 bits")
    return n


def word_image_length(w: Word, r: int) -> int:
    """Total letters of the letterwise images of w (before any reduction)."""
    total = 0
    for x in w:
        if abs(x) == S:
            raise WordError("s-letter in a free-group word")
        total += letter_image_length(abs(x), r)
    return total


def apply_phi_power(w: Word, r: int, budget: int = DEFAULT_BUDGET) -> Word:
    """Freely reduced phi^r(w) for an a-word w; r may be any integer."""
    if r == 0:
        return w
    if word_image_length(w, r) > budget:
        raise BudgetError(f"phi^{r} image of a {len(w)}-letter word exceeds budget {budget}")
    out: list[int] = []
    for x in w:
        if abs(x) == S:
            raise WordError("s-letter in a free-group word")
        img = phi_letter(x, r, budget) if x > 0 else invert(phi_letter(-x, r, budget))
        for y in img:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return tuple(out)


def phi_letter_prefix(i: int, r: int, n: int, budget: int = DEFAULT_BUDGET) -> Word:
    """First min(n, length) letters of phi^r(a_i) without building the whole image."""
    if n <= 0:
        return EMPTY
    if i == 1 or r == 0:
        return (i,)[:n]
    out: list[int] = [i]
    if r > 0:
        for k in range(r):
            if len(out) >= n:
                break
            seg_len = letter_image_length(i - 1, k)
            need = n - len(out)
            if seg_len <= need:
                out.extend(phi_letter(i - 1, k, budget))
            else:
                out.extend(phi_letter_prefix(i - 1, k, need, budget))
    else:
        for k in range(1, -r + 1):
            if len(out) >= n:
                break
            need = n - len(out)
            out.extend(invert(phi_letter_suffix(i - 1, -k, need, budget)))
    return tuple(out[:n])


def phi_letter_suffix(i: int, r: int, n: int, budget: int = DEFAULT_BUDGET) -> Word:
    """Last min(n, length) letters of phi^r(a_i)."""
    if n <= 0:
        return EMPTY
    if i == 1 or r == 0:
        return (i,)[-n:]
    out: list[int] = []
    if r > 0:
        for k in range(r - 1, -1, -1):
            if len(out) >= n:
                break
            need = n - len(out)
            seg = phi_letter_suffix(i - 1, k, need, budget)
            out = list(seg) + out
        if len(out) < n:
            out = [i] + out
    else:
        for k in range(-r, 0, -1):
            if len(out) >= n:
                break
            need = n - len(out)
            seg = invert(phi_letter_prefix(i - 1, -k, need, budget))
            out = list(seg) + out
        if len(out) < n:
            out = [i] + out
    return tuple(out[-n:])


def is_prefix_of_phi_letter(x: Word, i: int, r: int) -> bool:
    """Is x a literal prefix of phi^r(a_i)?  Lazy in the image length."""
    if not x:
        return True
    if letter_image_length(i, r) < len(x):
        return False
    return phi_letter_prefix(i, r, len(x)) == x


def is_fixed(w: Word) -> bool:
    """Is w fixed by phi?  Fix(phi) is generated by a_1 and a_2 a_1 a_2^-1."""
    return apply_phi_power(w, 1) == w

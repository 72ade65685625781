"""Elements of H_m = F(a_1..a_m) x| <s> in normal form u~ s^p.

Mixed words are normalized by shuffling s-letters to the right end via
s a_i -> phi^-1(a_i) s and s^-1 a_i -> phi(a_i) s^-1.  Multiplication is the
semidirect-product law (u, p)(v, q) = (u . phi^-p(v), p + q).
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import Word, EMPTY, S, WordError, concat, free_reduce, invert
from .automorphism import DEFAULT_BUDGET, apply_phi_power


@dataclass(frozen=True)
class HElem:
    """Normal form: a reduced a-word and the s-exponent."""

    u_tilde: Word
    s_exp: int

    def __iter__(self):
        return iter((self.u_tilde, self.s_exp))


IDENTITY = HElem(EMPTY, 0)


def normal_form(w, budget: int = DEFAULT_BUDGET) -> HElem:
    word, p = _shuffle_blocks(free_reduce(w), budget)
    return HElem(free_reduce(word), p)


def normal_form_stages(w, budget: int = DEFAULT_BUDGET) -> tuple[list[Word], HElem]:
    """normal_form plus the pre-reduction word after each s-block advancement."""
    stages: list[Word] = []
    word, p = _shuffle_blocks(free_reduce(w), budget, stages)
    return stages, HElem(free_reduce(word), p)


def _shuffle_blocks(w: Word, budget: int, stages: list[Word] | None = None) -> tuple[Word, int]:
    """Advance the leftmost s-block rightwards past the a-run after it; on
    meeting an opposite block cancel, on reaching the end absorb into the
    exponent.  Input must be freely reduced (so s-blocks have uniform sign)."""
    letters = list(w)
    s_exp = 0
    while letters and abs(letters[-1]) == S:
        s_exp += 1 if letters.pop() > 0 else -1
    while True:
        pos = next((k for k, x in enumerate(letters) if abs(x) == S), None)
        if pos is None:
            break
        delta = 1 if letters[pos] > 0 else -1
        bend = pos
        while bend < len(letters) and letters[bend] == letters[pos]:
            bend += 1
        count = bend - pos
        run_end = bend
        while run_end < len(letters) and abs(letters[run_end]) != S:
            run_end += 1
        moved: list[int] = []
        for x in letters[bend:run_end]:
            moved.extend(apply_phi_power((x,), -delta * count, budget))
        if run_end == len(letters):
            letters[pos:] = moved
            s_exp += delta * count
        elif letters[run_end] == -S * delta:
            # Opposite block: cancel as many pairs as possible.
            nb_end = run_end
            while nb_end < len(letters) and letters[nb_end] == letters[run_end]:
                nb_end += 1
            cancel = min(count, nb_end - run_end)
            keep = [S * delta] * (count - cancel)
            letters[pos : run_end + cancel] = moved + keep
        else:
            # Same-signed block ahead: merge with it.
            letters[pos:run_end] = moved + [S * delta] * count
        if stages is not None:
            tail = letters
            while tail and abs(tail[-1]) == S:
                s_exp += 1 if tail.pop() > 0 else -1
            stages.append(tuple(letters))
        else:
            while letters and abs(letters[-1]) == S:
                s_exp += 1 if letters.pop() > 0 else -1
    return tuple(letters), s_exp


def h_mul(g: HElem, h: HElem, budget: int = DEFAULT_BUDGET) -> HElem:
    u, p = g
    v, q = h
    return HElem(concat(u, apply_phi_power(v, -p, budget)), p + q)


def h_inv(g: HElem, budget: int = DEFAULT_BUDGET) -> HElem:
    u, p = g
    return HElem(apply_phi_power(invert(u), p, budget), -p)


def h_equal(g: HElem, h: HElem) -> bool:
    return g.u_tilde == h.u_tilde and g.s_exp == h.s_exp


def h_conjugate(g: HElem, c: HElem, budget: int = DEFAULT_BUDGET) -> HElem:
    """c^-1 g c."""
    return h_mul(h_mul(h_inv(c, budget), g, budget), c, budget)


def check_conjugation(u: HElem, w: HElem, v: HElem, budget: int = DEFAULT_BUDGET) -> bool:
    """Does w conjugate u to v, i.e. u w = w v in H?"""
    return h_equal(h_mul(u, w, budget), h_mul(w, v, budget))


def word_of_element(g: HElem) -> Word:
    """The obvious mixed-word representative u~ s^p."""
    u, p = g
    return u + ((S,) * p if p >= 0 else (-S,) * -p)


# ---------------------------------------------------------------------------
# Constructive subword shortening.
#
# A subword u' of the normal form's a-part equals, in H, a mixed word of
# length <= (2m+1) * len(source).  The proof-grade move set is used here:
# each stage either eliminates an adjacent opposite pair of s-letters
# (s^d X s^-d -> images) or pushes a final-run s into the exponent, so there
# are at most #s stages and each contributes bracket words of length <= m.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Stage:
    before: Word
    after: Word
    pos: int          # index of the moved s in `before`
    delta: int
    run_end: int      # index just past the moved a-run in `before`
    pair: bool        # True: the run was bracketed by s^d .. s^-d (both consumed)


def _shuffle_single(w: Word, budget: int) -> tuple[list[_Stage], Word, int]:
    letters = list(free_reduce(w))
    s_exp = 0
    while letters and abs(letters[-1]) == S:
        s_exp += 1 if letters.pop() > 0 else -1
    stages: list[_Stage] = []
    while True:
        s_positions = [k for k, x in enumerate(letters) if abs(x) == S]
        if not s_positions:
            break
        pos = None
        for k in s_positions:
            delta = 1 if letters[k] > 0 else -1
            nxt = next((j for j in s_positions if j > k), None)
            if nxt is not None and letters[nxt] == -letters[k]:
                pos, run_end, pair = k, nxt, True
                break
        if pos is None:
            # All remaining s-letters share one sign; push the rightmost out.
            pos = s_positions[-1]
            delta = 1 if letters[pos] > 0 else -1
            run_end, pair = len(letters), False
        before = tuple(letters)
        moved: list[int] = []
        for x in letters[pos + 1 : run_end]:
            moved.extend(apply_phi_power((x,), -delta, budget))
        if pair:
            letters[pos : run_end + 1] = moved
        else:
            letters[pos:] = moved
            s_exp += delta
        stages.append(_Stage(before, tuple(letters), pos, delta, run_end, pair))
    return stages, tuple(letters), s_exp


def short_subword_word(source, span: tuple[int, int], budget: int = DEFAULT_BUDGET) -> Word:
    """A mixed word equal in H to normal_form(source).u_tilde[span]."""
    source = tuple(free_reduce(source))
    stages, final, _ = _shuffle_single(source, budget)
    u_tilde = free_reduce(final)
    lo, hi = span
    if not 0 <= lo <= hi <= len(u_tilde):
        raise WordError(f"span {span} outside the normal form")
    if lo == hi:
        return EMPTY

    lo, hi = _lift_through_reduction(final, lo, hi)
    mus: list[Word] = []
    lams: list[Word] = []
    for stage in reversed(stages):
        lo, hi, mu, lam = _lift_through_stage(stage, lo, hi, budget)
        if mu:
            mus.append(mu)
        if lam:
            lams.append(lam)
    base = stages[0].before if stages else source
    out: list[int] = []
    for part in mus:
        out.extend(part)
    out.extend(base[lo:hi])
    for part in reversed(lams):
        out.extend(part)
    return tuple(out)


def _lift_through_reduction(raw: Word, lo: int, hi: int) -> tuple[int, int]:
    """Span of the reduced word -> span of the raw word reducing to it (the
    material between surviving letters cancels completely)."""
    stack: list[tuple[int, int]] = []
    for idx, x in enumerate(raw):
        if stack and stack[-1][0] == -x:
            stack.pop()
        else:
            stack.append((x, idx))
    return stack[lo][1], stack[hi - 1][1] + 1


def _lift_through_stage(stage: _Stage, lo: int, hi: int, budget: int) -> tuple[int, int, Word, Word]:
    """Map a span of stage.after to a span of stage.before plus brackets
    (mu, lam) with mu . before[lo':hi'] . lam = after[lo:hi] in H."""
    pos, delta, run_end = stage.pos, stage.delta, stage.run_end
    before, after = stage.before, stage.after
    windows: list[tuple[int, int]] = []
    cursor = pos
    for x in before[pos + 1 : run_end]:
        n = len(apply_phi_power((x,), -delta, budget))
        windows.append((cursor, cursor + n))
        cursor += n
    block_lo, block_hi = pos, cursor
    consumed = run_end + 1 if stage.pair else run_end
    s_word: Word = (S * delta,)

    def to_before(idx: int) -> int:
        return idx if idx <= block_lo else consumed + (idx - block_hi)

    if hi <= block_lo or lo >= block_hi:
        return to_before(lo), to_before(hi), EMPTY, EMPTY

    # Left end.
    mu: Word = EMPTY
    if lo < block_lo:
        new_lo = lo  # sub starts in alpha and will include the s itself
    else:
        k_lo = next(k for k, (a, b) in enumerate(windows) if lo < b)
        a, b = windows[k_lo]
        if lo == a:
            mu = s_word
            new_lo = pos + 1 + k_lo
        else:
            gamma = after[lo:b]
            if hi <= b:
                # Entire span inside one letter image: emit it verbatim.
                return pos, pos, after[lo:hi], EMPTY
            mu = after[lo:b] + s_word
            new_lo = pos + 1 + k_lo + 1

    # Right end.
    lam: Word = EMPTY
    if hi > block_hi:
        new_hi = to_before(hi)
    else:
        k_hi = max(k for k, (a, b) in enumerate(windows) if a < hi)
        a, b = windows[k_hi]
        if hi == b:
            lam = invert(s_word)
            new_hi = pos + 1 + k_hi + 1
        else:
            lam = invert(s_word) + after[a:hi]
            new_hi = pos + 1 + k_hi
    return new_lo, new_hi, mu, lam

"""Rank-i piece decompositions and the preserved-prefix shape analysis.

A rank-i piece is a maximal subword of shape a_i u, u a_i^-1, a_i u a_i^-1,
or u, with rank(u) < i.  Every rank-<=i word splits uniquely into a minimal
number of such pieces; the decomposition commutes with phi letterwise and no
cancellation occurs between pieces.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .words import (
    Word,
    EMPTY,
    WordError,
    S,
    common_prefix_len,
    concat,
    invert,
)
from .automorphism import apply_phi_power, is_fixed, letter_image_length, phi_letter_prefix


class PieceType(Enum):
    HEAD = "head"      # a_i u
    TAIL = "tail"      # u a_i^-1
    WRAP = "wrap"      # a_i u a_i^-1
    PLAIN = "plain"    # u, rank < i

    @property
    def strict(self) -> bool:
        return self is not PieceType.PLAIN


@dataclass(frozen=True)
class Piece:
    """One piece, stored as a [start, end) span into the parent word."""

    parent: Word
    start: int
    end: int
    rank: int
    ptype: PieceType

    @property
    def word(self) -> Word:
        return self.parent[self.start : self.end]

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class PieceDecomposition:
    source: Word
    rank: int
    pieces: tuple[Piece, ...]

    def words(self) -> tuple[Word, ...]:
        return tuple(p.word for p in self.pieces)

    def __len__(self) -> int:
        return len(self.pieces)


def rank(w: Word) -> int:
    """Largest generator index occurring; the empty word has rank 0."""
    r = 0
    for x in w:
        i = abs(x)
        if i == S:
            raise WordError("s-letter in a free-group word")
        if i > r:
            r = i
    return r


def decompose(w: Word, i: int | None = None) -> PieceDecomposition:
    """The unique minimal rank-i decomposition of a reduced word.

    Greedy scan: a new piece opens at every a_i and a pending piece closes at
    the first a_i^-1 (which it absorbs).  Defaults to i = rank(w).
    """
    r = rank(w)
    if i is None:
        i = r
    if r > i:
        raise WordError(f"rank {r} word cannot be decomposed at rank {i}")
    pieces: list[Piece] = []
    start = 0
    opened = False  # current piece started with a_i
    pos = 0
    for pos, x in enumerate(w):
        if x == i:
            if pos > start or opened:
                ptype = PieceType.HEAD if opened else PieceType.PLAIN
                pieces.append(Piece(w, start, pos, i, ptype))
            start, opened = pos, True
        elif x == -i:
            ptype = PieceType.WRAP if opened else PieceType.TAIL
            pieces.append(Piece(w, start, pos + 1, i, ptype))
            start, opened = pos + 1, False
    if start < len(w) or opened:
        ptype = PieceType.HEAD if opened else PieceType.PLAIN
        pieces.append(Piece(w, start, len(w), i, ptype))
    return PieceDecomposition(w, i, tuple(pieces))


def piece_count(w: Word) -> int:
    """#w: the number of pieces at rank(w); 0 for the empty word."""
    if not w:
        return 0
    return len(decompose(w))


def piecewise_image(dec: PieceDecomposition, r: int) -> tuple[Word, ...]:
    """Images of the pieces under phi^r (each again a single piece)."""
    return tuple(apply_phi_power(p.word, r) for p in dec.pieces)


@dataclass(frozen=True)
class PrefixShape:
    """Longest common prefix of a word and its phi^power image, split as
    P1 . P3 . P4 ... P_i where P1 is a prefix of phi^k(a_t) and each P_j is a
    subword of phi^power(a_j^-1)."""

    p1: Word
    t: int                      # generator subscript of the P1 provenance
    k: int                      # P1 is a prefix of phi^k(a_t)
    pj: tuple[tuple[int, Word], ...]  # (j, P_j) for j = 3..i, empty parts omitted
    power: int                  # the P_j are subwords of phi^power(a_j^-1)

    def concatenation(self) -> Word:
        out = self.p1
        for _, part in self.pj:
            out = out + part
        return out


def _match_p1(x: Word, i_max: int, k_bound: int) -> tuple[int, int] | None:
    """Find (t, k) with x a prefix of phi^k(a_t), t <= i_max, |k| <= k_bound."""
    if not x:
        return (1, 0)
    t = x[0]
    if t < 0 or t > i_max:
        return None
    for k in sorted(range(-k_bound, k_bound + 1), key=lambda v: (abs(v), v < 0)):
        if letter_image_length(t, k) >= len(x) and phi_letter_prefix(t, k, len(x)) == x:
            return (t, k)
    return None


def _subword_of_phi_letter_inverse(x: Word, j: int, power: int) -> bool:
    """Is x a subword of phi^power(a_j^-1)?"""
    if not x:
        return True
    img = invert(apply_phi_power((j,), power))
    n, m = len(img), len(x)
    return any(img[a : a + m] == x for a in range(n - m + 1))


def shared_prefix_shape(w: Word, r: int, k_bound: int) -> tuple[Word, PrefixShape] | None:
    """Replace w by w0 with the same reduced w^-1 phi^r(w) and a structured
    longest common prefix with phi^r(w0).

    Returns (w0, shape) or None when no |k| <= k_bound realizes the P1 part.
    Results are self-checked: the reduced difference words agree and the
    shape concatenation equals the literal common prefix.
    """
    if r == 0:
        raise WordError("power must be nonzero")
    img = apply_phi_power(w, r)
    if img == w:
        return EMPTY, PrefixShape(EMPTY, 1, 0, (), r)
    if r < 0:
        # Work with wbar = phi^r(w) under the positive power -r; the common
        # prefix is the same, and w0 = phi^{-r}(wbar0) restores orientation.
        res = _shared_prefix_pos(img, -r, k_bound)
        if res is None:
            return None
        wbar0, shape = res
        w0 = apply_phi_power(wbar0, -r)
    else:
        res = _shared_prefix_pos(w, r, k_bound)
        if res is None:
            return None
        w0, shape = res
    img0 = apply_phi_power(w0, r)
    same_diff = concat(invert(w), img) == concat(invert(w0), img0)
    lcp0 = common_prefix_len(w0, img0)
    if not same_diff or shape.concatenation() != w0[:lcp0]:
        return None
    return w0, shape


def _shared_prefix_pos(w: Word, r: int, k_bound: int) -> tuple[Word, PrefixShape] | None:
    i = rank(w)
    dec = decompose(w, i)
    # Fixed leading pieces contribute identically to w and phi^r(w) and drop
    # out of w^-1 phi^r(w); the replacement happens in the first moving piece.
    off = 0
    pi = None
    for piece in dec.pieces:
        pw = piece.word
        if apply_phi_power(pw, r) != pw:
            pi = pw
            break
        off += len(piece)
    if pi is None:
        return EMPTY, PrefixShape(EMPTY, 1, 0, (), r)
    tail = w[off + len(pi) :]

    res = _piece_prefix_replacement(pi, i, r, k_bound)
    if res is None:
        return None
    pi0, shape = res
    return pi0 + tail, shape


def _piece_prefix_replacement(pi: Word, i: int, r: int, k_bound: int) -> tuple[Word, PrefixShape] | None:
    """Core of the induction: replace a single piece by one whose common
    prefix with its phi^r image has the structured form."""
    j = rank(pi)
    if j < i:
        return _shared_prefix_pos(pi, r, k_bound) if pi else (EMPTY, PrefixShape(EMPTY, 1, 0, (), r))

    if i == 2:
        # Exceptional rank-2 case: the non-fixed piece shapes are a_2 a_1^q
        # and a_1^q a_2^-1; replace by the bare a_2 (resp. a_2^-1).
        if pi[0] == 2:
            return (2,), PrefixShape((2,), 2, 0, (), r)
        return (-2,), PrefixShape(EMPTY, 1, 0, (), r)

    if pi and pi[0] == i:
        # Piece starts with a_i: keep it; its common prefix with the image is
        # a prefix of some phi^k(a_i) followed by a subword of phi^r(a_i^-1).
        img = apply_phi_power(pi, r)
        lcp_len = common_prefix_len(pi, img)
        lcp = pi[:lcp_len]
        lam1, lam2 = lcp, EMPTY
        if pi[-1] == -i and len(pi) >= 2:
            head = pi[:-1]
            img_head = apply_phi_power(head, r)
            img_tail = invert(apply_phi_power((i,), r))
            cancel = 0
            while (
                cancel < len(img_head)
                and cancel < len(img_tail)
                and img_head[-1 - cancel] == -img_tail[cancel]
            ):
                cancel += 1
            survive = len(img_head) - cancel
            cut = min(lcp_len, survive)
            lam1, lam2 = lcp[:cut], lcp[cut:]
            if not _subword_of_phi_letter_inverse(lam2, i, r):
                return None
        matched = _match_p1(lam1, i, k_bound)
        if matched is None:
            return None
        t, k = matched
        pj = ((i, lam2),) if lam2 else ()
        return pi, PrefixShape(lam1, t, k, pj, r)

    # Tail piece u a_i^-1: recurse on u, then account for the cancellation of
    # phi^r(a_i^-1) into the recursive common prefix.
    u = pi[:-1]
    sub = _shared_prefix_pos(u, r, k_bound) if u else (EMPTY, PrefixShape(EMPTY, 1, 0, (), r))
    if sub is None:
        return None
    u0, shape0 = sub
    pi0 = u0 + (-i,)
    img0 = apply_phi_power(pi0, r)
    lcp_len = common_prefix_len(pi0, img0)
    p0_word = shape0.concatenation()
    if lcp_len <= len(p0_word):
        trimmed = _truncate_shape(shape0, lcp_len)
        if trimmed is None:
            return None
        return pi0, trimmed
    extra = pi0[len(p0_word) : lcp_len]
    if not _subword_of_phi_letter_inverse(extra, i, r):
        return None
    return pi0, PrefixShape(shape0.p1, shape0.t, shape0.k, shape0.pj + ((i, extra),), r)


def _truncate_shape(shape: PrefixShape, n: int) -> PrefixShape | None:
    """Cut a shape to its first n letters (prefixes of prefixes and subwords
    of subwords keep their provenance)."""
    p1 = shape.p1[:n]
    n -= len(p1)
    pj: list[tuple[int, Word]] = []
    for j, part in shape.pj:
        if n <= 0:
            break
        cut = part[:n]
        pj.append((j, cut))
        n -= len(cut)
    return PrefixShape(p1, shape.t, shape.k, tuple(pj), shape.power)

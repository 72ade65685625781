"""The iterated-HNN route to conjugacy, used as an independent cross-check.

H_m is an (m-1)-fold HNN tower over H_1 = <a_1, s> (a copy of Z^2): at stage
j the stable letter is t = a_{j+1}, the associated cyclic subgroups are <s>
and <beta> with beta = s a_j^-1, and t^-1 s t = beta.  Conjugacy is decided
by Britton pinch removal to cyclically reduced HNN form followed by the
cyclic-subgroup version of Collins' lemma: either neither side involves t
and the problem drops a level (or crosses between <s> and <beta>), or both
do and some cyclic permutations differ by a bounded power of s.

Two simplifying assumptions from the construction are asserted empirically
at desk scale by the test suite: distinct powers of beta are not conjugate,
and no power of s is conjugate to one of beta in the level below.
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import Word, EMPTY, S, concat, exp_sum, free_reduce, invert
from .automorphism import DEFAULT_BUDGET, apply_phi_power
from .group import HElem, check_conjugation, h_equal, normal_form
from .engine import Certificate

HNN = "HNN"


def beta_word(level: int, n: int) -> Word:
    """(s a_{level-1}^-1)^n as a mixed word."""
    unit = (S, -(level - 1)) if n >= 0 else (level - 1, -S)
    return unit * abs(n)


def _in_s_subgroup(word: Word, budget: int) -> int | None:
    nf = normal_form(word, budget)
    return nf.s_exp if not nf.u_tilde else None


def _in_beta_subgroup(word: Word, level: int, budget: int) -> int | None:
    n = exp_sum(word, S)
    if h_equal(normal_form(word, budget), normal_form(beta_word(level, n), budget)):
        return n
    return None


def _find_pinch(word: Word, level: int, budget: int) -> tuple[int, int, Word] | None:
    """Leftmost subword t^-1 c t (c in <s>) or t d t^-1 (d in <beta>) with a
    t-free interior; returns (start, end, replacement)."""
    t = level
    positions = [k for k, x in enumerate(word) if abs(x) == t]
    for a, b in zip(positions, positions[1:]):
        interior = word[a + 1 : b]
        if word[a] == -t and word[b] == t:
            n = _in_s_subgroup(interior, budget)
            if n is not None:
                return a, b + 1, beta_word(level, n)
        elif word[a] == t and word[b] == -t:
            n = _in_beta_subgroup(interior, level, budget)
            if n is not None:
                return a, b + 1, (S,) * n if n >= 0 else (-S,) * -n
    return None


def hnn_reduce(word: Word, level: int, budget: int = DEFAULT_BUDGET) -> tuple[Word, Word]:
    """Cyclically reduced HNN form at the given level.

    Returns (reduced, conj) with conj^-1 . word . conj = reduced in H (pinch
    removals are equalities; only the cyclic rotations conjugate).
    """
    from .words import cyclic_reduce

    cur = free_reduce(word)
    conj: Word = EMPTY
    while True:
        pinch = _find_pinch(cur, level, budget)
        if pinch is not None:
            a, b, repl = pinch
            cur = free_reduce(cur[:a] + repl + cur[b:])
            continue
        if not any(abs(x) == level for x in cur):
            break
        # stable letters remain: cyclically reduce and expose wrap pinches
        core, peel = cyclic_reduce(cur)
        if peel:
            conj = concat(conj, peel)
            cur = core
            continue
        if _find_pinch(free_reduce(cur + cur), level, budget) is not None:
            k = next(i for i, x in enumerate(cur) if abs(x) == level) + 1
            conj = concat(conj, cur[:k])
            cur = free_reduce(cur[k:] + cur[:k])
            continue
        break
    return cur, conj


def _is_pinch_free_squared(word: Word, level: int, budget: int) -> bool:
    return _find_pinch(free_reduce(word + word), level, budget) is None


def collins_decide(
    u_word,
    v_word,
    m: int,
    search_bound: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Certificate:
    """Decide conjugacy through the HNN tower; witnesses are verified."""
    u_in = free_reduce(u_word)
    v_in = free_reduce(v_word)
    if search_bound is None:
        search_bound = len(u_in) + len(v_in) + 2
    u = normal_form(u_in, budget)
    v = normal_form(v_in, budget)
    if u.s_exp != v.s_exp:
        return Certificate(False, None, HNN)
    found, witness, inconclusive = _decide_level(u_in, v_in, m, search_bound, budget)
    if found:
        assert witness is not None
        if not check_conjugation(u, normal_form(witness, budget), v, budget):
            raise AssertionError("HNN witness failed verification")
        return Certificate(True, witness, HNN, verified=True)
    return Certificate(False, None, HNN, inconclusive=inconclusive)


def _decide_level(
    u_word: Word, v_word: Word, level: int, bound: int, budget: int
) -> tuple[bool, Word | None, bool]:
    """(conjugate, witness, inconclusive) in H_level = <a_1..a_level, s>."""
    if level <= 1:
        # Z^2: conjugacy is equality of exponent vectors.
        nu, nv = normal_form(u_word, budget), normal_form(v_word, budget)
        if h_equal(nu, nv):
            return True, EMPTY, False
        return False, None, False

    U, cu = hnn_reduce(u_word, level, budget)
    V, cv = hnn_reduce(v_word, level, budget)
    u_has_t = any(abs(x) == level for x in U)
    v_has_t = any(abs(x) == level for x in V)

    if u_has_t != v_has_t:
        return False, None, False

    if not u_has_t:
        ok, w, inc = _decide_level(U, V, level - 1, bound, budget)
        if ok:
            return True, concat(cu, w, invert(cv)), False
        # cross case: one side conjugate into <s>, the other into <beta>
        n = exp_sum(U, S)
        if n == exp_sum(V, S):
            ok_u, w_u, inc_u = _decide_level(U, (S,) * n if n >= 0 else (-S,) * -n, level - 1, bound, budget)
            ok_v, w_v, inc_v = _decide_level(V, beta_word(level, n), level - 1, bound, budget)
            inc = inc or inc_u or inc_v
            if ok_u and ok_v:
                w = concat(cu, w_u, (level,), invert(w_v), invert(cv))
                return True, w, False
            ok_u2, w_u2, inc_u2 = _decide_level(U, beta_word(level, n), level - 1, bound, budget)
            ok_v2, w_v2, inc_v2 = _decide_level(V, (S,) * n if n >= 0 else (-S,) * -n, level - 1, bound, budget)
            inc = inc or inc_u2 or inc_v2
            if ok_u2 and ok_v2:
                w = concat(cu, w_u2, (-level,), invert(w_v2), invert(cv))
                return True, w, False
        return False, None, inc

    # Case (ii): both sides carry the stable letter.  Over cyclic
    # permutations starting at t-letters, compare normal forms up to a
    # bounded power of s (s^-q U' s^q = V' iff the a-parts differ by phi^q).
    v_forms: dict[Word, Word] = {}
    r_v = None
    for rot_v, c2 in _t_rotations(V, level):
        nf_v = normal_form(rot_v, budget)
        r_v = nf_v.s_exp
        v_forms.setdefault(nf_v.u_tilde, c2)
    any_candidate = False
    for rot_u, c1 in _t_rotations(U, level):
        nf_u = normal_form(rot_u, budget)
        if r_v is not None and nf_u.s_exp != r_v:
            continue
        any_candidate = True
        # s^-q U' s^q has a-part phi^q of U's a-part
        img = nf_u.u_tilde
        for q in range(0, bound + 1):
            if q:
                img = apply_phi_power(img, 1, budget)
            hit = v_forms.get(img)
            if hit is not None:
                w = concat(cu, c1, (S,) * q, invert(hit), invert(cv))
                return True, w, False
        img = nf_u.u_tilde
        for q in range(1, bound + 1):
            img = apply_phi_power(img, -1, budget)
            hit = v_forms.get(img)
            if hit is not None:
                w = concat(cu, c1, (-S,) * q, invert(hit), invert(cv))
                return True, w, False
    return False, None, any_candidate


def _t_rotations(word: Word, level: int):
    """Cyclic permutations starting at each stable-letter occurrence."""
    out = []
    for k, x in enumerate(word):
        if abs(x) == level:
            out.append((word[k:] + word[:k], word[:k]))
    return out

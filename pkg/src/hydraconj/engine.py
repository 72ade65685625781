"""Top-level conjugacy decision for H_m: normal forms, the three twisted
searches in order, conjugator linearization and compression, verification.

Steps: (1) convert to normal forms; unequal s-exponents are never conjugate
and negative ones are inverted away.  (2) p = 0 goes to the 0-twisted solver.
(3) p > 0 runs the exhaustive I-search.  (4) the H-search; X3 solutions with
a periodic middle are linearized, every witness is compressed, and every
positive certificate is re-verified before being emitted.
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import Word, EMPTY, S, free_reduce, invert
from .automorphism import DEFAULT_BUDGET
from .group import (
    HElem,
    check_conjugation,
    h_inv,
    normal_form,
    word_of_element,
)
from .twisted import (
    BoundPolicy,
    DEFAULT_POLICY,
    InternalCheckError,
    SolverOutcome,
    linearize_conjugator,
    compress_conjugator,
    solve_0_twisted,
    solve_h_twisted,
    solve_i_twisted,
)

UNEQUAL_S_EXP = "UNEQUAL_S_EXP"


@dataclass(frozen=True)
class Certificate:
    conjugate: bool
    witness: Word | None  # mixed word over a_i, s
    method: str | None
    inconclusive: bool = False
    verified: bool = False
    raw_witness: Word | None = None


def decide_conjugacy(
    u_word,
    v_word,
    m: int | None = None,
    policy: BoundPolicy = DEFAULT_POLICY,
    budget: int = DEFAULT_BUDGET,
    compress: bool = True,
) -> Certificate:
    """Decide whether two mixed words represent conjugate elements of H_m.

    The ambient rank m defaults to the largest generator present, but callers
    should pass the session rank: extra generators enlarge the conjugacy
    classes.
    """
    u_in = free_reduce(u_word)
    v_in = free_reduce(v_word)
    if m is None:
        m = max(
            (abs(x) for w in (u_in, v_in) for x in w if abs(x) != S), default=1
        )
    u = normal_form(u_in, budget)
    v = normal_form(v_in, budget)

    # Step 1: the s-exponent is a conjugacy invariant.
    if u.s_exp != v.s_exp:
        return Certificate(False, None, UNEQUAL_S_EXP)
    if u.s_exp < 0:
        u, v = h_inv(u, budget), h_inv(v, budget)
        u_in, v_in = word_of_element(u), word_of_element(v)
    p = u.s_exp

    if p == 0:
        outcome = solve_0_twisted(u.u_tilde, v.u_tilde, m, policy, budget)
        return _emit(outcome, u, v, u_in, v_in, p, policy, budget, compress)

    outcome = solve_i_twisted(u.u_tilde, v.u_tilde, p, m, policy, budget)
    if not outcome.found:
        h_outcome = solve_h_twisted(u.u_tilde, v.u_tilde, p, m, policy, budget)
        outcome = SolverOutcome(
            h_outcome.solution, outcome.inconclusive or h_outcome.inconclusive
        )
    return _emit(outcome, u, v, u_in, v_in, p, policy, budget, compress)


def _emit(
    outcome: SolverOutcome,
    u: HElem,
    v: HElem,
    u_in: Word,
    v_in: Word,
    p: int,
    policy: BoundPolicy,
    budget: int,
    compress: bool,
) -> Certificate:
    sol = outcome.solution
    if sol is None:
        return Certificate(False, None, None, inconclusive=outcome.inconclusive)

    raw = sol.w_tilde + _s_tail(sol.r)
    witness = raw
    chunk = sol.chunk
    if chunk is not None and chunk.tag == "X3" and chunk.q >= 1 and chunk.swap_valid:
        elem = linearize_conjugator(sol, u, v, p, budget)
        witness = word_of_element(elem)
    if compress:
        witness = compress_conjugator(witness, u, v, u_in, v_in, budget)
    if not check_conjugation(u, normal_form(witness, budget), v, budget):
        raise InternalCheckError("certificate witness failed verification")
    return Certificate(True, witness, sol.method, verified=True, raw_witness=raw)


def _s_tail(r: int) -> Word:
    return ((S,) if r >= 0 else (-S,)) * abs(r)

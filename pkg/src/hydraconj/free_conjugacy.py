"""Classical conjugacy in the free group: decision, canonical witness, roots.

Two reduced words are conjugate iff their cyclic cores agree up to rotation.
The witness returned for u ~ v satisfies u w = w v and is assembled from the
two peeled halves plus the rotation offset, which makes it a concatenation of
a prefix of u^-1 with a suffix of v.
"""

from __future__ import annotations

from .words import Word, EMPTY, concat, cyclic_reduce, invert


def conjugate_in_f(u: Word, v: Word) -> Word | None:
    """A word w with u w = w v in F, or None when u and v are not conjugate.

    Ties between matching rotations break towards the smallest offset, so the
    witness is deterministic.
    """
    cu, y = cyclic_reduce(u)
    cv, z = cyclic_reduce(v)
    if len(cu) != len(cv):
        return None
    if not cu:
        return EMPTY
    n = len(cu)
    doubled = cu + cu
    for r in range(n):
        if doubled[r : r + n] == cv:
            # rot_r(cu) = cv, and conjugating cu by the inverse of its
            # length-(n-r) suffix realizes the rotation, which keeps the
            # witness a prefix of u^-1 followed by a suffix of v.  Rotation
            # zero needs no core letters at all.
            middle = EMPTY if r == 0 else invert(cu[r:])
            return concat(y, middle, invert(z))
    return None


def are_conjugate_in_f(u: Word, v: Word) -> bool:
    return conjugate_in_f(u, v) is not None


def max_root(u: Word) -> tuple[Word, int]:
    """(u0, k) with u0^k = u, k maximal; u0 generates the centralizer of u."""
    if not u:
        raise ValueError("the empty word has no root structure")
    core, y = cyclic_reduce(u)
    n = len(core)
    best_k = 1
    for k in range(n, 1, -1):
        if n % k:
            continue
        period = n // k
        if core == core[:period] * k:
            best_k = k
            break
    root_core = core[: n // best_k]
    root = concat(y, root_core, invert(y))
    return root, best_k


def conjugator_family(u: Word, w: Word) -> tuple[Word, Word]:
    """All solutions W of u W = W v form {u0^l . w}; returns (u0, w)."""
    root, _ = max_root(u)
    return root, w

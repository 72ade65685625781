"""Twisted-conjugacy solvers over F: the engine room of conjugacy in H.

Conjugacy of u~ s^p and v~ s^p reduces to finding r and w~ with

    u~ . phi^-p(w~)  =  w~ . phi^-r(v~)      in F.

Three solvers cover the cases: p = 0 (cyclic reduction plus a bounded scan
over r), p > 0 with w~ a prefix-by-prefix product (exhaustive I-search), and
the general p > 0 case (H-search).  The H-search layers, per r and in a fixed
deterministic order:

  * an abelianization gate - (M(phi^-p) - I) x = ab-defect pins ab(X) up to
    its a_1 coordinate, and unsolvability refutes every candidate form at
    once (a sound "not conjugate" certificate);
  * a bounded bidirectional state search over single-letter twisted
    conjugations (catches every witness within the policy radius);
  * per-split candidate forms: rank-1 intertwiners (X1), subwords of the
    phi^-p images of the split halves (X2), periodic middles
    pi phi^p(pi)...phi^{p(q-1)}(pi) with flanks (X3), and memoized
    lower-rank sub-instances reassembled as L X^ R (X4);
  * a length-descent normalization of both sides followed by a second state
    search, which is what finds the long transported witnesses of randomly
    constructed conjugate pairs.

Every candidate is verified by substitution before being returned; negative
answers are certificates only relative to the policy bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .words import (
    Word,
    EMPTY,
    WordError,
    abelianization,
    common_prefix_len,
    concat,
    invert,
)
from .automorphism import BudgetError, DEFAULT_BUDGET, apply_phi_power
from .free_conjugacy import conjugate_in_f
from .pieces import rank

ZERO = "ZERO"
I_CONFIG = "I_CONFIG"
H_CONFIG = "H_CONFIG"


@dataclass(frozen=True)
class BoundPolicy:
    """Surrogates for the existential constants in the candidate bounds."""

    k_multiplier: float = 1.0
    r_slack: int = 2
    qp_multiplier: float = 1.0
    hard_cap: int | None = None

    def zip_radius(self) -> int:
        return 6 + max(0, self.r_slack - 2)

    def state_cap(self) -> int:
        if self.hard_cap is not None:
            return max(64, self.hard_cap)
        return 60_000


DEFAULT_POLICY = BoundPolicy()


@dataclass(frozen=True)
class ChunkForm:
    tag: str  # X1 | X2 | X3 | X4
    left: Word = EMPTY
    shared: Word = EMPTY  # S-part
    m1: Word = EMPTY
    m2: Word = EMPTY
    prefix_part: Word = EMPTY  # P-part
    right: Word = EMPTY
    q: int = 0
    pi: Word = EMPTY
    e_negative: bool = False
    swap_valid: bool = False


@dataclass(frozen=True)
class SplitData:
    u0: Word
    u1: Word
    v0: Word
    v1: Word
    x: Word


@dataclass(frozen=True)
class TwistedSolution:
    r: int
    w_tilde: Word
    method: str
    split: SplitData | None = None
    chunk: ChunkForm | None = None
    r_family: bool = False  # every r admits a solution (phi-fixed core)


@dataclass(frozen=True)
class SolverOutcome:
    solution: TwistedSolution | None
    inconclusive: bool = False

    @property
    def found(self) -> bool:
        return self.solution is not None


class _CapHit(Exception):
    pass


class _Budget:
    __slots__ = ("left",)

    def __init__(self, cap: int | None):
        self.left = cap

    def spend(self, n: int = 1) -> None:
        if self.left is None:
            return
        self.left -= n
        if self.left < 0:
            raise _CapHit


# ---------------------------------------------------------------------------
# Abelianization machinery.
# ---------------------------------------------------------------------------


def _phi_pow_ab_column(i: int, p: int, m: int) -> tuple[int, ...]:
    """ab(phi^p(a_i)) as a length-m vector; entry j is C(p, i-j) for j <= i."""
    return tuple(comb(p, i - j) if 0 <= i - j else 0 for j in range(1, m + 1)) if p >= 0 else tuple(
        (-1) ** (i - j) * comb(-p + (i - j) - 1, i - j) if j <= i else 0 for j in range(1, m + 1)
    )


def ab_image(vec: tuple[int, ...], p: int) -> tuple[int, ...]:
    """Abelianization of phi^p applied to a vector."""
    m = len(vec)
    out = [0] * m
    for i in range(1, m + 1):
        if vec[i - 1]:
            col = _phi_pow_ab_column(i, p, m)
            for j in range(m):
                out[j] += vec[i - 1] * col[j]
    return tuple(out)


def ab_pin(defect: tuple[int, ...], p: int) -> tuple[int, ...] | None:
    """Solve (M(phi^-p) - I) x = defect for x_2..x_m over the integers.

    Returns the pinned coordinates (x_2, .., x_m) or None when no integer
    solution exists; x_1 is always free.
    """
    m = len(defect)
    if defect[m - 1] != 0:
        return None
    coeff = [_phi_pow_ab_column(i, -p, m) for i in range(1, m + 1)]
    x = [0] * (m + 1)  # 1-indexed, x[1] unused/free
    for j in range(m - 1, 0, -1):
        acc = defect[j - 1]
        for i in range(j + 1, m + 1):
            acc -= coeff[i - 1][j - 1] * x[i]
        lead = coeff[j][j - 1]  # coefficient of x_{j+1} in row j: C(-p, 1) = -p
        if acc % lead:
            return None
        x[j + 1] = acc // lead
    return tuple(x[2:])


def _pinned(vec: tuple[int, ...]) -> tuple[int, ...]:
    return vec[1:]


# ---------------------------------------------------------------------------
# The 0-twisted solver.
# ---------------------------------------------------------------------------


def _piece_aligned_rotation(w: Word) -> tuple[Word, Word]:
    """Rotate a cyclically reduced word so its doubled piece decomposition is
    two copies of its own; returns (rotated, conjugating prefix)."""
    if not w:
        return w, EMPTY
    i = rank(w)
    offset = next((k for k, x in enumerate(w) if x == i), None)
    if offset is None:
        offset = (next(k for k, x in enumerate(w) if x == -i) + 1) % len(w)
    rotated = w[offset:] + w[:offset]
    return rotated, w[:offset]


def solve_0_twisted(
    u_t: Word,
    v_t: Word,
    m: int | None = None,
    policy: BoundPolicy = DEFAULT_POLICY,
    budget: int = DEFAULT_BUDGET,
) -> SolverOutcome:
    """Find (r, w~) with u~ w~ = w~ phi^-r(v~) in F, scanning |r| up to
    len(u') + len(v') + r_slack over the cyclic cores."""
    if u_t == v_t:
        return SolverOutcome(TwistedSolution(0, EMPTY, ZERO))
    cu, y0 = _cyclic_data(u_t)
    cv, z0 = _cyclic_data(v_t)
    u_core, cy = _piece_aligned_rotation(cu)
    v_core, cz = _piece_aligned_rotation(cv)
    y = concat(y0, cy)
    z = concat(z0, cz)
    if not u_core or not v_core:
        if not u_core and not v_core:
            w = conjugate_in_f(u_t, v_t)
            assert w is not None
            return SolverOutcome(TwistedSolution(0, w, ZERO))
        return SolverOutcome(None)

    if apply_phi_power(v_core, 1, budget) == v_core:
        # phi-fixed core: phi^-r(v~) stays conjugate to v~ for every r, so the
        # problem collapses to plain free conjugacy; report r = 0.
        w = conjugate_in_f(u_t, v_t)
        if w is None:
            return SolverOutcome(None)
        return SolverOutcome(TwistedSolution(0, w, ZERO, r_family=True))

    w = conjugate_in_f(u_t, v_t)
    if w is not None:
        return SolverOutcome(TwistedSolution(0, w, ZERO))

    if m is None:
        m = max(rank(u_t), rank(v_t), 1)
    ab_u = abelianization(u_t, m)
    ab_v = abelianization(v_t, m)
    r_max = len(u_core) + len(v_core) + policy.r_slack
    target_len = len(u_core)
    img_pos = v_core  # phi^-r(v_core) for the current positive r
    img_neg = v_core
    for step in range(1, r_max + 1):
        for r in (step, -step):
            if r > 0:
                img_pos = apply_phi_power(img_pos, -1, budget)
                img = img_pos
            else:
                img_neg = apply_phi_power(img_neg, 1, budget)
                img = img_neg
            if len(img) != target_len:
                continue
            if ab_image(ab_v, -r) != ab_u:
                continue
            w2 = conjugate_in_f(u_core, img)
            if w2 is None:
                continue
            w_full = concat(y, w2, apply_phi_power(invert(z), -r, budget))
            if concat(u_t, w_full) == concat(w_full, apply_phi_power(v_t, -r, budget)):
                return SolverOutcome(TwistedSolution(r, w_full, ZERO))
    return SolverOutcome(None)


def _cyclic_data(w: Word) -> tuple[Word, Word]:
    from .words import cyclic_reduce

    return cyclic_reduce(w)


# ---------------------------------------------------------------------------
# The I-twisted solver.
# ---------------------------------------------------------------------------


def solve_i_twisted(
    u_t: Word,
    v_t: Word,
    p: int,
    m: int | None = None,
    policy: BoundPolicy = DEFAULT_POLICY,
    budget: int = DEFAULT_BUDGET,
) -> SolverOutcome:
    """Exhaustive search over w~ = U V with U a prefix of u~ and V^-1 a
    prefix of phi^-r(v~); first hit in (r, len U, len V) order wins."""
    if p <= 0:
        raise WordError("the I-twisted search needs p > 0")
    if m is None:
        m = max(rank(u_t), rank(v_t), 1)
    ab_u = abelianization(u_t, m)
    for r in range(p):
        v_r = apply_phi_power(v_t, -r, budget)
        pin = ab_pin(_sub(abelianization(v_r, m), ab_u), p)
        if pin is None:
            continue
        # ab(w~) is pinned in coordinates 2..m; prefix sums filter the pairs.
        pre_u = _prefix_abs(u_t, m)
        pre_v = _prefix_abs(v_r, m)
        by_vpin: dict[tuple[int, ...], list[int]] = {}
        for j in range(len(v_r) + 1):
            by_vpin.setdefault(_pinned(pre_v[j]), []).append(j)
        for i in range(len(u_t) + 1):
            want = _sub(_pinned(pre_u[i]), pin)
            for j in by_vpin.get(want, ()):
                w = concat(u_t[:i], invert(v_r[:j]))
                lhs = concat(u_t, apply_phi_power(w, -p, budget))
                if lhs == concat(w, v_r):
                    return SolverOutcome(
                        TwistedSolution(
                            r, w, I_CONFIG, split=SplitData(u_t[:i], u_t[i:], v_r[:j], v_r[j:], EMPTY)
                        )
                    )
    return SolverOutcome(None)


def _prefix_abs(w: Word, m: int) -> list[tuple[int, ...]]:
    out = [(0,) * m]
    cur = [0] * m
    for x in w:
        cur[abs(x) - 1] += 1 if x > 0 else -1
        out.append(tuple(cur))
    return out


def _sub(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x - y for x, y in zip(a, b))


def _add(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# The H-twisted solver.
# ---------------------------------------------------------------------------


class _HSearch:
    def __init__(self, u_t: Word, v_t: Word, p: int, m: int, policy: BoundPolicy, budget: int):
        self.u_t = u_t
        self.v_t = v_t
        self.p = p
        self.policy = policy
        self.budget = budget
        self.m = m
        self.cap = _Budget(policy.hard_cap)
        self.truncated = False
        self.psi: dict[int, Word] = {}
        for i in range(1, self.m + 1):
            self.psi[i] = apply_phi_power((i,), -p, budget)
            self.psi[-i] = invert(self.psi[i])
        self.letters = [x for i in range(1, self.m + 1) for x in (i, -i)]
        self.memo: dict[tuple[Word, Word, Word, Word], Word | None] = {}

    # -- elementary operations ------------------------------------------------

    def step(self, state: Word, x: int) -> Word:
        """reduce(x^-1 . state . psi(x)) for a single letter x."""
        out = list(state)
        if out and out[0] == x:
            out = out[1:]
        else:
            out = [-x] + out
        for y in self.psi[x]:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
        return tuple(out)

    def unstep(self, state: Word, x: int) -> Word:
        """Inverse of step: reduce(x . state . psi(x)^-1)."""
        out = [x] + list(state) if not state or state[0] != -x else list(state[1:])
        for y in invert(self.psi[x]):
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
        return tuple(out)

    def verify(self, X: Word, g: Word, h: Word) -> bool:
        self.cap.spend()
        return concat(g, apply_phi_power(X, -self.p, self.budget)) == concat(X, h)

    def verify_w(self, w: Word, v_r: Word) -> bool:
        self.cap.spend()
        return concat(self.u_t, apply_phi_power(w, -self.p, self.budget)) == concat(w, v_r)

    # -- the bidirectional state search ---------------------------------------

    def meet_search(
        self, start: Word, target: Word, radius: int, state_cap: int
    ) -> Word | None:
        """Shortest nonempty w~ with reduce(w^-1 . start . psi(w)) = target,
        radius-capped; sets self.truncated when the ball was not exhausted."""
        f_rad = (radius + 1) // 2
        b_rad = radius // 2
        fwd: dict[Word, Word] = {start: EMPTY}
        bwd: dict[Word, Word] = {target: EMPTY}
        f_frontier = [start]
        b_frontier = [target]
        for depth in range(1, radius + 1):
            expand_fwd = depth % 2 == 1
            if expand_fwd and len(fwd) > state_cap:
                expand_fwd = False
            if not expand_fwd and len(bwd) > state_cap:
                expand_fwd = True
                if len(fwd) > state_cap:
                    self.truncated = True
                    return None
            if expand_fwd:
                nxt = []
                for st in f_frontier:
                    path = fwd[st]
                    for x in self.letters:
                        self.cap.spend()
                        ns = self.step(st, x)
                        if ns in fwd:
                            continue
                        np = path + (x,)
                        fwd[ns] = np
                        bp = bwd.get(ns)
                        if bp is not None:
                            return concat(np, bp)
                        nxt.append(ns)
                f_frontier = nxt
            else:
                nxt = []
                for st in b_frontier:
                    path = bwd[st]
                    for x in self.letters:
                        self.cap.spend()
                        ns = self.unstep(st, x)
                        if ns in bwd:
                            continue
                        np = (x,) + path
                        bwd[ns] = np
                        fp = fwd.get(ns)
                        if fp is not None:
                            return concat(fp, np)
                        nxt.append(ns)
                b_frontier = nxt
            if not f_frontier and not b_frontier:
                return None
        return None

    # -- guided search over mixed conjugating letters ---------------------------
    #
    # Conjugating u~ s^p by an a-letter twists the a-part by phi^-p of the
    # letter; conjugating by s^-+1 applies phi^+-1 wholesale.  In this move
    # alphabet a transported witness w~ s^r costs only about as many moves as
    # the mixed word w that produced it, so a best-first bidirectional search
    # reaches witnesses far beyond the letterwise radius.

    def mixed_step(self, state: Word, x: int) -> Word:
        from .words import S as S_LETTER

        if x == S_LETTER:
            return apply_phi_power(state, 1, self.budget)
        if x == -S_LETTER:
            return apply_phi_power(state, -1, self.budget)
        return self.step(state, x)

    def mixed_unstep(self, state: Word, x: int) -> Word:
        from .words import S as S_LETTER

        if x == S_LETTER:
            return apply_phi_power(state, -1, self.budget)
        if x == -S_LETTER:
            return apply_phi_power(state, 1, self.budget)
        return self.unstep(state, x)

    def guided_meet(self, start: Word, target: Word, pop_cap: int, len_cap: int) -> Word | None:
        """Best-first bidirectional search for a mixed conjugator; prefers
        short states, which follows cancellation valleys.  Sets truncated
        when it gives up with unexplored frontier."""
        import heapq
        from .words import S as S_LETTER

        alphabet = self.letters + [S_LETTER, -S_LETTER]
        fwd: dict[Word, Word] = {start: EMPTY}
        bwd: dict[Word, Word] = {target: EMPTY}
        if start == target:
            return None
        seq = 0
        heap_f: list = [(len(start), 0, start)]
        heap_b: list = [(len(target), 1, target)]
        pops = 0
        while (heap_f or heap_b) and pops < pop_cap:
            use_fwd = bool(heap_f) and (not heap_b or len(fwd) <= len(bwd))
            heap = heap_f if use_fwd else heap_b
            here, there = (fwd, bwd) if use_fwd else (bwd, fwd)
            _, _, state = heapq.heappop(heap)
            pops += 1
            path = here[state]
            for x in alphabet:
                self.cap.spend()
                try:
                    ns = self.mixed_step(state, x) if use_fwd else self.mixed_unstep(state, x)
                except BudgetError:
                    continue
                if len(ns) > len_cap or ns in here:
                    continue
                np = path + (x,) if use_fwd else (x,) + path
                here[ns] = np
                other = there.get(ns)
                if other is not None:
                    w = concat(np, other) if use_fwd else concat(other, np)
                    if w:
                        return w
                seq += 1
                heapq.heappush(heap, (len(ns), seq, ns))
        if heap_f or heap_b:
            self.truncated = True
        return None

    # -- candidate forms --------------------------------------------------------

    def x1_scan(self, g: Word, h: Word) -> Word | None:
        """Rank-1 intertwiners: X = a_1^c with g a_1^c = a_1^c h."""
        if not g and not h:
            return None  # degenerate split; identity conjugacy is I's job
        window = (len(g) + len(h)) // 2 + 1
        state = g
        for c in range(1, window + 1):
            self.cap.spend()
            state = concat((-1,), state, (1,))
            if state == h:
                return (1,) * c
        state = g
        for c in range(1, window + 1):
            self.cap.spend()
            state = concat((1,), state, (-1,))
            if state == h:
                return (-1,) * c
        return None

    def subword_dict(self, material: Word) -> dict[tuple[int, ...], list[Word]]:
        """Nonempty subwords keyed by pinned ab coordinates, canonical order."""
        table: dict[tuple[int, ...], list[Word]] = {}
        pre = _prefix_abs(material, self.m)
        n = len(material)
        for i in range(n):
            for j in range(i + 1, n + 1):
                self.cap.spend()
                key = _pinned(_sub(pre[j], pre[i]))
                table.setdefault(key, []).append(material[i:j])
        return table


def solve_h_twisted(
    u_t: Word,
    v_t: Word,
    p: int,
    m: int | None = None,
    policy: BoundPolicy = DEFAULT_POLICY,
    budget: int = DEFAULT_BUDGET,
) -> SolverOutcome:
    """The general p > 0 search; m is the ambient rank of H_m (conjugacy in
    H_m is genuinely coarser than in H_k for k < m, so it matters)."""
    if p <= 0:
        raise WordError("the H-twisted search needs p > 0")
    if not u_t and not v_t:
        return SolverOutcome(None)
    if m is None:
        m = max(rank(u_t), rank(v_t), 1)
    search = _HSearch(u_t, v_t, p, m, policy, budget)
    try:
        return _solve_h(search)
    except _CapHit:
        return SolverOutcome(None, inconclusive=True)


def _solve_h(S: "_HSearch") -> SolverOutcome:
    u_t, v_t, p, m = S.u_t, S.v_t, S.p, S.m
    policy = S.policy
    ab_u = abelianization(u_t, m)
    radius = policy.zip_radius()
    feasible_r = []
    for r in range(p):
        v_r = apply_phi_power(v_t, -r, S.budget)
        if ab_pin(_sub(abelianization(v_r, m), ab_u), p) is not None:
            feasible_r.append((r, v_r))
    if not feasible_r:
        return SolverOutcome(None)

    # Stage 1: short witnesses, split-free; exhaustive up to the policy radius.
    for r, v_r in feasible_r:
        w = S.meet_search(u_t, v_r, radius, policy.state_cap())
        if w and S.verify_w(w, v_r):
            return SolverOutcome(_classify(S, r, v_r, w))

    # Tiny instances are settled by the radius-complete stage 1: every
    # witness within the policy radius was tried.
    size = len(u_t) + len(v_t) + p
    if size <= 8:
        return SolverOutcome(None, inconclusive=S.truncated)

    # Stage 2: best-first search over mixed conjugating moves (s applies phi
    # wholesale), which reaches the long transported witnesses of randomly
    # constructed pairs; the resulting s-exponent is normalized into [0, p).
    len_cap = 2 * (len(u_t) + len(v_t)) + 8 * m + 16
    w_mixed = S.guided_meet(u_t, v_t, policy.state_cap() // 2, len_cap)
    if w_mixed is not None:
        sol = _normalize_mixed_witness(S, w_mixed)
        if sol is not None:
            return SolverOutcome(sol)

    # Stage 3: the structured candidate forms, per split (desk-scale only).
    if len(u_t) + max(len(v) for _, v in feasible_r) <= 96:
        for r, v_r in feasible_r:
            sol = _form_stage(S, r, v_r)
            if sol is not None:
                return SolverOutcome(sol)
    else:
        S.truncated = True

    return SolverOutcome(None, inconclusive=S.truncated)


def _normalize_mixed_witness(S: "_HSearch", w_mixed: Word) -> TwistedSolution | None:
    """Turn a mixed conjugator into (r, w~) with r in [0, p), multiplying by
    a power of u = u~ s^p on the left as needed, then verify and classify."""
    from .group import HElem, h_mul, h_inv, normal_form

    p = S.p
    elem = normal_form(w_mixed, S.budget)
    j = elem.s_exp // p if elem.s_exp >= 0 else -((-elem.s_exp + p - 1) // p)
    u_elem = HElem(S.u_t, p)
    shift = HElem(EMPTY, 0)
    if j > 0:
        for _ in range(j):
            shift = h_mul(shift, h_inv(u_elem, S.budget), S.budget)
    elif j < 0:
        for _ in range(-j):
            shift = h_mul(shift, u_elem, S.budget)
    adjusted = h_mul(shift, elem, S.budget)
    r, w_tilde = adjusted.s_exp, adjusted.u_tilde
    if not 0 <= r < p:
        return None
    v_r = apply_phi_power(S.v_t, -r, S.budget)
    if not w_tilde or not S.verify_w(w_tilde, v_r):
        return None
    return _classify(S, r, v_r, w_tilde)


def _classify(S: "_HSearch", r: int, v_r: Word, w: Word) -> TwistedSolution:
    """Attach the H-configuration split and a chunk tag to a verified witness."""
    u_t, p = S.u_t, S.p
    u0_len = common_prefix_len(w, u_t)
    # v0 is the longest prefix of v_r whose inverse is a suffix of w
    v0_len = 0
    wi = invert(w)
    while (
        v0_len < min(len(v_r), len(wi))
        and wi[v0_len] == v_r[v0_len]
        and v0_len + u0_len < len(w)
    ):
        v0_len += 1
    u0, u1 = u_t[:u0_len], u_t[u0_len:]
    v0, v1 = v_r[:v0_len], v_r[v0_len:]
    x = w[u0_len : len(w) - v0_len]
    chunk = _chunk_tag(S, x)
    sol = TwistedSolution(r, w, H_CONFIG, split=SplitData(u0, u1, v0, v1, x), chunk=chunk)
    if chunk.tag == "X3" and chunk.q >= 1:
        sol = _with_swap_validity(S, sol)
    return sol


def _with_swap_validity(S: "_HSearch", sol: TwistedSolution) -> TwistedSolution:
    from dataclasses import replace
    from .group import HElem, check_conjugation, normal_form

    word = swapped_conjugator_word(sol, S.p)
    ok = False
    if word is not None:
        u = HElem(S.u_t, S.p)
        v = HElem(S.v_t, S.p)
        ok = check_conjugation(u, normal_form(word, S.budget), v, S.budget)
    return replace(sol, chunk=replace(sol.chunk, swap_valid=ok))


def _chunk_tag(S: "_HSearch", x: Word) -> ChunkForm:
    if rank(x) <= 1:
        return ChunkForm("X1")
    parsed = _parse_periodic(S, x)
    if parsed is not None:
        return parsed
    return ChunkForm("X2")


def _parse_periodic(S: "_HSearch", x: Word) -> ChunkForm | None:
    """Detect a middle of the shape pi phi^p(pi) ... phi^{p(q-1)}(pi), q >= 2."""
    n = len(x)
    if n > 48:
        return None
    p = S.p
    for start in range(n):
        for plen in range(1, (n - start) // 2 + 1):
            pi = x[start : start + plen]
            q = 1
            pos = start + plen
            cur = pi
            while pos < n:
                nxt = apply_phi_power(cur, p, S.budget)
                if x[pos : pos + len(nxt)] != nxt:
                    break
                pos += len(nxt)
                cur = nxt
                q += 1
            if q >= 2:
                return ChunkForm(
                    "X3",
                    left=x[:start],
                    m1=x[start:pos],
                    right=x[pos:],
                    q=q,
                    pi=pi,
                )
    return None


def _form_stage(S: "_HSearch", r: int, v_r: Word) -> TwistedSolution | None:
    """Per-split X1/X2/X3/X4 candidates, in canonical order with ab pinning."""
    u_t, p, m = S.u_t, S.p, S.m
    policy = S.policy
    ab_u = abelianization(u_t, m)
    ab_vr = abelianization(v_r, m)
    pin0 = ab_pin(_sub(ab_vr, ab_u), p)
    if pin0 is None:
        return None
    pre_u = _prefix_abs(u_t, m)
    pre_v = _prefix_abs(v_r, m)

    material_cap = 64
    fu_list: list[Word] = [EMPTY]
    for x in u_t:
        fu_list.append(concat(fu_list[-1], S.psi[x]))
    fv_list: list[Word] = [EMPTY]
    for x in v_r:
        fv_list.append(concat(fv_list[-1], S.psi[x]))

    u_dicts: dict[int, dict] = {}
    v_dicts: dict[int, dict] = {}

    for ku in range(len(u_t) + 1):
        u0, u1 = u_t[:ku], u_t[ku:]
        fu0 = fu_list[ku]
        g = concat(u1, fu0)
        for kv in range(len(v_r) + 1):
            v0, v1 = v_r[:kv], v_r[kv:]
            fv0 = fv_list[kv]
            h = concat(v1, fv0)
            if not g and not h:
                continue
            # pinned ab(X) for this split
            pin = _add(pin0, _sub(_pinned(pre_v[kv]), _pinned(pre_u[ku])))

            # X1: rank-1 intertwiner scan (complete for rank-1 X).
            if all(c == 0 for c in pin):
                X = S.x1_scan(g, h)
                if X is not None:
                    w = concat(u0, X, invert(v0))
                    if w and S.verify_w(w, v_r):
                        return TwistedSolution(
                            r, w, H_CONFIG,
                            split=SplitData(u0, u1, v0, v1, X),
                            chunk=ChunkForm("X1"),
                        )

            # X2: subwords of the split-half images.
            if 0 < len(fu0) <= material_cap:
                table = u_dicts.get(ku)
                if table is None:
                    table = S.subword_dict(fu0)
                    u_dicts[ku] = table
                for X in table.get(pin, ()):
                    if S.verify(X, g, h):
                        w = concat(u0, X, invert(v0))
                        if w and S.verify_w(w, v_r):
                            return TwistedSolution(
                                r, w, H_CONFIG,
                                split=SplitData(u0, u1, v0, v1, X),
                                chunk=ChunkForm("X2"),
                            )
            if 0 < len(fv0) <= material_cap:
                table = v_dicts.get(kv)
                if table is None:
                    table = S.subword_dict(invert(fv0))
                    v_dicts[kv] = table
                for X in table.get(pin, ()):
                    if S.verify(X, g, h):
                        w = concat(u0, X, invert(v0))
                        if w and S.verify_w(w, v_r):
                            return TwistedSolution(
                                r, w, H_CONFIG,
                                split=SplitData(u0, u1, v0, v1, X),
                                chunk=ChunkForm("X2"),
                            )

            # X3: periodic pump with flanks.
            sol = _pump_stage(S, r, v_r, u0, u1, v0, v1, g, h, fu0, fv0, pin)
            if sol is not None:
                return sol

            # X4: lower-rank sub-instances, memoized, reassembled as L X^ R.
            sol = _x4_stage(S, r, v_r, u0, u1, v0, v1, g, h, fu0, fv0, pin)
            if sol is not None:
                return sol
    return None


def _pump_stage(
    S: "_HSearch",
    r: int,
    v_r: Word,
    u0: Word,
    u1: Word,
    v0: Word,
    v1: Word,
    g: Word,
    h: Word,
    fu0: Word,
    fv0: Word,
    pin: tuple[int, ...],
) -> TwistedSolution | None:
    p, m = S.p, S.m
    sigma = len(u0) + len(u1) + len(v0) + len(v1) + p
    qp_bound = int(S.policy.qp_multiplier * sigma)
    if qp_bound < 2 * p:
        return None
    pi_cap = m + p + 2
    pi_seen: set[Word] = set()
    pi_candidates: list[Word] = []
    for source, power in ((invert(g), p), (invert(h), p)):
        for ln in range(1, min(pi_cap, len(source)) + 1):
            for seg in (source[-ln:], source[:ln]):
                self_img = apply_phi_power(seg, power, S.budget)
                for pi in (self_img, seg):
                    if pi and pi not in pi_seen:
                        pi_seen.add(pi)
                        pi_candidates.append(pi)
    flanks_l = [EMPTY] + [fu0[i:] for i in range(len(fu0))]
    inv_fv0 = invert(fv0)
    flanks_r = [(EMPTY, (0,) * (m - 1))] + [
        (inv_fv0[: j + 1], _pinned(abelianization(inv_fv0[: j + 1], m)))
        for j in range(len(fv0))
    ]
    fl_by_pin: dict[tuple[int, ...], list[Word]] = {}
    for fl in flanks_l:
        fl_by_pin.setdefault(_pinned(abelianization(fl, m)), []).append(fl)
    m1_cap = max(48, 2 * (len(g) + len(h)) + 8 * p)
    for pi in pi_candidates:
        ab_pi = abelianization(pi, m)
        m1 = pi
        cur = pi
        ab_m1 = ab_pi
        q = 1
        while (q + 1) * p <= qp_bound and len(m1) <= m1_cap:
            nxt = apply_phi_power(cur, p, S.budget)
            if m1 and nxt and m1[-1] == -nxt[0]:
                break  # middle would cancel: pi is not piece-shaped here
            if len(m1) + len(nxt) > m1_cap:
                break
            cur = nxt
            m1 = m1 + cur
            ab_m1 = _add(ab_m1, abelianization(cur, m))
            q += 1
            if q < 2:
                continue
            pin_minus_m1 = _sub(pin, _pinned(ab_m1))
            for fr, fr_pin in flanks_r:
                want = _sub(pin_minus_m1, fr_pin)
                for fl in fl_by_pin.get(want, ()):
                    X = concat(fl, m1, fr)
                    if not X:
                        continue
                    if S.verify(X, g, h):
                        w = concat(u0, X, invert(v0))
                        if w and S.verify_w(w, v_r):
                            chunk = ChunkForm(
                                "X3", left=fl, m1=m1, right=fr, q=q, pi=pi
                            )
                            sol = TwistedSolution(
                                r, w, H_CONFIG,
                                split=SplitData(u0, u1, v0, v1, X),
                                chunk=chunk,
                            )
                            return _with_swap_validity(S, sol)
    return None


def _x4_stage(
    S: "_HSearch",
    r: int,
    v_r: Word,
    u0: Word,
    u1: Word,
    v0: Word,
    v1: Word,
    g: Word,
    h: Word,
    fu0: Word,
    fv0: Word,
    pin: tuple[int, ...],
) -> TwistedSolution | None:
    # Only worthwhile when genuinely nested ranks are in play, and only on
    # small material; the sub-instance solves are memoized search-wide.
    if not fu0 or not fv0 or len(fu0) > 12 or len(fv0) > 12:
        return None
    if rank(fu0) < 3 and rank(fv0) < 3:
        return None
    m, p = S.m, S.p
    sub_cap = 2 * m + p
    u_tuples = _sub_split_tuples(fu0, sub_cap, 24)
    v_tuples = _sub_split_tuples(fv0, sub_cap, 24)
    for o_u, cut_abs_u, hu0, hu1 in u_tuples:
        for o_v, cut_abs_v, hv0, hv1 in v_tuples:
            X_hat = _solve_sub(S, hu0, hu1, hv0, hv1)
            if X_hat is None:
                continue
            L = fu0[:cut_abs_u]
            R = invert(fv0)[len(fv0) - cut_abs_v :]
            X = concat(L, X_hat, R)
            if X and S.verify(X, g, h):
                w = concat(u0, X, invert(v0))
                if w and S.verify_w(w, v_r):
                    return TwistedSolution(
                        r, w, H_CONFIG,
                        split=SplitData(u0, u1, v0, v1, X),
                        chunk=ChunkForm("X4", left=L, right=R),
                    )
    return None


def _sub_split_tuples(material: Word, max_len: int, cap: int) -> list[tuple[int, int, Word, Word]]:
    """(offset, absolute cut, half0, half1) for short subwords, shortest first."""
    out: list[tuple[int, int, Word, Word]] = []
    for l in range(1, min(max_len, len(material)) + 1):
        for o in range(len(material) - l + 1):
            W = material[o : o + l]
            for cut in range(l + 1):
                out.append((o, o + cut, W[:cut], W[cut:]))
                if len(out) >= cap:
                    return out
    return out


def _solve_sub(S: "_HSearch", hu0: Word, hu1: Word, hv0: Word, hv1: Word) -> Word | None:
    """Solve the fixed-split sub-instance phi^-p(hu0 X hv0^-1) = hu1^-1 X hv1."""
    key = (hu0, hu1, hv0, hv1)
    if key in S.memo:
        return S.memo[key]
    g = concat(hu1, apply_phi_power(hu0, -S.p, S.budget))
    h = concat(hv1, apply_phi_power(hv0, -S.p, S.budget))
    out: Word | None = None
    if g or h:
        out = S.x1_scan(g, h)
        if out is None:
            pin = ab_pin(_sub(abelianization(h, S.m), abelianization(g, S.m)), S.p)
            if pin is not None:
                w = S.meet_search(g, h, 4, 2000)
                if w is not None and S.verify(w, g, h):
                    out = w
    S.memo[key] = out
    return out


# ---------------------------------------------------------------------------
# Conjugator post-processing.
# ---------------------------------------------------------------------------


class InternalCheckError(AssertionError):
    """A verified-by-construction identity failed; indicates a solver bug."""


def swapped_conjugator_word(sol: TwistedSolution, p: int) -> Word | None:
    """The mixed word u0 L S s^{pq} M2 P R v0^-1 s^r of the M1 -> s^{pq} swap
    (or its e < 0 mirror); None when the solution has no X3 chunk."""
    from .words import S as S_LETTER

    chunk = sol.chunk
    split = sol.split
    if chunk is None or chunk.tag != "X3" or split is None:
        return None
    if chunk.q < 1 or not chunk.m1:
        return split.u0 + sol.w_tilde[len(split.u0) : len(sol.w_tilde) - len(split.v0)] + invert(split.v0)
    s_block = ((-S_LETTER,) if chunk.e_negative else (S_LETTER,)) * (p * chunk.q)
    if chunk.e_negative:
        core = chunk.left + chunk.shared + chunk.m2 + s_block + chunk.prefix_part + chunk.right
    else:
        core = chunk.left + chunk.shared + s_block + chunk.m2 + chunk.prefix_part + chunk.right
    tail = ((S_LETTER,) if sol.r >= 0 else (-S_LETTER,)) * abs(sol.r)
    return split.u0 + core + invert(split.v0) + tail


def linearize_conjugator(sol: TwistedSolution, u, v, p: int, budget: int = DEFAULT_BUDGET):
    """Swap the quadratic M1 middle of an X3 solution for s^{pq}.

    Returns the H-element of the swapped word; with q = 0 (or a non-X3
    solution) the conjugator is returned unmodified.  The postcondition is
    checked and must hold for solver-produced chunks.
    """
    from .group import check_conjugation, normal_form
    from .words import S as S_LETTER

    tail = ((S_LETTER,) if sol.r >= 0 else (-S_LETTER,)) * abs(sol.r)
    if sol.chunk is None or sol.chunk.tag != "X3" or sol.chunk.q < 1 or not sol.chunk.m1:
        return normal_form(sol.w_tilde + tail, budget)
    word = swapped_conjugator_word(sol, p)
    elem = normal_form(word, budget)
    if not check_conjugation(u, elem, v, budget):
        raise InternalCheckError("M1 swap produced a non-conjugator")
    return elem


def compress_conjugator(
    w,
    u,
    v,
    u_source: Word | None = None,
    v_source: Word | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Word:
    """Greedy shortening of a conjugating mixed word, preserving the element.

    Two rewrites run to a fixpoint: an a-letter run equal to phi^k(x) becomes
    s^-k x s^k when that is shorter, and a run occurring inside the normal
    form of either endpoint is re-expressed through the constructive subword
    bound when that is shorter.
    """
    from .group import check_conjugation, normal_form, short_subword_word
    from .words import S as S_LETTER, free_reduce

    word = free_reduce(w)
    start_elem = normal_form(word, budget)
    if not check_conjugation(u, start_elem, v, budget):
        raise WordError("compress_conjugator needs a conjugating word")

    sources = []
    for src, elem in ((u_source, u), (v_source, v)):
        base = free_reduce(src) if src is not None else None
        if base is not None:
            sources.append((base, normal_form(base, budget).u_tilde))

    while True:
        new = _compress_pass(word, sources, budget)
        if new == word:
            break
        word = new
    if normal_form(word, budget) != start_elem:
        raise InternalCheckError("compression changed the group element")
    return word


def _compress_pass(word: Word, sources, budget: int) -> Word:
    from .words import S as S_LETTER, free_reduce
    from .group import short_subword_word

    out: list[int] = []
    idx = 0
    n = len(word)
    while idx < n:
        if abs(word[idx]) == S_LETTER:
            out.append(word[idx])
            idx += 1
            continue
        end = idx
        while end < n and abs(word[end]) != S_LETTER:
            end += 1
        run = word[idx:end]
        best = run
        # Fold phi-power images: run = phi^k(x) <-> s^-k x s^k.
        for direction in (1, -1):
            img = run
            for k in range(1, (len(run) - 1) // 2 + 1):
                img = apply_phi_power(img, -direction, budget)
                cost = 2 * k + len(img)
                if cost >= len(best):
                    if len(img) >= len(run):
                        break
                    continue
                best = ((-S_LETTER * direction,) * k) + img + ((S_LETTER * direction,) * k)
        # Re-express via the constructive subword bound.
        for base, u_tilde in sources:
            pos = _find_subword(u_tilde, run)
            if pos is None:
                continue
            candidate = short_subword_word(base, (pos, pos + len(run)), budget)
            if len(candidate) < len(best):
                best = candidate
        out.extend(best)
        idx = end
    return free_reduce(out)


def _find_subword(haystack: Word, needle: Word) -> int | None:
    n, k = len(haystack), len(needle)
    if k == 0 or k > n:
        return None
    for i in range(n - k + 1):
        if haystack[i : i + k] == needle:
            return i
    return None

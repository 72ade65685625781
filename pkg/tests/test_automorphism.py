from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from hydraconj.automorphism import (
    BudgetError,
    apply_phi_power,
    is_fixed,
    is_prefix_of_phi_letter,
    letter_image_length,
    phi_letter,
    phi_letter_closed_form,
    phi_letter_prefix,
    phi_letter_suffix,
)
from hydraconj.words import WordError, concat, free_reduce, invert


def phi_once_naive(w):
    """Independent oracle: substitute a_i -> a_i a_{i-1} letterwise, reduce."""
    out = []
    for x in w:
        img = [x] if abs(x) == 1 else ([abs(x), abs(x) - 1] if x > 0 else [-abs(x) + 1, -abs(x)])
        # inverse of a_i a_{i-1} is a_{i-1}^-1 a_i^-1
        if x < 0 and abs(x) != 1:
            img = [-(abs(x) - 1), -abs(x)]
        out.extend(img)
    return free_reduce(out)


def phi_power_naive(w, r):
    if r >= 0:
        for _ in range(r):
            w = phi_once_naive(w)
        return w
    raise ValueError("oracle only iterates forward")


class TestLetterImages:
    def test_defining_image(self):
        assert apply_phi_power((3,), 1) == (3, 2)

    def test_inverse_even_case(self):
        # phi^-1(a_4) = a4 a2 a1^-1 a3^-1
        assert apply_phi_power((4,), -1) == (4, 2, -1, -3)

    def test_inverse_odd_case(self):
        # phi^-1(a_5) = a5 a3 a1 a2^-1 a4^-1
        assert apply_phi_power((5,), -1) == (5, 3, 1, -2, -4)

    def test_square_via_oracle(self):
        assert apply_phi_power((3,), 2) == phi_power_naive((3,), 2) == (3, 2, 2, 1)

    def test_a1_fixed(self):
        assert apply_phi_power((1,), 17) == (1,)
        assert apply_phi_power((1,), -17) == (1,)

    @pytest.mark.parametrize("i", range(2, 7))
    def test_inverse_images_invert_cleanly(self, i):
        assert apply_phi_power(apply_phi_power((i,), -1), 1) == (i,)


class TestClosedForm:
    def test_positive_branch(self):
        # phi^2(a_3) = a3 . a2 . phi(a2) = a3 a2 a2 a1
        assert phi_letter_closed_form(3, 2) == (3, 2, 2, 1)

    def test_negative_small_rank(self):
        assert phi_letter_closed_form(2, -3) == (2, -1, -1, -1)
        assert phi_power_naive((2, -1, -1, -1), 3) == (2,)

    def test_negative_matches_inverse_formula(self):
        assert phi_letter_closed_form(4, -1) == (4, 2, -1, -3)

    @pytest.mark.parametrize("i,r", [(i, r) for i in range(2, 6) for r in (-5, -2, -1, 1, 2, 5)])
    def test_agrees_with_apply_and_needs_no_reduction(self, i, r):
        closed = phi_letter_closed_form(i, r)
        assert closed == apply_phi_power((i,), r)
        assert free_reduce(closed) == closed

    def test_domain_errors(self):
        with pytest.raises(WordError):
            phi_letter_closed_form(1, 3)
        with pytest.raises(WordError):
            phi_letter_closed_form(3, 0)


class TestLengths:
    def test_binomial_value(self):
        assert letter_image_length(3, 3) == comb(3, 0) + comb(3, 1) + comb(3, 2) == 7

    def test_fixed_letter(self):
        assert letter_image_length(1, 17) == 1

    def test_negative_power(self):
        assert letter_image_length(3, -2) == 1 + 2 + 3 == 6

    @pytest.mark.parametrize("i", range(1, 7))
    def test_formula_matches_construction(self, i):
        for r in range(-25, 26):
            assert letter_image_length(i, r) == len(apply_phi_power((i,), r))


class TestPowers:
    @given(st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=40), st.integers(-8, 8))
    @settings(max_examples=60, deadline=None)
    def test_inverse_law(self, letters, r):
        w = free_reduce(letters)
        assert apply_phi_power(apply_phi_power(w, r), -r) == w

    @given(
        st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=20),
        st.integers(-5, 5),
        st.integers(-5, 5),
    )
    @settings(max_examples=60, deadline=None)
    def test_power_composition(self, letters, r, t):
        w = free_reduce(letters)
        assert apply_phi_power(apply_phi_power(w, r), t) == apply_phi_power(w, r + t)

    @given(
        st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=15),
        st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=15),
        st.integers(-4, 4),
    )
    @settings(max_examples=60, deadline=None)
    def test_homomorphism(self, a, b, r):
        u, v = free_reduce(a), free_reduce(b)
        assert apply_phi_power(concat(u, v), r) == concat(
            apply_phi_power(u, r), apply_phi_power(v, r)
        )

    @given(st.lists(st.sampled_from([1, 2, 3, 4]), max_size=12))
    @settings(max_examples=40, deadline=None)
    def test_positive_words_stay_positive(self, letters):
        w = tuple(letters)
        assert all(x > 0 for x in apply_phi_power(w, 1))

    @given(st.lists(st.sampled_from([1, 2, 3, 4]), min_size=1, max_size=10))
    @settings(max_examples=40, deadline=None)
    def test_inverse_positive_in_alternating_basis(self, idxs):
        # b_i = a_i^((-1)^(i+1)); positive b-words have sign (-1)^(i+1) per letter
        w = tuple(i if i % 2 == 1 else -i for i in idxs)
        img = apply_phi_power(w, -1)
        assert all((abs(x) % 2 == 1) == (x > 0) for x in img)

    def test_budget_guard(self):
        with pytest.raises(BudgetError):
            apply_phi_power((6,), 1000, budget=10**5)

    def test_overflow_guard(self):
        with pytest.raises(OverflowError):
            letter_image_length(6, 10**6)


class TestLazyPrefixes:
    @pytest.mark.parametrize("i,r", [(3, 4), (4, -3), (5, 6), (6, -4), (2, -7)])
    def test_prefix_and_suffix_match_full_image(self, i, r):
        full = apply_phi_power((i,), r)
        for n in (0, 1, 2, 5, len(full), len(full) + 3):
            assert phi_letter_prefix(i, r, n) == full[:n]
            assert phi_letter_suffix(i, r, n) == full[-n:] if n else True

    def test_prefix_predicate(self):
        assert is_prefix_of_phi_letter((3, 2), 3, 1)
        assert is_prefix_of_phi_letter((3, 2, 2), 3, 2)
        assert not is_prefix_of_phi_letter((3, 1), 3, 1)


class TestFixed:
    def test_generator_conjugate(self):
        assert is_fixed((2, 1, -2))

    def test_moving_letter(self):
        assert not is_fixed((3,))

    def test_product_of_fixed_generators(self):
        assert is_fixed(free_reduce((1, 1, 1, 1, 1, 2, -1, -2)))

    def test_fixed_subgroup_characterization_exhaustive(self):
        # rank <= 2 words of length <= 6: fixed iff every rank-2 piece is
        # a_1^k or a_2 a_1^k a_2^-1
        from hydraconj.pieces import decompose, PieceType
        from hydraconj.oracle import reduced_words

        for w in reduced_words(2, 6, with_s=False):
            by_phi = is_fixed(w)
            by_shape = True
            for piece in decompose(w, 2).pieces:
                pw = piece.word
                if piece.ptype is PieceType.PLAIN:
                    ok = all(abs(x) == 1 for x in pw)
                elif piece.ptype is PieceType.WRAP:
                    ok = pw[0] == 2 and pw[-1] == -2 and all(abs(x) == 1 for x in pw[1:-1])
                else:
                    ok = False
                by_shape = by_shape and ok
            assert by_phi == by_shape, w

import pytest
from hypothesis import given, settings, strategies as st

from hydraconj.automorphism import apply_phi_power
from hydraconj.group import (
    HElem,
    IDENTITY,
    check_conjugation,
    h_conjugate,
    h_equal,
    h_inv,
    h_mul,
    normal_form,
    normal_form_stages,
    short_subword_word,
    word_of_element,
)
from hydraconj.pieces import piece_count
from hydraconj.words import S, free_reduce, parse_word

from conftest import random_reduced_word


def mixed(text, m=6):
    return parse_word(text, m)


class TestNormalForm:
    def test_defining_relation(self):
        assert normal_form(mixed("S a2 s")) == HElem((2, 1), 0)

    def test_all_defining_relations(self):
        for i in range(1, 7):
            expected = apply_phi_power((i,), 1)
            assert normal_form((-S, i, S)) == HElem(expected, 0)

    def test_shuffle_example_stages(self):
        # u = s a6 a5^-1 s^-2 a5 s^2 a3 at m = 6
        word = mixed("s a6 A5 s^-2 a5 s^2 a3")
        stages, nf = normal_form_stages(word)
        u1 = mixed("a6 a4 a2 A1 A3 A5 a4 a2 A1 A3 A5 s^-1 a5 s^2 a3")
        u2 = mixed("a6 a4 a2 A1 A3 A5 a4 a2 A1 A3 A5 a5 a4 s a3")
        u3 = mixed("a6 a4 a2 A1 A3 A5 a4 a2 A1 A3 A5 a5 a4 a3 a1 A2")
        assert stages == [u1, u2, u3]
        assert nf.s_exp == 1
        assert nf.u_tilde == free_reduce(u3)
        assert len(nf.u_tilde) == 14
        assert nf.u_tilde == mixed("a6 a4 a2 A1 A3 A5 a4 a2 A1 A3 a4 a3 a1 A2")

    def test_a1_commutes_with_s(self):
        assert h_equal(normal_form((S, 1)), normal_form((1, S)))

    def test_a2_does_not_commute_with_s(self):
        assert not h_equal(normal_form((S, 2)), normal_form((2, S)))

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_homomorphism_property(self, data):
        letters = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3, S, -S]), max_size=10)
        w1 = tuple(data.draw(letters))
        w2 = tuple(data.draw(letters))
        assert h_equal(normal_form(w1 + w2), h_mul(normal_form(w1), normal_form(w2)))


class TestAlgebra:
    def test_mul_example(self):
        g = HElem((2,), 1)
        h = HElem((2,), 0)
        assert h_mul(g, h) == HElem((2, 2, -1), 1)

    def test_identity(self):
        w = HElem((1, 2), -3)
        assert h_mul(IDENTITY, w) == w
        assert h_mul(w, IDENTITY) == w

    def test_inverse_law(self, rng):
        for _ in range(40):
            g = normal_form(random_reduced_word(rng, 4, 10, with_s=True))
            assert h_mul(g, h_inv(g)) == IDENTITY
            assert h_mul(h_inv(g), g) == IDENTITY

    def test_word_of_element_roundtrip(self, rng):
        for _ in range(30):
            g = normal_form(random_reduced_word(rng, 4, 8, with_s=True))
            assert normal_form(word_of_element(g)) == g


class TestConjugation:
    def test_conjugation_by_s_applies_phi(self):
        u = HElem((2,), 1)
        v = normal_form((-S, 2, S, S))
        assert v == HElem((2, 1), 1)
        assert check_conjugation(u, HElem((), 1), v)

    def test_identity_conjugator(self):
        g = HElem((3, -1), 2)
        assert check_conjugation(g, IDENTITY, g)

    def test_distinct_normal_forms(self):
        assert not check_conjugation(HElem((2,), 0), IDENTITY, HElem((3,), 0))

    def test_h_conjugate_matches_check(self, rng):
        for _ in range(40):
            g = normal_form(random_reduced_word(rng, 3, 8, with_s=True))
            c = normal_form(random_reduced_word(rng, 3, 6, with_s=True))
            assert check_conjugation(g, c, h_conjugate(g, c))


class TestPieceBound:
    def test_piece_count_bounded_by_word_length(self, rng):
        for _ in range(150):
            w = random_reduced_word(rng, 5, 14, with_s=True)
            nf = normal_form(w)
            assert piece_count(nf.u_tilde) <= max(len(w), 1) or not nf.u_tilde
            if nf.u_tilde:
                assert piece_count(nf.u_tilde) <= len(w)


class TestShortSubword:
    def test_trivial_span(self):
        assert short_subword_word((1, 2), (0, 2)) == (1, 2)

    def test_example_style_span(self):
        # subword a3^-1 a4 a3 of the shuffled example word
        word = mixed("s a6 A5 s^-2 a5 s^2 a3")
        nf = normal_form(word)
        target = (-3, 4, 3)
        start = next(
            i
            for i in range(len(nf.u_tilde) - 2)
            if nf.u_tilde[i : i + 3] == target
        )
        short = short_subword_word(word, (start, start + 3))
        assert normal_form(short) == HElem(target, 0)
        assert len(short) <= (2 * 6 + 1) * len(word)

    @settings(max_examples=120, deadline=None)
    @given(st.data())
    def test_equality_and_length_bound(self, data):
        m = 4
        letters = st.lists(
            st.sampled_from([1, -1, 2, -2, 3, -3, 4, -4, S, -S]), min_size=1, max_size=10
        )
        w = free_reduce(tuple(data.draw(letters)))
        nf = normal_form(w)
        n = len(nf.u_tilde)
        if n == 0:
            return
        lo = data.draw(st.integers(0, n - 1))
        hi = data.draw(st.integers(lo + 1, n))
        short = short_subword_word(w, (lo, hi))
        assert normal_form(short) == HElem(nf.u_tilde[lo:hi], 0)
        assert len(short) <= (2 * m + 1) * max(len(w), 1)

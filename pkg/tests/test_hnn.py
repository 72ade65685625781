import pytest

from hydraconj.engine import decide_conjugacy
from hydraconj.group import (
    HElem,
    check_conjugation,
    h_conjugate,
    h_equal,
    normal_form,
    word_of_element,
)
from hydraconj.hnn import beta_word, collins_decide, hnn_reduce
from hydraconj.oracle import reduced_words
from hydraconj.words import S, free_reduce, parse_word

from conftest import random_reduced_word


class TestHnnReduce:
    def test_defining_relation_pinch(self):
        # a3^-1 s a3 -> s a2^-1 at level 3
        word = (-3, S, 3)
        reduced, conj = hnn_reduce(word, 3)
        assert h_equal(normal_form(reduced), normal_form((S, -2)))
        assert conj == ()

    def test_no_stable_letters_unchanged(self):
        word = (2, 1, -2)
        reduced, conj = hnn_reduce(word, 3)
        assert reduced == word and conj == ()

    def test_beta_pinch(self):
        # a3 (s a2^-1) a3^-1 -> s
        word = (3,) + (S, -2) + (-3,)
        reduced, conj = hnn_reduce(word, 3)
        assert h_equal(normal_form(reduced), normal_form((S,)))

    def test_squared_form_is_pinch_free(self, rng):
        from hydraconj.hnn import _find_pinch

        for _ in range(40):
            w = random_reduced_word(rng, 3, 8, with_s=True)
            reduced, conj = hnn_reduce(w, 3)
            assert _find_pinch(free_reduce(reduced + reduced), 3, 10**7) is None
            # reduction is a conjugacy
            a = normal_form(w)
            b = normal_form(reduced)
            assert check_conjugation(b, normal_form(conj), a) or h_equal(
                h_conjugate(a, normal_form(conj)), b
            ) or check_conjugation(a, normal_form(conj), b)


class TestCollins:
    def test_engine_example_pair(self):
        cert = collins_decide(parse_word("a2 s", 3), parse_word("a2 a1 s", 3), 3)
        assert cert.conjugate and cert.verified

    def test_s_powers_not_conjugate(self):
        cert = collins_decide((S,), (S, S), 3)
        assert not cert.conjugate

    def test_simplifying_assumptions_desk_scale(self):
        # distinct powers of beta not conjugate; no s-power conjugate to a
        # beta-power (level 3, bounded search)
        for n in range(1, 4):
            for k in range(1, 4):
                if n != k:
                    cert = collins_decide(beta_word(3, n), beta_word(3, k), 3)
                    assert not cert.conjugate
            cert = collins_decide((S,) * n, beta_word(3, n), 2)
            assert not cert.conjugate

    def test_agreement_with_engine(self, rng):
        agree = both = 0
        for _ in range(120):
            u = random_reduced_word(rng, 3, 6, with_s=True)
            v = random_reduced_word(rng, 3, 6, with_s=True)
            c1 = decide_conjugacy(u, v, 3)
            c2 = collins_decide(u, v, 3)
            if not c1.inconclusive and not c2.inconclusive:
                both += 1
                agree += c1.conjugate == c2.conjugate
        assert both > 60
        assert agree == both

    def test_positive_pairs_found(self, rng):
        found = 0
        for _ in range(40):
            base = random_reduced_word(rng, 3, 5, with_s=True)
            conj = random_reduced_word(rng, 3, 4, with_s=True)
            u = normal_form(base)
            v = h_conjugate(u, normal_form(conj))
            cert = collins_decide(base, word_of_element(v), 3)
            if cert.conjugate:
                found += 1
                assert check_conjugation(u, normal_form(cert.witness), v)
        assert found >= 30

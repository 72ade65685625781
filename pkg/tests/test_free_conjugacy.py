import itertools

import pytest

from hydraconj.free_conjugacy import conjugate_in_f, max_root
from hydraconj.oracle import reduced_words
from hydraconj.words import concat, cyclic_reduce, invert

from conftest import random_reduced_word


def bfs_conjugate(u, v, depth):
    """Independent oracle: BFS over conjugating letters up to given depth."""
    if u == v:
        return True
    seen = {u}
    frontier = [u]
    letters = [1, -1, 2, -2]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for x in letters:
                c = concat((-x,), w, (x,))
                if c == v:
                    return True
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return False


class TestConjugateInF:
    def test_rotation_pair(self):
        w = conjugate_in_f((1, 2), (2, 1))
        assert w is not None
        assert concat((1, 2), w) == concat(w, (2, 1))

    def test_distinct_letters(self):
        assert conjugate_in_f((2,), (3,)) is None

    def test_peeled_pair(self):
        u, v = (-1, 2, 1), (2,)
        w = conjugate_in_f(u, v)
        assert w is not None
        assert concat(u, w) == concat(w, v)

    def test_witness_shape(self):
        # witness = prefix of u^-1 then suffix of v, as literal parts
        u, v = (1, 2, 1, 2, 2), (2, 1, 2, 2, 1)
        w = conjugate_in_f(u, v)
        assert w is not None
        assert concat(u, w) == concat(w, v)

    def test_completeness_against_bfs_exhaustive(self):
        words = list(reduced_words(2, 4, with_s=False))
        for u, v in itertools.product(words, repeat=2):
            got = conjugate_in_f(u, v)
            expected = bfs_conjugate(u, v, max(len(u), 1) + 1)
            assert (got is not None) == expected, (u, v)
            if got is not None:
                assert concat(u, got) == concat(got, v)

    def test_spot_check_deep_bfs(self, rng):
        for _ in range(40):
            u = random_reduced_word(rng, 2, 5)
            v = random_reduced_word(rng, 2, 5)
            got = conjugate_in_f(u, v) is not None
            assert got == bfs_conjugate(u, v, 10)

    def test_deterministic(self, rng):
        for _ in range(30):
            u = random_reduced_word(rng, 3, 8)
            c = random_reduced_word(rng, 3, 4)
            v = concat(invert(c), u, c)
            assert conjugate_in_f(u, v) == conjugate_in_f(u, v)


class TestMaxRoot:
    def test_visible_period(self):
        assert max_root((1, 2, 1, 2, 1, 2)) == ((1, 2), 3)

    def test_primitive(self):
        assert max_root((3,)) == ((3,), 1)

    def test_conjugated_power(self):
        u = concat((-1,), (2, 2, 2, 2), (1,))
        root, k = max_root(u)
        assert k == 4 and root == (-1, 2, 1)
        acc = ()
        for _ in range(k):
            acc = concat(acc, root)
        assert acc == u

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            max_root(())

    def test_root_is_not_a_proper_power(self, rng):
        for _ in range(50):
            u = random_reduced_word(rng, 3, 12)
            if not u:
                continue
            root, k = max_root(u)
            assert max_root(root)[1] == 1
            acc = ()
            for _ in range(k):
                acc = concat(acc, root)
            assert acc == u

    def test_root_generates_conjugator_family(self, rng):
        for _ in range(30):
            u = random_reduced_word(rng, 2, 6)
            c = random_reduced_word(rng, 2, 3)
            if not u:
                continue
            v = concat(invert(c), u, c)
            w = conjugate_in_f(u, v)
            root, _ = max_root(u)
            for ell in (-2, -1, 1, 2):
                family = w
                block = root if ell > 0 else invert(root)
                for _ in range(abs(ell)):
                    family = concat(block, family)
                assert concat(u, family) == concat(family, v)

import random

import pytest

from hydraconj.words import Word, S


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def random_reduced_word(rng, m: int, max_len: int, with_s: bool = False) -> Word:
    letters = [i for i in range(1, m + 1)] + [-i for i in range(1, m + 1)]
    if with_s:
        letters += [S, -S]
    n = rng.randint(0, max_len)
    out: list[int] = []
    while len(out) < n:
        x = rng.choice(letters)
        if out and out[-1] == -x:
            continue
        out.append(x)
    return tuple(out)

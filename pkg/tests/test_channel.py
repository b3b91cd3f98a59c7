"""Channel resolution truth table and purity."""

import random

from hypothesis import given, strategies as st

from radiocount.engine import resolve_channel
from radiocount.messages import (
    MSG_BEACON,
    MSG_STOP,
    NOISE,
    SILENCE,
    Message,
    MessageKind,
    Received,
)


def test_empty_set_is_silence():
    assert resolve_channel(0, set(), cd=False) is SILENCE
    assert resolve_channel(0, set(), cd=True) is SILENCE


def test_single_broadcaster_delivers_message():
    fb = resolve_channel(0, {(1, MSG_BEACON)}, cd=False)
    assert fb == Received(MSG_BEACON)
    fb = resolve_channel(0, {(1, MSG_BEACON)}, cd=True)
    assert fb == Received(MSG_BEACON)


def test_collision_depends_on_detection():
    pair = {(1, MSG_BEACON), (2, MSG_STOP)}
    assert resolve_channel(0, pair, cd=True) is NOISE
    assert resolve_channel(0, pair, cd=False) is SILENCE


@given(st.integers(min_value=0, max_value=50), st.booleans(),
       st.randoms(use_true_random=False))
def test_truth_table_for_random_sets(k, cd, rnd):
    kinds = list(MessageKind)
    bset = {(i + 1, Message(rnd.choice(kinds))) for i in range(k)}
    fb = resolve_channel(0, bset, cd)
    if k == 0:
        assert fb is SILENCE
    elif k == 1:
        assert fb == Received(next(iter(bset))[1])
    else:
        assert fb is (NOISE if cd else SILENCE)


def test_pure_function_of_inputs():
    rnd = random.Random(7)
    for _ in range(200):
        k = rnd.randrange(0, 6)
        bset = frozenset((i, MSG_BEACON) for i in range(k))
        cd = rnd.random() < 0.5
        assert resolve_channel(0, bset, cd) == resolve_channel(99, bset, cd)
        assert resolve_channel(0, bset, cd) == resolve_channel(0, bset, cd)

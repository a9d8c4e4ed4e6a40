import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from solitaire_lab import vectors
from solitaire_lab.cipher import (
    CipherState,
    advance_fast_joker,
    advance_slow_joker,
    count_cut,
    count_cut_cards,
    decrypt,
    encrypt,
    extract,
    keystream,
    keystream_traced,
    letters_to_values,
    normalize_text,
    reduce_letter,
    triple_cut,
    triple_cut_cards,
    update,
    update_cards,
    update_wrapped,
)
from solitaire_lab.deck import identity_deck, shuffle, validate_deck

permutations54 = st.permutations(list(range(1, 55)))


class TestWorkedExample:
    state = CipherState(vectors.WORKED_DECK)

    def test_initial_extraction(self):
        assert extract(self.state) == vectors.WORKED_EXTRACT

    def test_joker_moves(self):
        moved = advance_fast_joker(advance_slow_joker(self.state))
        assert moved.deck == vectors.WORKED_AFTER_JOKERS

    def test_triple_cut(self):
        moved = CipherState(vectors.WORKED_AFTER_JOKERS)
        assert triple_cut(moved).deck == vectors.WORKED_AFTER_TRIPLE

    def test_count_cut(self):
        cut = CipherState(vectors.WORKED_AFTER_TRIPLE)
        assert count_cut(cut).deck == vectors.WORKED_AFTER_COUNT
        assert vectors.WORKED_AFTER_COUNT[0] == 37  # 15th card cut to the top

    def test_composed_update(self):
        after = update(self.state)
        assert after.deck == vectors.WORKED_AFTER_COUNT
        assert after.step_index == 1


class TestRepeatWalkthrough:
    state = CipherState(vectors.REPEAT_DECK)

    def test_extraction_repeats_across_update(self):
        after = update(self.state)
        assert after.deck == vectors.REPEAT_AFTER_COUNT
        assert extract(self.state) == vectors.REPEAT_EXTRACT
        assert extract(after) == vectors.REPEAT_EXTRACT
        assert after.deck[0] == 3
        assert after.deck[-1] == 46

    def test_stage_tables(self):
        moved = advance_fast_joker(advance_slow_joker(self.state))
        assert moved.deck == vectors.REPEAT_AFTER_JOKERS
        assert triple_cut(moved).deck == vectors.REPEAT_AFTER_TRIPLE

    def test_traced_step_flags_the_story(self):
        _, traces = keystream_traced(self.state, 1)
        assert traces[0].story_flag is True
        assert traces[0].top_card_value == 3
        assert traces[0].extracted_value == 6

    def test_non_story_step_not_flagged(self):
        # the worked deck's next extraction differs from its current one
        ks, traces = keystream_traced(CipherState(vectors.WORKED_DECK), 1)
        assert ks.raw[0] != vectors.WORKED_EXTRACT
        assert traces[0].story_flag is False


def test_slow_joker_wrap():
    cards = validate_deck(tuple(range(1, 53)) + (54, 53))
    moved = advance_slow_joker(CipherState(cards))
    assert moved.deck == (1, 53) + tuple(range(2, 53)) + (54,)


def test_fast_joker_wrap_from_second_to_last():
    cards = validate_deck(tuple(range(1, 53)) + (54, 53))
    moved = advance_fast_joker(CipherState(cards))
    assert moved.deck.index(54) + 1 == 2


def test_fast_joker_wrap_from_last():
    cards = validate_deck(tuple(range(1, 53)) + (53, 54))
    moved = advance_fast_joker(CipherState(cards))
    assert moved.deck.index(54) + 1 == 3


def test_five_card_hand_traces():
    # worked by hand from the update rules
    assert update_cards((1, 2, 3, 4, 5)) == (2, 3, 4, 5, 1)
    assert extract(CipherState((2, 3, 4, 5, 1))) == 4
    assert update_cards((5, 1, 2, 4, 3)) == (4, 1, 5, 3, 2)
    assert extract(CipherState((4, 1, 5, 3, 2))) == 2


HAND_TRACES_N6 = {
    (1, 2, 3, 4, 5, 6): ((2, 3, 4, 5, 6, 1), 4),
    (6, 5, 4, 3, 2, 1): ((6, 3, 2, 1, 5, 4), 4),
    (2, 4, 6, 1, 3, 5): ((1, 3, 6, 5, 4, 2), 3),
    (3, 6, 5, 2, 1, 4): ((5, 6, 3, 1, 4, 2), 2),
    (4, 2, 6, 3, 5, 1): ((5, 4, 2, 3, 6, 1), 1),
}


def test_six_card_hand_traces():
    for start, (after, value) in HAND_TRACES_N6.items():
        assert update_cards(start) == after
        assert extract(CipherState(after)) == value


def test_count_cut_noop_for_joker_bottom():
    deck_53 = validate_deck(tuple(range(1, 53)) + (54, 53))
    assert count_cut_cards(deck_53) == deck_53
    deck_54 = validate_deck(tuple(range(1, 54)) + (54,))
    assert count_cut_cards(deck_54) == deck_54


@given(permutations54)
def test_count_cut_fixes_bottom_card(cards):
    d = tuple(cards)
    assert count_cut_cards(d)[-1] == d[-1]


def test_triple_cut_with_jokers_at_ends():
    d = (53,) + tuple(range(1, 53)) + (54,)
    assert triple_cut_cards(d) == d


def test_triple_cut_adjacent_jokers_at_bottom():
    d = tuple(range(1, 53)) + (53, 54)
    assert triple_cut_cards(d) == (53, 54) + tuple(range(1, 53))
    # small-deck hand check of the same arrangement
    assert triple_cut_cards((1, 2, 3, 4, 5, 6)) == (5, 6, 1, 2, 3, 4)


@given(permutations54)
def test_triple_cut_involution(cards):
    d = tuple(cards)
    assert triple_cut_cards(triple_cut_cards(d)) == d


def test_extract_exceptions():
    top54 = (54,) + tuple(range(1, 54))
    assert extract(CipherState(top54)) == top54[-1]
    top1 = (1, 40) + tuple(v for v in range(2, 55) if v != 40)
    assert extract(CipherState(validate_deck(top1))) == 40


@given(permutations54)
def test_update_preserves_permutation(cards):
    after = update_cards(tuple(cards))
    assert sorted(after) == list(range(1, 55))


@given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=5, max_value=9))
def test_update_preserves_permutation_small_decks(seed, n):
    after = update_cards(shuffle(seed, n))
    assert sorted(after) == list(range(1, n + 1))


@given(permutations54)
def test_triple_cut_postconditions_in_update(cards):
    d = tuple(cards)
    assume(d[0] < 53)
    moved = advance_fast_joker(advance_slow_joker(CipherState(d))).deck
    cut = triple_cut_cards(moved)
    # position 1 holds a joker or a card that sat below the bottom-most joker
    bottom_joker = max(moved.index(53), moved.index(54))
    assert cut[0] >= 53 or moved.index(cut[0]) > bottom_joker
    # the former top card sits directly after a joker
    pos = cut.index(d[0])
    assert cut[pos - 1] >= 53


@pytest.mark.parametrize("n", [5, 6, 7])
def test_update_injective_without_wrap(n):
    import itertools

    images = {}
    for perm in itertools.permutations(range(1, n + 1)):
        if update_wrapped(perm):
            continue
        img = update_cards(perm)
        assert img not in images, f"collision: {images[img]} and {perm}"
        images[img] = perm


def test_keystream_length_zero():
    state = CipherState(shuffle(3))
    ks = keystream(state, 0, "raw")
    assert ks.raw == () and ks.letters == ()


def test_keystream_modes():
    state = CipherState(shuffle(4))
    raw = keystream(state, 200, "raw")
    assert len(raw.raw) == 200
    assert len(raw.letters) == sum(1 for v in raw.raw if v <= 52)
    letters = keystream(state, 50, "letters")
    assert len(letters.letters) == 50
    assert len(letters.raw) >= 50
    assert letters.letters == raw.letters[:50]
    with pytest.raises(ValueError):
        keystream(state, -1)
    with pytest.raises(ValueError):
        keystream(state, 5, "nibbles")


def test_letter_reduction():
    assert reduce_letter(26) == 26
    assert reduce_letter(52) == 26
    assert reduce_letter(27) == 1
    assert reduce_letter(1) == 1


def test_keystream_invariant_letters_from_raw():
    state = CipherState(shuffle(5))
    ks = keystream(state, 300, "raw")
    derived = tuple(reduce_letter(v) for v in ks.raw if v <= 52)
    assert derived == ks.letters


def test_traced_matches_keystream():
    state = CipherState(shuffle(6))
    ks_plain = keystream(state, 40, "raw")
    ks_traced, traces = keystream_traced(state, 40)
    assert ks_traced.raw == ks_plain.raw
    assert [t.extracted_value for t in traces] == list(ks_plain.raw)
    assert [t.t for t in traces] == list(range(1, 41))
    for t in traces:
        assert 1 <= t.slow_pos_before <= 54 and 1 <= t.fast_pos_after <= 54


def test_normalize_and_values():
    assert normalize_text("Attack at Dawn!") == "ATTACKATDAWN"
    assert letters_to_values("ABZ") == [1, 2, 26]


@given(st.text(alphabet=st.characters(), min_size=1, max_size=120), st.integers(min_value=0, max_value=2**32))
def test_encrypt_decrypt_round_trip(text, seed):
    state = CipherState(shuffle(seed))
    plain = normalize_text(text)
    if not plain:
        with pytest.raises(ValueError):
            encrypt(text, state)
        return
    assert decrypt(encrypt(text, state), state) == plain


def test_all_a_plaintext_reveals_keystream():
    state = CipherState(shuffle(7))
    n = 60
    cipher_text = encrypt("A" * n, state)
    ks = keystream(state, n, "letters").letters
    assert letters_to_values(cipher_text) == list(ks)

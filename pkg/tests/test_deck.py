import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from solitaire_lab import engine, vectors
from solitaire_lab.deck import (
    SplitMix64,
    adjacencies_preserved,
    adjacency_count,
    card_to_number,
    format_deck,
    identity_deck,
    load_deck,
    number_to_card,
    parse_deck,
    save_deck,
    shard_seed,
    shuffle,
    validate_deck,
)
from solitaire_lab.errors import DeckFormatError, InvalidDeckError

permutations54 = st.permutations(list(range(1, 55)))


def test_card_to_number_examples():
    assert card_to_number("KD") == 26
    assert card_to_number("AC") == 1
    assert card_to_number("jo") == 53
    assert card_to_number("JO") == 54
    assert card_to_number("10S") == 49


def test_number_to_card_examples():
    assert number_to_card(26) == "KD"
    assert number_to_card(3) == "3C"
    assert number_to_card(53) == "jo"
    assert number_to_card(54) == "JO"


def test_card_number_round_trip():
    for v in range(1, 55):
        assert card_to_number(number_to_card(v)) == v
    for rank in ("A", "2", "9", "10", "J", "Q", "K"):
        for suit in "CDHS":
            label = rank + suit
            assert number_to_card(card_to_number(label)) == label


@pytest.mark.parametrize("label", ["", "XX", "0C", "11D", "14C", "KdD", "Jo", "jO", "K", "10", "KD "])
def test_malformed_labels_rejected(label):
    with pytest.raises(DeckFormatError):
        card_to_number(label)


@pytest.mark.parametrize("value", [0, 55, -3, 1000])
def test_number_out_of_range(value):
    with pytest.raises(DeckFormatError):
        number_to_card(value)


def test_adjacency_count_examples():
    assert adjacency_count(identity_deck(54)) == 53
    assert adjacency_count(tuple(reversed(identity_deck(54)))) == 0
    rotated = tuple(range(2, 55)) + (1,)
    assert adjacency_count(rotated) == 52


def test_adjacencies_preserved_examples():
    ident = identity_deck(54)
    assert adjacencies_preserved(ident, ident) == 53
    assert adjacencies_preserved(ident, tuple(reversed(ident))) == 0
    with pytest.raises(InvalidDeckError):
        adjacencies_preserved(ident, identity_deck(6))


@given(permutations54)
def test_preserved_vs_identity_equals_adjacency_count(cards):
    d = tuple(cards)
    ident = identity_deck(54)
    assert adjacencies_preserved(ident, d) == adjacency_count(d)
    assert adjacencies_preserved(d, ident) == adjacency_count(d)
    assert adjacencies_preserved(d, d) == 53


def test_splitmix64_reference_vectors():
    # public-domain reference outputs pin the generator forever
    r = SplitMix64(0)
    assert [r.next_u64() for _ in range(3)] == [
        0xE220A8397B1DCDAF,
        0x6E789E6AA1B965F4,
        0x06C45D188009454F,
    ]
    r = SplitMix64(1234567)
    assert [r.next_u64() for _ in range(3)] == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
    ]


def test_shuffle_deterministic_and_frozen():
    assert shuffle(0) == shuffle(0)
    assert shuffle(0)[:10] == (15, 3, 23, 34, 30, 4, 39, 40, 2, 43)
    assert shuffle(1)[:10] == (53, 42, 36, 1, 44, 48, 32, 19, 34, 40)
    assert shuffle(0, 6) == (5, 3, 6, 4, 1, 2)


@given(st.integers(min_value=0, max_value=2**64 - 1), st.integers(min_value=5, max_value=60))
def test_shuffle_is_permutation(seed, n):
    assert sorted(shuffle(seed, n)) == list(range(1, n + 1))


def test_shuffle_small_deck_rejected():
    with pytest.raises(InvalidDeckError):
        shuffle(1, 4)


def test_shuffle_top_card_uniform():
    # brute-force sampling: each top-card bin within 4 sigma, chi-square sane
    trials = 1_000_000
    hist = engine.shuffle_top_histogram(5150, trials)
    expected = trials / 54
    sigma = math.sqrt(trials * (1 / 54) * (53 / 54))
    assert abs(hist - expected).max() <= 4 * sigma
    chi2 = float(((hist - expected) ** 2 / expected).sum())
    assert chi2 < 96.4  # 99.9% quantile, 53 dof


def test_shard_seed_deterministic():
    assert shard_seed(7, 0) == shard_seed(7, 0)
    assert shard_seed(7, 0) != shard_seed(7, 1)
    rng = SplitMix64(7)
    outputs = [rng.next_u64() for _ in range(3)]
    assert [shard_seed(7, i) for i in range(3)] == outputs
    with pytest.raises(ValueError):
        shard_seed(7, -1)


def test_validate_deck_errors():
    with pytest.raises(InvalidDeckError):
        validate_deck([1, 1, 3, 4, 5])
    with pytest.raises(InvalidDeckError):
        validate_deck([1, 2, 3, 4, 6])
    with pytest.raises(InvalidDeckError):
        validate_deck([1, 2, 3, 4])
    with pytest.raises(InvalidDeckError):
        validate_deck(list(range(1, 54)), n=54)


def test_parse_numeric_matches_worked_deck():
    text = ",".join(str(v) for v in vectors.WORKED_DECK)
    assert parse_deck(text) == vectors.WORKED_DECK


def test_parse_cards_matches_worked_deck():
    assert parse_deck(vectors.WORKED_DECK_CARDS) == vectors.WORKED_DECK


@given(permutations54)
def test_format_parse_round_trip(cards):
    d = tuple(cards)
    assert parse_deck(format_deck(d, "numbers")) == d
    assert parse_deck(format_deck(d, "cards")) == d


def test_parse_errors():
    with pytest.raises(InvalidDeckError):
        parse_deck("1,1,3")
    with pytest.raises(DeckFormatError):
        parse_deck("1,x,3")
    with pytest.raises(DeckFormatError):
        parse_deck("KD 10C BANANA")
    with pytest.raises(DeckFormatError):
        parse_deck("   ")
    with pytest.raises(InvalidDeckError):
        parse_deck(",".join(str(v) for v in range(2, 56)))  # 55 out of range


def test_deck_file_round_trip(tmp_path):
    path = tmp_path / "deck.txt"
    d = shuffle(99)
    save_deck(d, path)
    assert load_deck(path) == d
    save_deck(d, path, style="cards")
    assert load_deck(path) == d


def test_random_deck_adjacency_mean():
    # a uniform permutation has (n-1)/n expected adjacencies, about 1
    mean = engine.mean_adjacency(90_210, 200_000)
    assert abs(mean - 1.0) <= 0.02

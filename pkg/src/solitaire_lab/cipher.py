"""The Solitaire state machine: joker moves, cuts, extraction, keystreams.

This is the readable reference implementation operating on tuples; the
``engine`` module holds a numba twin for bulk experiments and the two are
cross-checked against each other in the test suite.

Update convention
-----------------
One update applies, in order: advance the slow joker one place, advance the
fast joker two places, triple cut, count cut. When a joker advance would pass
the bottom of the deck, the joker instead re-enters at position 2 via a right
rotation of the last n-1 cards.

Extraction convention
---------------------
``extract`` reads S[S[1]+1] from the current deck (S[n] when S[1] = n) and can
probe any state, including a fresh one. ``keystream`` applies one update
before every extraction, so its first output comes from the state after one
update. Letter reduction maps non-joker value v to ((v-1) mod 26) + 1 for
54-card decks, sending both 26 and 52 to 26.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .deck import DEFAULT_SIZE, Deck, fast_joker, shuffle, slow_joker, validate_deck
from .model import story_conditions


@dataclass(frozen=True)
class CipherState:
    """Deck order plus the number of updates applied so far."""

    deck: Deck
    step_index: int = 0

    @property
    def n(self) -> int:
        return len(self.deck)


def state_from_seed(seed: int, n: int = DEFAULT_SIZE) -> CipherState:
    return CipherState(shuffle(seed, n))


def state_from_deck(cards, n: int | None = None) -> CipherState:
    return CipherState(validate_deck(cards, n))


@dataclass(frozen=True)
class Keystream:
    """Raw per-update outputs (1..n) and the joker-free letter stream (1..26)."""

    raw: tuple[int, ...]
    letters: tuple[int, ...]


@dataclass(frozen=True)
class StepTrace:
    """Instrumented record of one update followed by one extraction.

    Positions are 1-indexed. ``top_card_value`` is the dereferenced card, the
    deck's top card at extraction time. ``story_flag`` records whether the
    pre-update deck satisfied the causal repeat conditions (see
    ``model.story_conditions``); it predicts that this step extracts the same
    card as the previous step.
    """

    t: int
    top_card_value: int
    extracted_value: int
    slow_pos_before: int
    slow_pos_after: int
    fast_pos_before: int
    fast_pos_after: int
    bottom_card_after_update: int
    story_flag: bool


def letter_modulus(n: int = DEFAULT_SIZE) -> int:
    """Letter-stream modulus: 26 for the real 54-card cipher.

    For generalized deck sizes the non-joker values 1..n-2 are kept as-is
    (modulus n-2), since no halving convention exists off the real deck.
    """
    return 26 if n == DEFAULT_SIZE else n - 2


def reduce_letter(v: int, m: int = 26) -> int:
    return ((v - 1) % m) + 1


def _advance_once(cards: list, joker: int) -> bool:
    """Advance ``joker`` one place in ``cards`` in place; True if it wrapped."""
    i = cards.index(joker)
    n = len(cards)
    if i == n - 1:
        # right rotation of the last n-1 cards; the joker re-enters at position 2
        cards[1:] = [cards[-1]] + cards[1:-1]
        return True
    cards[i], cards[i + 1] = cards[i + 1], cards[i]
    return False


def advance_slow_joker_cards(cards: Deck) -> Deck:
    work = list(cards)
    _advance_once(work, slow_joker(len(work)))
    return tuple(work)


def advance_fast_joker_cards(cards: Deck) -> Deck:
    work = list(cards)
    joker = fast_joker(len(work))
    _advance_once(work, joker)
    _advance_once(work, joker)
    return tuple(work)


def triple_cut_cards(cards: Deck) -> Deck:
    """Swap the blocks above the first joker and below the second joker.

    Joker identities are irrelevant; only their positions matter. The
    operation is an involution.
    """
    n = len(cards)
    jokers = sorted((cards.index(slow_joker(n)), cards.index(fast_joker(n))))
    i, j = jokers
    return cards[j + 1 :] + cards[i : j + 1] + cards[:i]


def count_cut_cards(cards: Deck) -> Deck:
    """Cut the top n-1 cards so the (k+1)-th card becomes top, k = bottom value.

    No-op when the bottom card is either joker. The bottom card never moves.
    """
    n = len(cards)
    k = cards[-1]
    if k >= n - 1:
        return cards
    return cards[k : n - 1] + cards[:k] + (cards[-1],)


def update_cards(cards: Deck) -> Deck:
    """One full update applied to a plain card tuple."""
    work = list(cards)
    n = len(work)
    _advance_once(work, slow_joker(n))
    joker = fast_joker(n)
    _advance_once(work, joker)
    _advance_once(work, joker)
    return count_cut_cards(triple_cut_cards(tuple(work)))


def update_wrapped(cards: Deck) -> bool:
    """True if either joker advance in one update would use the wrap rule."""
    work = list(cards)
    n = len(work)
    wrapped = _advance_once(work, slow_joker(n))
    joker = fast_joker(n)
    wrapped |= _advance_once(work, joker)
    wrapped |= _advance_once(work, joker)
    return wrapped


def extract_cards(cards: Deck) -> int:
    n = len(cards)
    v = cards[0]
    return cards[n - 1] if v == n else cards[v]


def advance_slow_joker(state: CipherState) -> CipherState:
    return replace(state, deck=advance_slow_joker_cards(state.deck))


def advance_fast_joker(state: CipherState) -> CipherState:
    return replace(state, deck=advance_fast_joker_cards(state.deck))


def triple_cut(state: CipherState) -> CipherState:
    return replace(state, deck=triple_cut_cards(state.deck))


def count_cut(state: CipherState) -> CipherState:
    return replace(state, deck=count_cut_cards(state.deck))


def update(state: CipherState) -> CipherState:
    return CipherState(update_cards(state.deck), state.step_index + 1)


def extract(state: CipherState) -> int:
    """Current key value S[S[1]+1], or S[n] when the top card is the fast joker.

    Does not mutate or advance the state.
    """
    return extract_cards(state.deck)


def _make_keystream(raw: list[int], n: int) -> Keystream:
    m = letter_modulus(n)
    letters = tuple(reduce_letter(v, m) for v in raw if v <= n - 2)
    return Keystream(tuple(raw), letters)


def keystream(state: CipherState, length: int, mode: str = "letters") -> Keystream:
    """Generate key values by repeating update-then-extract.

    ``raw`` mode performs exactly ``length`` updates and keeps every output.
    ``letters`` mode keeps updating until ``length`` non-joker outputs have
    been produced, so more than ``length`` updates may occur.
    """
    if length < 0:
        raise ValueError("keystream length must be non-negative")
    if mode not in ("raw", "letters"):
        raise ValueError(f"unknown keystream mode: {mode!r}")
    cards = state.deck
    n = len(cards)
    raw: list[int] = []
    if mode == "raw":
        for _ in range(length):
            cards = update_cards(cards)
            raw.append(extract_cards(cards))
    else:
        produced = 0
        while produced < length:
            cards = update_cards(cards)
            v = extract_cards(cards)
            raw.append(v)
            if v <= n - 2:
                produced += 1
    return _make_keystream(raw, n)


def keystream_traced(state: CipherState, length: int) -> tuple[Keystream, list[StepTrace]]:
    """Raw-mode keystream plus one StepTrace per update."""
    if length < 0:
        raise ValueError("keystream length must be non-negative")
    cards = state.deck
    n = len(cards)
    s_val, f_val = slow_joker(n), fast_joker(n)
    raw: list[int] = []
    traces: list[StepTrace] = []
    for t in range(1, length + 1):
        flag = story_conditions(cards) if n == DEFAULT_SIZE else False
        slow_before = cards.index(s_val) + 1
        fast_before = cards.index(f_val) + 1
        cards = update_cards(cards)
        value = extract_cards(cards)
        raw.append(value)
        traces.append(
            StepTrace(
                t=state.step_index + t,
                top_card_value=cards[0],
                extracted_value=value,
                slow_pos_before=slow_before,
                slow_pos_after=cards.index(s_val) + 1,
                fast_pos_before=fast_before,
                fast_pos_after=cards.index(f_val) + 1,
                bottom_card_after_update=cards[-1],
                story_flag=flag,
            )
        )
    return _make_keystream(raw, n), traces


def normalize_text(text: str) -> str:
    """Uppercase and strip everything outside A..Z."""
    return "".join(c for c in text.upper() if "A" <= c <= "Z")


def letters_to_values(text: str) -> list[int]:
    return [ord(c) - ord("A") + 1 for c in normalize_text(text)]


def values_to_letters(values) -> str:
    return "".join(chr((int(v) - 1) % 26 + ord("A")) for v in values)


def encrypt(plaintext: str, state: CipherState) -> str:
    """Encrypt A..Z text: c = ((p-1) + (k-1)) mod 26, in 1..26 coordinates.

    With this convention a plaintext of all A's (value 1) yields a ciphertext
    equal to the letter keystream.
    """
    p = letters_to_values(plaintext)
    if not p:
        raise ValueError("plaintext contains no letters")
    ks = keystream(state, len(p), mode="letters").letters
    return values_to_letters(((pi + ki - 2) % 26) + 1 for pi, ki in zip(p, ks))


def decrypt(ciphertext: str, state: CipherState) -> str:
    """Inverse of :func:`encrypt` for the same initial state."""
    c = letters_to_values(ciphertext)
    if not c:
        raise ValueError("ciphertext contains no letters")
    ks = keystream(state, len(c), mode="letters").letters
    return values_to_letters(((ci - ki) % 26) + 1 for ci, ki in zip(c, ks))

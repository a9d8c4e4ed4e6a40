"""Deck representation, card notation, seeded shuffling, and permutation metrics.

Positions and card values are 1-indexed in every public interface: position 1
is the top of the deck. A deck of size n (n >= 5, default 54) holds each value
1..n exactly once; the two highest values act as jokers, n-1 being the slow
joker and n the fast joker. Internally a deck is a plain tuple of ints, so
0-based indexing applies to the raw tuple only.

Shuffling is pinned forever to Fisher-Yates driven by the public-domain
SplitMix64 generator so that any (seed, n) pair yields the same deck on every
platform. ``tests/test_deck.py`` checks the generator's uniformity.
"""

from __future__ import annotations

from .errors import DeckFormatError, InvalidDeckError

Deck = tuple[int, ...]

DEFAULT_SIZE = 54
MIN_SIZE = 5

SLOW_JOKER_LABEL = "jo"
FAST_JOKER_LABEL = "JO"

_SUIT_OFFSETS = {"C": 0, "D": 13, "H": 26, "S": 39}
_SUIT_BY_OFFSET = {v: k for k, v in _SUIT_OFFSETS.items()}
_RANKS = ("A", "2", "3", "4", "5", "6", "7", "8", "9", "10", "J", "Q", "K")
_RANK_VALUES = {r: i + 1 for i, r in enumerate(_RANKS)}


def slow_joker(n: int = DEFAULT_SIZE) -> int:
    """Value of the slow joker for an n-card deck."""
    return n - 1


def fast_joker(n: int = DEFAULT_SIZE) -> int:
    """Value of the fast joker for an n-card deck."""
    return n


def card_to_number(label: str) -> int:
    """Map a card label such as "KD", "10C", "jo" or "JO" to its value in 1..54.

    Rank contributes 1..13 (ace low) and the suit adds 0, 13, 26 or 39 for
    clubs, diamonds, hearts, spades. "jo" is the slow joker (53), "JO" the
    fast joker (54). Labels are case sensitive.
    """
    if label == SLOW_JOKER_LABEL:
        return 53
    if label == FAST_JOKER_LABEL:
        return 54
    rank, suit = label[:-1], label[-1:]
    if rank in _RANK_VALUES and suit in _SUIT_OFFSETS:
        return _RANK_VALUES[rank] + _SUIT_OFFSETS[suit]
    raise DeckFormatError(f"malformed card label: {label!r}")


def number_to_card(v: int) -> str:
    """Exact inverse of :func:`card_to_number`; defined for 1..54 only."""
    if not 1 <= int(v) <= 54:
        raise DeckFormatError(f"card value out of range 1..54: {v!r}")
    v = int(v)
    if v == 53:
        return SLOW_JOKER_LABEL
    if v == 54:
        return FAST_JOKER_LABEL
    offset = ((v - 1) // 13) * 13
    return _RANKS[v - offset - 1] + _SUIT_BY_OFFSET[offset]


def identity_deck(n: int = DEFAULT_SIZE) -> Deck:
    return tuple(range(1, n + 1))


def validate_deck(cards, n: int | None = None) -> Deck:
    """Check that ``cards`` is a permutation of 1..n and return it as a tuple."""
    deck = tuple(int(c) for c in cards)
    size = len(deck) if n is None else n
    if size < MIN_SIZE:
        raise InvalidDeckError(f"deck size must be at least {MIN_SIZE}, got {size}")
    if len(deck) != size:
        raise InvalidDeckError(f"expected {size} cards, got {len(deck)}")
    seen = [False] * (size + 1)
    for c in deck:
        if not 1 <= c <= size:
            raise InvalidDeckError(f"card value out of range 1..{size}: {c}")
        if seen[c]:
            raise InvalidDeckError(f"duplicate card value: {c}")
        seen[c] = True
    return deck


# SplitMix64 constants (Steele, Lea & Flood; public domain reference code).
MASK64 = (1 << 64) - 1
SM64_GAMMA = 0x9E3779B97F4A7C15
SM64_MUL1 = 0xBF58476D1CE4E5B9
SM64_MUL2 = 0x94D049BB133111EB


class SplitMix64:
    """SplitMix64 64-bit generator; the package's only source of randomness."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + SM64_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * SM64_MUL1) & MASK64
        z = ((z ^ (z >> 27)) * SM64_MUL2) & MASK64
        return z ^ (z >> 31)


def shard_seed(base: int, index: int) -> int:
    """Seed for shard ``index`` of a run keyed by ``base``.

    Defined as the (index+1)-th output of SplitMix64(base), so a sharded run
    is reproducible regardless of worker count.
    """
    if index < 0:
        raise ValueError("shard index must be non-negative")
    rng = SplitMix64(base)
    value = rng.next_u64()
    for _ in range(index):
        value = rng.next_u64()
    return value


def shuffle(seed: int, n: int = DEFAULT_SIZE) -> Deck:
    """Deterministic uniform deck: Fisher-Yates over 1..n driven by SplitMix64.

    The loop runs i = n-1 down to 1 (0-based) swapping position i with
    ``next_u64() % (i + 1)``. The modulo bias is below 2**-57 for n <= 54.
    """
    if n < MIN_SIZE:
        raise InvalidDeckError(f"deck size must be at least {MIN_SIZE}, got {n}")
    rng = SplitMix64(seed)
    cards = list(range(1, n + 1))
    for i in range(n - 1, 0, -1):
        j = rng.next_u64() % (i + 1)
        cards[i], cards[j] = cards[j], cards[i]
    return tuple(cards)


def adjacency_count(deck: Deck) -> int:
    """Number of positions i with deck[i+1] = deck[i] + 1 (1-indexed talk).

    A uniform random permutation has just under one adjacency on average; a
    permutation that preserves a run of r consecutive values has at least r-1.
    """
    return sum(1 for a, b in zip(deck, deck[1:]) if b == a + 1)


def adjacencies_preserved(a: Deck, b: Deck) -> int:
    """Count card pairs lying together in ``a`` that still lie together in ``b``.

    Relabel the cards by their position in ``a`` (the card at position i
    becomes i); the count is then the adjacency count of the relabelled
    ``b``. With ``a`` the identity deck this reduces to adjacency_count(b).
    """
    if len(a) != len(b):
        raise InvalidDeckError(f"deck size mismatch: {len(a)} vs {len(b)}")
    follows_in_a = {x: y for x, y in zip(a, a[1:])}
    return sum(1 for x, y in zip(b, b[1:]) if follows_in_a.get(x) == y)


def parse_deck(text: str) -> Deck:
    """Parse a deck from text.

    Two forms are accepted: comma-separated integers ("26,10,...,45") and
    whitespace-separated card labels ("KD 10C ... jo ... JO"). The card form
    is only valid for 54-card decks.
    """
    s = text.strip()
    if not s:
        raise DeckFormatError("empty deck text")
    if "," in s:
        values = []
        for token in s.split(","):
            token = token.strip()
            try:
                values.append(int(token))
            except ValueError:
                raise DeckFormatError(f"unknown numeric token: {token!r}") from None
    else:
        values = [card_to_number(token) for token in s.split()]
    return validate_deck(values)


def format_deck(deck: Deck, style: str = "numbers") -> str:
    """Render a deck as text; inverse of :func:`parse_deck` for both styles."""
    if style == "numbers":
        return ",".join(str(c) for c in deck)
    if style == "cards":
        if len(deck) != 54:
            raise DeckFormatError("card-label form requires a 54-card deck")
        return " ".join(number_to_card(c) for c in deck)
    raise ValueError(f"unknown deck format style: {style!r}")


def load_deck(path) -> Deck:
    """Read a deck from a single-line UTF-8 text file."""
    with open(path, encoding="utf-8") as fh:
        return parse_deck(fh.read())


def save_deck(deck: Deck, path, style: str = "numbers") -> None:
    """Write a deck as a single-line UTF-8 text file."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_deck(deck, style) + "\n")

"""Closed-form analytic quantities behind the keystream repeat bias.

Everything here is exact or elementary math: the causal-story counting sums,
the predicted repeat rate they imply, the entropy leak of the biased stream,
the adjacency decay model for repeated updates, and the expectation arithmetic
for the two exploitation scenarios. Monte Carlo corroboration lives in
``engine`` (bulk) and the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

DECK_SIZE = 54

# Observed distance-1 repeat rates of the keystream, used as reference inputs
# for the attack expectation arithmetic.
OBSERVED_LETTER_REPEAT_RATE = 0.0444
OBSERVED_RAW_REPEAT_RATE = 0.0254

# Expected adjacencies: a fresh random 54-deck has 53 value-successor pairs,
# one update preserves about 45 of them on average.
ADJACENCY_PAIRS = 53
ADJACENCY_KEPT_PER_UPDATE = 45


@dataclass(frozen=True)
class BiasModel:
    """Exact counting results for the causal repeat story on the 54-card deck."""

    slow_numerator: int
    fast_numerator: int
    denominator: int
    p_exact: Fraction
    split_index: int = 29

    @property
    def p(self) -> float:
        return float(self.p_exact)


def story_sums() -> BiasModel:
    """Evaluate the two causal-story counting sums with exact integers.

    The sums run over the leading joker's index i, weighting the allowed
    positions of the trailing joker by (53 - i) and the allowed dereferenced
    card values by (i - 2) or (i - 3) for the slow-joker case (one fewer for
    the fast-joker case); the split at i = 29 is where the pinned count-card
    value collides with the dereferenced-card range.
    """
    slow = 0
    for i in range(3, 29):
        slow += 1 * 1 * (53 - i) * (i - 2)
    for i in range(29, 53):
        slow += 1 * 1 * (53 - i) * (i - 3)
    fast = 0
    for i in range(3, 29):
        fast += 1 * 1 * (53 - i) * (i - 3)
    for i in range(29, 53):
        fast += 1 * 1 * (53 - i) * (i - 4)
    denominator = 54 * 53 * 52 * 51
    return BiasModel(slow, fast, denominator, Fraction(slow + fast, denominator))


def predicted_repeat_rate(p: float, m: int = 26) -> float:
    """Distance-1 repeat rate implied by story probability p: p + (1-p)/m."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    return p + (1 - p) / m


def story_conditions(cards) -> bool:
    """Card-placement predicate for the causal repeat story on a 54-card deck.

    True when the deck is arranged so that the coming update restores the top
    (dereferenced) card to the top along with the cards the extraction
    depends on, forcing the next extraction to repeat this one. With the
    slow joker at 1-indexed position i, the card below it must hold value
    54 - i, the fast joker must sit at least two places lower, and the top
    card's value must be at most i - 2; symmetrically for a leading fast
    joker with the count card two below it. Joker wrap interactions are
    ignored, matching the counting model in :func:`story_sums`.
    """
    if len(cards) != DECK_SIZE:
        raise ValueError("story conditions are defined for 54-card decks only")
    return story_case(cards) is not None


def story_case(cards) -> str | None:
    """Like :func:`story_conditions` but reports which joker leads."""
    i = cards.index(53) + 1
    g = cards.index(54) + 1
    v = cards[0]
    if g >= i + 2 and cards[i] == 54 - i and v <= i - 2:
        return "slow"
    if g <= 52 and cards[g + 1] == 53 - g and g + 3 <= i <= 53 and v <= g - 1:
        return "fast"
    return None


@dataclass(frozen=True)
class EntropyReport:
    """Per-character entropy of a repeat-biased stream vs the uniform reference."""

    q: float
    m: int
    entropy_nats: float
    entropy_bits: float
    uniform_nats: float
    uniform_bits: float
    leak_nats: float
    leak_bits: float


def entropy_leak(q: float, m: int = 26) -> EntropyReport:
    """Entropy of a stream repeating the previous symbol with probability q.

    The non-repeat mass (1-q) is spread uniformly over the other m-1 symbols:
    H = -q log q - (1-q) log((1-q)/(m-1)). The leak is log m - H, zero exactly
    at q = 1/m.
    """
    if not 0 < q < 1:
        raise ValueError("q must lie strictly between 0 and 1")
    if m < 2:
        raise ValueError("alphabet size must be at least 2")
    h_nats = -q * math.log(q) - (1 - q) * math.log((1 - q) / (m - 1))
    u_nats = math.log(m)
    ln2 = math.log(2)
    return EntropyReport(
        q=q,
        m=m,
        entropy_nats=h_nats,
        entropy_bits=h_nats / ln2,
        uniform_nats=u_nats,
        uniform_bits=u_nats / ln2,
        leak_nats=u_nats - h_nats,
        leak_bits=(u_nats - h_nats) / ln2,
    )


def adjacency_decay(s: int, start: int = ADJACENCY_PAIRS, kept: int = ADJACENCY_KEPT_PER_UPDATE) -> float:
    """Expected adjacencies preserved by s stacked updates: 53 * (45/53)**s."""
    if s < 0:
        raise ValueError("s must be non-negative")
    return start * (kept / start) ** s


def decay_threshold() -> int:
    """Smallest update count driving the geometric decay model below one."""
    s = 0
    while adjacency_decay(s) >= 1:
        s += 1
    return s


def linear_threshold() -> int:
    """Smallest update count s with 53 - 8s <= 1 (8 adjacencies lost per update)."""
    s = 0
    while ADJACENCY_PAIRS - (ADJACENCY_PAIRS - ADJACENCY_KEPT_PER_UPDATE) * s > 1:
        s += 1
    return s


@dataclass(frozen=True)
class AttackExpectation:
    """Expected counts separating a biased tally from its null competitors."""

    trials: int
    biased_count: float
    null_mean: float
    null_sd: float
    z_separation: float


def credential_expectations(sessions: int, repeat_rate: float = OBSERVED_LETTER_REPEAT_RATE, m: int = 26) -> AttackExpectation:
    """Tally expectations for the repeated-credential difference attack.

    Over N sessions the true adjacent-position difference shows up about
    N*b times while each of the other m-1 differences is binomial with mean
    N*(1-b)/(m-1).
    """
    if sessions < 0:
        raise ValueError("sessions must be non-negative")
    biased = sessions * repeat_rate
    null_p = (1 - repeat_rate) / (m - 1)
    null_mean = sessions * null_p
    null_sd = math.sqrt(sessions * null_p * (1 - null_p))
    z = (biased - null_mean) / null_sd if null_sd > 0 else 0.0
    return AttackExpectation(sessions, biased, null_mean, null_sd, z)


def causal_test_expectations(length: int, repeat_rate: float = OBSERVED_LETTER_REPEAT_RATE, m: int = 26) -> AttackExpectation:
    """Adjacent-repeat count expectations for a derived keystream of given length.

    A causally derived keystream repeats at rate b, an incoherent one at 1/m;
    the separation is reported in null standard deviations.
    """
    if length < 2:
        raise ValueError("keystream length must be at least 2")
    pairs = length - 1
    causal = pairs * repeat_rate
    null_mean = pairs / m
    null_sd = math.sqrt(pairs * (1 / m) * (1 - 1 / m))
    z = (causal - null_mean) / null_sd if null_sd > 0 else 0.0
    return AttackExpectation(length, causal, null_mean, null_sd, z)


def report() -> list[tuple[str, float | int | str, str]]:
    """Machine-readable (quantity, value, units) rows for every model constant."""
    bias = story_sums()
    pred = predicted_repeat_rate(bias.p)
    ent = entropy_leak(1 / 22.5, 26)
    cred = credential_expectations(50_000)
    causal = causal_test_expectations(10_000)
    rows: list[tuple[str, float | int | str, str]] = [
        ("story_slow_numerator", bias.slow_numerator, "count"),
        ("story_fast_numerator", bias.fast_numerator, "count"),
        ("story_denominator", bias.denominator, "count"),
        ("story_probability", bias.p, "probability"),
        ("story_probability_exact", f"{bias.p_exact.numerator}/{bias.p_exact.denominator}", "fraction"),
        ("predicted_repeat_rate", pred, "probability"),
        ("observed_letter_repeat_rate", OBSERVED_LETTER_REPEAT_RATE, "probability"),
        ("observed_raw_repeat_rate", OBSERVED_RAW_REPEAT_RATE, "probability"),
        ("entropy_biased_nats", ent.entropy_nats, "nats"),
        ("entropy_biased_bits", ent.entropy_bits, "bits"),
        ("entropy_uniform_nats", ent.uniform_nats, "nats"),
        ("entropy_uniform_bits", ent.uniform_bits, "bits"),
        ("entropy_leak_nats", ent.leak_nats, "nats"),
        ("entropy_leak_bits", ent.leak_bits, "bits"),
        ("adjacency_start", ADJACENCY_PAIRS, "count"),
        ("adjacency_kept_per_update", ADJACENCY_KEPT_PER_UPDATE, "count"),
        ("adjacency_linear_threshold", linear_threshold(), "updates"),
        ("adjacency_decay_threshold", decay_threshold(), "updates"),
        ("credential_sessions", cred.trials, "count"),
        ("credential_biased_count", cred.biased_count, "count"),
        ("credential_null_mean", cred.null_mean, "count"),
        ("credential_null_sd", cred.null_sd, "count"),
        ("causal_length", causal.trials, "count"),
        ("causal_repeat_mean", causal.biased_count, "count"),
        ("causal_null_mean", causal.null_mean, "count"),
        ("causal_null_sd", causal.null_sd, "count"),
        ("causal_z_separation", causal.z_separation, "sd"),
    ]
    return rows

"""Functional-graph analysis of the update map.

The update is not a bijection: the joker wrap rule lets distinct states map
to the same successor. This module enumerates pre-images of any state by
inverting the update stage by stage (the count cut and triple cut invert
uniquely; each joker advance splits into a swap origin and a wrap origin),
verifying every candidate with a forward update. For small decks it computes
the exhaustive census of the whole state space: in-degree histogram, image
size, cycle decomposition, and tail statistics. A random-bijection baseline
provides the comparison quantities.

States are addressed by their lexicographic rank via the factorial number
system, so censuses never store decks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .cipher import CipherState, triple_cut_cards, update_cards
from .deck import Deck, validate_deck
from .errors import BudgetExceededError

DEFAULT_STATE_BUDGET = math.factorial(9)


def rank_permutation(cards) -> int:
    """Lexicographic rank of a permutation of 1..n among all n! of them."""
    n = len(cards)
    rank = 0
    for i in range(n):
        smaller = sum(1 for j in range(i + 1, n) if cards[j] < cards[i])
        rank += smaller * math.factorial(n - 1 - i)
    return rank


def unrank_permutation(rank: int, n: int) -> Deck:
    """Inverse of :func:`rank_permutation` for permutations of 1..n."""
    if not 0 <= rank < math.factorial(n):
        raise ValueError(f"rank out of range for n={n}: {rank}")
    pool = list(range(1, n + 1))
    out = []
    for i in range(n):
        f = math.factorial(n - 1 - i)
        digit, rank = divmod(rank, f)
        out.append(pool.pop(digit))
    return tuple(out)


def _uncount_cut(cards: Deck) -> Deck:
    """Unique inverse of the count cut, keyed on the (fixed) bottom card."""
    n = len(cards)
    k = cards[-1]
    if k >= n - 1:
        return cards
    return cards[n - 1 - k : n - 1] + cards[: n - 1 - k] + (cards[-1],)


def _unrotate(cards: list) -> tuple:
    """Inverse of the joker wrap rotation (right rotation of the last n-1)."""
    return (cards[0],) + tuple(cards[2:]) + (cards[1],)


def _unadvance(cards: Deck, joker: int) -> list[Deck]:
    """All decks from which one advance of ``joker`` yields ``cards``."""
    n = len(cards)
    q = cards.index(joker) + 1  # 1-indexed position after the advance
    candidates: list[Deck] = []
    if q >= 3:
        work = list(cards)
        work[q - 1], work[q - 2] = work[q - 2], work[q - 1]
        candidates.append(tuple(work))
    elif q == 2:
        # swap origin: joker was on top
        work = list(cards)
        work[1], work[0] = work[0], work[1]
        candidates.append(tuple(work))
        # wrap origin: joker was at the bottom
        candidates.append(_unrotate(list(cards)))
    return candidates


def _unadvance_fast(cards: Deck) -> list[Deck]:
    """All decks from which the two-step fast advance yields ``cards``."""
    n = len(cards)
    out = []
    for mid in _unadvance(cards, n):
        out.extend(_unadvance(mid, n))
    return out


def preimage_candidates(cards: Deck) -> list[Deck]:
    """Stage-inverted candidates, before forward verification."""
    cards = validate_deck(cards)
    z = _uncount_cut(cards)
    w = triple_cut_cards(z)  # the triple cut is an involution
    out = []
    for mid in _unadvance_fast(w):
        out.extend(_unadvance(mid, len(cards) - 1))
    return out


def preimage_decks(cards: Deck) -> list[Deck]:
    """All decks whose update equals ``cards``, sorted, forward-verified."""
    cards = validate_deck(cards)
    found = {x for x in preimage_candidates(cards) if update_cards(x) == cards}
    return sorted(found)


def preimages(state: CipherState) -> set[CipherState]:
    """All states mapping to ``state`` under one update."""
    t = max(state.step_index - 1, 0)
    return {CipherState(d, t) for d in preimage_decks(state.deck)}


@dataclass(frozen=True)
class GraphCensus:
    """Exhaustive functional-graph census of the update map on n-card decks."""

    n: int
    state_count: int
    in_degree_hist: dict[int, int]
    image_size: int
    cycle_count: int
    cycle_lengths: tuple[int, ...]
    tail_states: int
    max_tail_length: int


def census(n: int, max_states: int = DEFAULT_STATE_BUDGET) -> GraphCensus:
    """Forward-evaluate the update over all n! states and classify the graph."""
    states = math.factorial(n)
    if states > max_states:
        raise BudgetExceededError(
            f"{n}! = {states} states exceeds the budget of {max_states}"
        )
    succ = np.empty(states, np.int64)
    for rank, perm in enumerate(itertools.permutations(range(1, n + 1))):
        succ[rank] = rank_permutation(update_cards(perm))

    indeg = np.bincount(succ, minlength=states)
    hist_vals, hist_counts = np.unique(indeg, return_counts=True)
    in_degree_hist = {int(v): int(c) for v, c in zip(hist_vals, hist_counts)}
    image_size = states - in_degree_hist.get(0, 0)

    color = np.zeros(states, np.uint8)  # 0 new, 1 on current path, 2 done
    dist = np.zeros(states, np.int64)  # steps to reach a cycle
    on_cycle = np.zeros(states, bool)
    cycle_lengths: list[int] = []
    for s0 in range(states):
        if color[s0]:
            continue
        path = []
        v = s0
        while color[v] == 0:
            color[v] = 1
            path.append(v)
            v = int(succ[v])
        if color[v] == 1:
            # closed a new cycle within the current path
            idx = len(path) - 1
            while path[idx] != v:
                idx -= 1
            cycle = path[idx:]
            cycle_lengths.append(len(cycle))
            for u in cycle:
                on_cycle[u] = True
                dist[u] = 0
            tail = path[:idx]
            base = 0
        else:
            tail = path
            base = int(dist[v])
        d = base
        for u in reversed(tail):
            d += 1
            dist[u] = d
        for u in path:
            color[u] = 2

    return GraphCensus(
        n=n,
        state_count=states,
        in_degree_hist=in_degree_hist,
        image_size=image_size,
        cycle_count=len(cycle_lengths),
        cycle_lengths=tuple(sorted(cycle_lengths)),
        tail_states=int((~on_cycle).sum()),
        max_tail_length=int(dist.max()),
    )


@dataclass(frozen=True)
class BijectionBaseline:
    """Reference cycle statistics for a uniform random bijection on N states."""

    states: int
    expected_cycles: float
    long_cycle_landmark: float  # 1 - 1/e

    def cycle_length_tail_prob(self, c: float) -> float:
        """P(a uniform state lies on a cycle of length >= c*N).

        For a uniform random permutation the cycle length through a fixed
        state is uniform on 1..N.
        """
        if not 0 <= c <= 1:
            raise ValueError("c must lie in [0, 1]")
        threshold = math.ceil(c * self.states)
        threshold = max(threshold, 1)
        return (self.states - threshold + 1) / self.states


def harmonic_number(n: int) -> float:
    """H_n, exactly summed up to 10**6 and asymptotically beyond."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n <= 10**6:
        return float(math.fsum(1 / k for k in range(1, n + 1)))
    g = 0.5772156649015329
    return math.log(n) + g + 1 / (2 * n) - 1 / (12 * n * n)


def bijection_baseline(states: int) -> BijectionBaseline:
    """Expected cycle count (harmonic number) and the long-cycle landmark."""
    if states < 1:
        raise ValueError("state count must be at least 1")
    return BijectionBaseline(
        states=states,
        expected_cycles=harmonic_number(states),
        long_cycle_landmark=1 - 1 / math.e,
    )

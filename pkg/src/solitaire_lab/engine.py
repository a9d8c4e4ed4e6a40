"""Numba-compiled bulk engine for keystream generation and Monte Carlo runs.

Mirrors the reference implementation in ``cipher`` on uint8 arrays; the test
suite cross-checks the two step for step. All randomness inside kernels is
SplitMix64, bit-identical to ``deck.SplitMix64``, so every bulk result is a
pure function of its seed on every platform.

Decks are ``np.uint8`` arrays of the values 1..n at 0-based positions. The
hot path tracks both joker positions across steps, so an update needs no
scanning: three O(1) joker moves, one pass writing the triple cut into a
scratch buffer, and one pass writing the count cut back.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .deck import DEFAULT_SIZE, Deck, validate_deck
from .errors import SolitaireError

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


@njit(cache=True, nogil=True, inline="always")
def _sm64(state):
    # SplitMix64; all operands stay uint64 so arithmetic wraps mod 2**64
    state = state + _GAMMA
    z = state
    z = (z ^ (z >> _S30)) * _MUL1
    z = (z ^ (z >> _S27)) * _MUL2
    return state, z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def _shuffle_into(d, state):
    n = d.shape[0]
    for i in range(n):
        d[i] = i + 1
    for i in range(n - 1, 0, -1):
        state, r = _sm64(state)
        j = int(r % np.uint64(i + 1))
        t = d[i]
        d[i] = d[j]
        d[j] = t
    return state


@njit(cache=True, nogil=True, inline="always")
def _find_jokers(d):
    n = d.shape[0]
    slow = -1
    fast = -1
    for p in range(n):
        v = int(d[p])
        if v == n - 1:
            slow = p
        elif v == n:
            fast = p
    return slow, fast


@njit(cache=True, nogil=True, inline="always")
def _advance_pos(d, val, i, other):
    # advance joker `val` at index i one place; `other` tracks the other joker
    n = d.shape[0]
    if i == n - 1:
        # wrap: right rotation of indices 1..n-1, joker re-enters at index 1
        t = d[n - 1]
        for p in range(n - 1, 1, -1):
            d[p] = d[p - 1]
        d[1] = t
        if 1 <= other <= n - 2:
            other += 1
        return 1, other
    d[i] = d[i + 1]
    d[i + 1] = val
    if other == i + 1:
        other = i
    return i + 1, other


@njit(cache=True, nogil=True, inline="always")
def _update_pos(d, s, slow, fast):
    # one full update in place (s is scratch); returns the new joker indices
    n = d.shape[0]
    slow, fast = _advance_pos(d, n - 1, slow, fast)
    fast, slow = _advance_pos(d, n, fast, slow)
    fast, slow = _advance_pos(d, n, fast, slow)
    if slow < fast:
        a = slow
        b = fast
    else:
        a = fast
        b = slow
    # triple cut into scratch
    w = 0
    for p in range(b + 1, n):
        s[w] = d[p]
        w += 1
    for p in range(a, b + 1):
        s[w] = d[p]
        w += 1
    for p in range(a):
        s[w] = d[p]
        w += 1
    nb = n - 1 - b
    slow_t = slow - a + nb
    fast_t = fast - a + nb
    # count cut back into the deck
    k = int(s[n - 1])
    if k >= n - 1:
        for p in range(n):
            d[p] = s[p]
        return slow_t, fast_t
    w = 0
    for p in range(k, n - 1):
        d[w] = s[p]
        w += 1
    for p in range(k):
        d[w] = s[p]
        w += 1
    d[n - 1] = s[n - 1]
    shift = n - 1 - k
    slow_t = slow_t - k if slow_t >= k else slow_t + shift
    fast_t = fast_t - k if fast_t >= k else fast_t + shift
    return slow_t, fast_t


@njit(cache=True, nogil=True, inline="always")
def _extract(d):
    n = d.shape[0]
    v = int(d[0])
    if v == n:
        return int(d[n - 1])
    return int(d[v])


@njit(cache=True, nogil=True)
def _update_once(d, s):
    slow, fast = _find_jokers(d)
    _update_pos(d, s, slow, fast)


@njit(cache=True, nogil=True, inline="always")
def _story_ok_pos(d, slow0, fast0):
    # 54-card causal-story placement predicate; i, g are 1-indexed positions
    i = slow0 + 1
    g = fast0 + 1
    v = int(d[0])
    if g >= i + 2 and int(d[i]) == 54 - i and v <= i - 2:
        return True
    if g <= 52 and int(d[g + 1]) == 53 - g and g + 3 <= i and i <= 53 and v <= g - 1:
        return True
    return False


@njit(cache=True, nogil=True)
def _keystream_raw(d, s, out):
    slow, fast = _find_jokers(d)
    for t in range(out.shape[0]):
        slow, fast = _update_pos(d, s, slow, fast)
        out[t] = _extract(d)


@njit(cache=True, nogil=True)
def _keystream_letters(d, s, out, mod, limit):
    n = d.shape[0]
    want = out.shape[0]
    slow, fast = _find_jokers(d)
    got = 0
    steps = 0
    while got < want and steps < limit:
        slow, fast = _update_pos(d, s, slow, fast)
        steps += 1
        v = _extract(d)
        if v <= n - 2:
            out[got] = ((v - 1) % mod) + 1
            got += 1
    return got, steps


@njit(cache=True, nogil=True)
def _traced_light(d, s, raw, top, flag):
    slow, fast = _find_jokers(d)
    for t in range(raw.shape[0]):
        flag[t] = 1 if _story_ok_pos(d, slow, fast) else 0
        slow, fast = _update_pos(d, s, slow, fast)
        raw[t] = _extract(d)
        top[t] = d[0]


@njit(cache=True, nogil=True)
def _traced_full(d, s, raw, top, flag, slow_b, slow_a, fast_b, fast_a, bottom):
    n = d.shape[0]
    slow, fast = _find_jokers(d)
    for t in range(raw.shape[0]):
        flag[t] = 1 if (n == 54 and _story_ok_pos(d, slow, fast)) else 0
        slow_b[t] = slow + 1
        fast_b[t] = fast + 1
        slow, fast = _update_pos(d, s, slow, fast)
        raw[t] = _extract(d)
        top[t] = d[0]
        bottom[t] = d[n - 1]
        slow_a[t] = slow + 1
        fast_a[t] = fast + 1


@njit(cache=True, nogil=True)
def _story_mc(seed, trials):
    d = np.empty(54, np.uint8)
    st = seed
    hits = 0
    for _ in range(trials):
        st = _shuffle_into(d, st)
        slow, fast = _find_jokers(d)
        if _story_ok_pos(d, slow, fast):
            hits += 1
    return hits


@njit(cache=True, nogil=True)
def _fuzz_updates(seed, trials, n):
    d = np.empty(n, np.uint8)
    s = np.empty(n, np.uint8)
    seen = np.empty(n + 1, np.uint8)
    st = seed
    bad = 0
    for _ in range(trials):
        st = _shuffle_into(d, st)
        _update_once(d, s)
        for v in range(n + 1):
            seen[v] = 0
        ok = True
        for p in range(n):
            v = int(d[p])
            if v < 1 or v > n or seen[v] != 0:
                ok = False
                break
            seen[v] = 1
        if not ok:
            bad += 1
    return bad


@njit(cache=True, nogil=True)
def _adjacency_total(seed, trials, n):
    d = np.empty(n, np.uint8)
    st = seed
    total = 0
    for _ in range(trials):
        st = _shuffle_into(d, st)
        for p in range(n - 1):
            if int(d[p + 1]) == int(d[p]) + 1:
                total += 1
    return total


@njit(cache=True, nogil=True)
def _preserved_total(seed, trials, n, repeats):
    d = np.empty(n, np.uint8)
    s = np.empty(n, np.uint8)
    succ = np.zeros(n + 1, np.uint8)
    st = seed
    total = 0
    for _ in range(trials):
        st = _shuffle_into(d, st)
        for v in range(n + 1):
            succ[v] = 0
        for p in range(n - 1):
            succ[int(d[p])] = d[p + 1]
        slow, fast = _find_jokers(d)
        for _ in range(repeats):
            slow, fast = _update_pos(d, s, slow, fast)
        for p in range(n - 1):
            if int(succ[int(d[p])]) == int(d[p + 1]):
                total += 1
    return total


@njit(cache=True, nogil=True)
def _shuffle_top_hist(seed, trials, hist):
    d = np.empty(54, np.uint8)
    st = seed
    for _ in range(trials):
        st = _shuffle_into(d, st)
        hist[int(d[0]) - 1] += 1


@njit(cache=True, nogil=True)
def _credential(seed, sessions, cred, tallies):
    length = cred.shape[0]
    d = np.empty(54, np.uint8)
    s = np.empty(54, np.uint8)
    c = np.empty(length, np.int64)
    st = seed
    for _ in range(sessions):
        st = _shuffle_into(d, st)
        slow, fast = _find_jokers(d)
        got = 0
        while got < length:
            slow, fast = _update_pos(d, s, slow, fast)
            v = _extract(d)
            if v <= 52:
                k = ((v - 1) % 26) + 1
                c[got] = ((int(cred[got]) + k - 2) % 26) + 1
                got += 1
        for pos in range(length - 1):
            tallies[pos, (c[pos + 1] - c[pos]) % 26] += 1


@njit(cache=True, nogil=True, inline="always")
def _variant_extract(d, kind):
    n = d.shape[0]
    if kind == 1:
        return int(d[(int(d[0]) + int(d[1]) - 1) % n])
    v = int(d[0])
    t = int(d[n - 1]) if v == n else int(d[v])
    if kind == 2:
        t = int(d[n - 1]) if t == n else int(d[t])
    return t


@njit(cache=True, nogil=True)
def _variant_raw(d, s, out, kind, repeats):
    slow, fast = _find_jokers(d)
    for t in range(out.shape[0]):
        for _ in range(repeats):
            slow, fast = _update_pos(d, s, slow, fast)
        out[t] = _variant_extract(d, kind)


@njit(cache=True, nogil=True)
def _variant_letters(d, s, out, kind, repeats, mod, limit):
    n = d.shape[0]
    want = out.shape[0]
    slow, fast = _find_jokers(d)
    got = 0
    outputs = 0
    while got < want and outputs < limit:
        for _ in range(repeats):
            slow, fast = _update_pos(d, s, slow, fast)
        outputs += 1
        v = _variant_extract(d, kind)
        if v <= n - 2:
            out[got] = ((v - 1) % mod) + 1
            got += 1
    return got, outputs


def _letter_modulus(n: int) -> int:
    return 26 if n == DEFAULT_SIZE else n - 2


def deck_array(source, n: int = DEFAULT_SIZE) -> np.ndarray:
    """Coerce a seed, card sequence, or array into a fresh uint8 deck array."""
    if isinstance(source, (int, np.integer)):
        d = np.empty(n, np.uint8)
        _shuffle_into(d, np.uint64(int(source)))
        return d
    if isinstance(source, np.ndarray):
        validate_deck(source.tolist())
        return source.astype(np.uint8, copy=True)
    cards = validate_deck(source)
    return np.array(cards, dtype=np.uint8)


def shuffled_deck(seed: int, n: int = DEFAULT_SIZE) -> Deck:
    """Kernel-side Fisher-Yates shuffle; bit-identical to ``deck.shuffle``."""
    return tuple(int(v) for v in deck_array(int(seed), n))


def update_array(d: np.ndarray) -> None:
    """Apply one update in place (testing and small-scale use)."""
    _update_once(d, np.empty_like(d))


def story_ok_array(d: np.ndarray) -> bool:
    slow, fast = _find_jokers(d)
    return bool(_story_ok_pos(d, slow, fast))


class StreamGenerator:
    """Stateful bulk keystream source over a deck array.

    ``source`` may be a seed (int), a card sequence, or a uint8 array. The
    deck advances in place across calls, so consecutive calls continue the
    same stream. ``updates`` counts cipher steps taken so far.
    """

    def __init__(self, source, n: int = DEFAULT_SIZE):
        self.deck = deck_array(source, n)
        self.n = self.deck.shape[0]
        self._scratch = np.empty_like(self.deck)
        self.updates = 0

    @property
    def deck_tuple(self) -> Deck:
        return tuple(int(v) for v in self.deck)

    def raw(self, count: int) -> np.ndarray:
        out = np.empty(int(count), np.uint8)
        _keystream_raw(self.deck, self._scratch, out)
        self.updates += int(count)
        return out

    def letters(self, count: int) -> np.ndarray:
        return self._skip_jokers(count, _letter_modulus(self.n))

    def values(self, count: int) -> np.ndarray:
        """Joker-dropped outputs without the letter fold (values 1..n-2)."""
        return self._skip_jokers(count, self.n - 2)

    def _skip_jokers(self, count: int, mod: int) -> np.ndarray:
        count = int(count)
        out = np.empty(count, np.uint8)
        limit = 64 * count + 6400
        got, steps = _keystream_letters(self.deck, self._scratch, out, mod, limit)
        self.updates += int(steps)
        if got < count:
            raise SolitaireError("letter generation stalled: joker-only outputs")
        return out


def traced_run(source, steps: int, n: int = DEFAULT_SIZE):
    """Run ``steps`` updates, recording per step the raw output, the top card
    at extraction, and the pre-update story flag. Returns (raw, top, flag).
    """
    d = deck_array(source, n)
    if d.shape[0] != 54:
        raise SolitaireError("traced runs require a 54-card deck")
    steps = int(steps)
    raw = np.empty(steps, np.uint8)
    top = np.empty(steps, np.uint8)
    flag = np.empty(steps, np.uint8)
    _traced_light(d, np.empty_like(d), raw, top, flag)
    return raw, top, flag.astype(bool)


def traced_run_full(source, steps: int, n: int = DEFAULT_SIZE):
    """Full trace arrays: raw, top, flag, slow/fast positions before and after,
    and the bottom card after each update."""
    d = deck_array(source, n)
    steps = int(steps)
    raw = np.empty(steps, np.uint8)
    top = np.empty(steps, np.uint8)
    flag = np.empty(steps, np.uint8)
    slow_b = np.empty(steps, np.uint8)
    slow_a = np.empty(steps, np.uint8)
    fast_b = np.empty(steps, np.uint8)
    fast_a = np.empty(steps, np.uint8)
    bottom = np.empty(steps, np.uint8)
    _traced_full(d, np.empty_like(d), raw, top, flag, slow_b, slow_a, fast_b, fast_a, bottom)
    return raw, top, flag.astype(bool), slow_b, slow_a, fast_b, fast_a, bottom


def story_fraction(seed: int, trials: int) -> float:
    """Fraction of uniformly shuffled decks satisfying the story conditions."""
    trials = int(trials)
    return _story_mc(np.uint64(seed), trials) / trials


def fuzz_invalid_count(seed: int, trials: int, n: int = DEFAULT_SIZE) -> int:
    """Number of shuffled decks whose update output is not a permutation."""
    return int(_fuzz_updates(np.uint64(seed), int(trials), n))


def mean_adjacency(seed: int, trials: int, n: int = DEFAULT_SIZE) -> float:
    """Mean adjacency count over uniformly shuffled decks."""
    trials = int(trials)
    return _adjacency_total(np.uint64(seed), trials, n) / trials


def mean_preserved(seed: int, trials: int, n: int = DEFAULT_SIZE, repeats: int = 1) -> float:
    """Mean adjacencies a deck shares with its image under ``repeats`` updates."""
    trials = int(trials)
    return _preserved_total(np.uint64(seed), trials, n, repeats) / trials


def shuffle_top_histogram(seed: int, trials: int) -> np.ndarray:
    """Histogram (index 0 = value 1) of the top card over shuffled decks."""
    hist = np.zeros(54, np.int64)
    _shuffle_top_hist(np.uint64(seed), int(trials), hist)
    return hist


def credential_tallies(seed: int, sessions: int, cred_values) -> np.ndarray:
    """Difference tallies for the repeated-credential attack.

    Each session draws a fresh shuffled deck, encrypts the credential, and
    tallies the ciphertext difference (next - previous) mod 26 per adjacent
    position. Returns an int64 array of shape (len-1, 26).
    """
    cred = np.asarray(cred_values, np.uint8)
    if cred.ndim != 1 or cred.shape[0] < 2:
        raise ValueError("credential must have at least 2 letters")
    if cred.min() < 1 or cred.max() > 26:
        raise ValueError("credential values must lie in 1..26")
    tallies = np.zeros((cred.shape[0] - 1, 26), np.int64)
    _credential(np.uint64(seed), int(sessions), cred, tallies)
    return tallies


def variant_stream(source, length: int, kind_id: int, repeats: int, mode: str = "letters", n: int = DEFAULT_SIZE) -> np.ndarray:
    """Bulk keystream for a modified extraction/update scheme.

    ``kind_id``: 0 standard extraction, 1 sum-indexed (uses the top two card
    values), 2 doubly dereferenced. ``repeats`` stacks that many updates
    before each extraction.
    """
    if repeats < 1:
        raise ValueError("update repeats must be at least 1")
    if kind_id not in (0, 1, 2):
        raise ValueError(f"unknown variant kind id: {kind_id}")
    d = deck_array(source, n)
    s = np.empty_like(d)
    length = int(length)
    out = np.empty(length, np.uint8)
    if mode == "raw":
        _variant_raw(d, s, out, kind_id, repeats)
        return out
    if mode == "letters":
        mod = _letter_modulus(d.shape[0])
    elif mode == "values":
        mod = d.shape[0] - 2
    else:
        raise ValueError(f"unknown keystream mode: {mode!r}")
    limit = 64 * length + 6400
    got, _ = _variant_letters(d, s, out, kind_id, repeats, mod, limit)
    if got < length:
        raise SolitaireError("letter generation stalled: joker-only outputs")
    return out


def measure_update_rate(updates: int = 5_000_000, seed: int = 1, best_of: int = 3) -> float:
    """Measured cipher updates per second for the raw keystream kernel."""
    import time

    gen = StreamGenerator(seed)
    gen.raw(1000)  # warm the JIT before timing
    best = 0.0
    for _ in range(best_of):
        t0 = time.perf_counter()
        gen.raw(updates)
        dt = time.perf_counter() - t0
        best = max(best, updates / dt)
    return best

"""Streaming, mergeable statistics over keystreams.

A :class:`StreamStats` accumulator ingests a stream in chunks of any size and
keeps exact counts of per-symbol frequencies, distance-d repeats (d up to a
configurable bound), and constant windows of length 3..5 (overlapping: every
position starts a window). Memory is O(modulus + max_distance), independent
of stream length.

Merging two accumulators models concatenating their streams with a gap in
between: counters add and no repeat or window is counted across the boundary.
Shards of a long run can therefore be accumulated independently (one seeded
deck per shard) and merged in shard order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, InsufficientDataError, ModulusMismatchError

DEFAULT_MAX_DISTANCE = 26
_WINDOW_SIZES = (3, 4, 5)


@dataclass(frozen=True)
class TupleRates:
    """Per-position probabilities of constant windows and their ratios."""

    rate3: float
    rate4: float
    rate5: float
    ratio_1_3: float
    ratio_3_4: float
    ratio_4_5: float


class StreamStats:
    """Exact streaming counters for a symbol stream over 1..modulus."""

    def __init__(self, modulus: int, max_distance: int = DEFAULT_MAX_DISTANCE):
        if not 2 <= modulus <= 254:
            raise ValueError("modulus must lie in 2..254")
        if max_distance < 1:
            raise ValueError("max_distance must be at least 1")
        self.modulus = modulus
        self.max_distance = max_distance
        self.length = 0
        self.freq = np.zeros(modulus, np.int64)
        self.repeats = np.zeros(max_distance + 1, np.int64)
        self.window_counts = {r: 0 for r in _WINDOW_SIZES}
        self._tail_cap = max(max_distance, _WINDOW_SIZES[-1] - 1)
        self._tail = np.empty(0, np.uint8)

    def accumulate(self, chunk) -> "StreamStats":
        """Ingest a chunk of symbols; returns self for chaining."""
        data = np.asarray(chunk)
        if data.size == 0:
            return self
        if data.ndim != 1:
            raise ValueError("chunks must be one-dimensional")
        lo = int(data.min())
        hi = int(data.max())
        if lo < 1 or hi > self.modulus:
            raise ModulusMismatchError(
                f"symbols in [{lo}, {hi}] do not fit modulus {self.modulus}"
            )
        data = data.astype(np.uint8, copy=False)
        self.freq += np.bincount(data, minlength=self.modulus + 1)[1:]

        t = self._tail.shape[0]
        ext = np.concatenate([self._tail, data])
        total = ext.shape[0]
        for d in range(1, self.max_distance + 1):
            start = max(t, d)
            if total > start:
                self.repeats[d] += int(
                    np.count_nonzero(ext[start:] == ext[start - d : total - d])
                )
        if total >= 2:
            eq = ext[1:] == ext[:-1]
            run = eq
            for r in _WINDOW_SIZES:
                # run[i] == True means ext[i : i + r] is constant
                run = run[:-1] & eq[r - 2 :]
                if run.size:
                    first = max(t - r + 1, 0)
                    self.window_counts[r] += int(np.count_nonzero(run[first:]))
        self.length += int(data.shape[0])
        keep = min(self._tail_cap, total)
        self._tail = ext[total - keep :].copy()
        return self

    def merge(self, other: "StreamStats") -> "StreamStats":
        """Combine with another accumulator; no counter bridges the gap.

        The result continues the right-hand stream: accumulating into it
        behaves as if the merged stream ended with ``other``'s symbols.
        """
        if not isinstance(other, StreamStats):
            raise TypeError("can only merge StreamStats")
        if other.modulus != self.modulus:
            raise ModulusMismatchError(
                f"modulus mismatch: {self.modulus} vs {other.modulus}"
            )
        if other.max_distance != self.max_distance:
            raise ModulusMismatchError(
                f"max_distance mismatch: {self.max_distance} vs {other.max_distance}"
            )
        out = StreamStats(self.modulus, self.max_distance)
        out.length = self.length + other.length
        out.freq = self.freq + other.freq
        out.repeats = self.repeats + other.repeats
        out.window_counts = {
            r: self.window_counts[r] + other.window_counts[r] for r in _WINDOW_SIZES
        }
        out._tail = other._tail.copy()
        return out

    def repeat_rate(self, d: int) -> float:
        """Fraction of symbol pairs at distance d that are equal."""
        if not 1 <= d <= self.max_distance:
            raise ValueError(f"distance must lie in 1..{self.max_distance}")
        if self.length <= d:
            raise InsufficientDataError(f"need more than {d} symbols")
        return int(self.repeats[d]) / (self.length - d)

    def tuple_rates(self) -> TupleRates:
        """Constant-window probabilities for lengths 3, 4, 5 and their ratios."""
        if self.length < 5:
            raise InsufficientDataError("need at least 5 symbols")
        rates = {r: self.window_counts[r] / (self.length - r + 1) for r in _WINDOW_SIZES}
        r1 = self.repeat_rate(1)

        def ratio(a, b):
            return a / b if b > 0 else math.inf

        return TupleRates(
            rate3=rates[3],
            rate4=rates[4],
            rate5=rates[5],
            ratio_1_3=ratio(r1, rates[3]),
            ratio_3_4=ratio(rates[3], rates[4]),
            ratio_4_5=ratio(rates[4], rates[5]),
        )

    def uniformity_chi2(self) -> tuple[float, int]:
        """Pearson chi-square statistic against uniform, with degrees of freedom."""
        if self.length < 100 * self.modulus:
            raise InsufficientDataError(
                f"need at least {100 * self.modulus} symbols for the chi-square check"
            )
        expected = self.length / self.modulus
        stat = float(((self.freq - expected) ** 2 / expected).sum())
        return stat, self.modulus - 1

    def distance_profile(self) -> list[tuple[int, float, float]]:
        """(d, rate, stderr) rows for every tracked distance."""
        rows = []
        for d in range(1, self.max_distance + 1):
            if self.length <= d:
                break
            rate = self.repeat_rate(d)
            pairs = self.length - d
            stderr = math.sqrt(max(rate * (1 - rate), 0.0) / pairs)
            rows.append((d, rate, stderr))
        return rows

    def footprint_bytes(self) -> int:
        """Size of the internal counters; constant for a fixed configuration."""
        return int(self.freq.nbytes + self.repeats.nbytes + self._tail_cap)


@dataclass(frozen=True)
class TopCardHistogram:
    """Counts of the dereferenced (top) card value at distance-1 repeat events."""

    counts: np.ndarray  # index 0 unused; 1..54 are card values

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def level_shift_z(self, lo_band: tuple[int, int], hi_band: tuple[int, int]) -> float:
        """z-score of mean(lo_band) - mean(hi_band), Poisson variance per bin."""
        lo = self.counts[lo_band[0] : lo_band[1] + 1].astype(np.float64)
        hi = self.counts[hi_band[0] : hi_band[1] + 1].astype(np.float64)
        diff = lo.mean() - hi.mean()
        var = lo.sum() / lo.size**2 + hi.sum() / hi.size**2
        return diff / math.sqrt(var) if var > 0 else math.inf


def top_card_on_repeat(top_cards, raw) -> TopCardHistogram:
    """Histogram of the top card at steps whose raw output repeats the previous.

    ``top_cards[t]`` must be the deck's top card when ``raw[t]`` was extracted.
    """
    top = np.asarray(top_cards)
    stream = np.asarray(raw)
    if top.shape != stream.shape:
        raise AlignmentError(
            f"trace/stream length mismatch: {top.shape} vs {stream.shape}"
        )
    counts = np.zeros(55, np.int64)
    if stream.shape[0] >= 2:
        events = stream[1:] == stream[:-1]
        counts += np.bincount(top[1:][events], minlength=55)[:55]
    return TopCardHistogram(counts)


def traces_to_arrays(traces) -> tuple[np.ndarray, np.ndarray]:
    """Top-card and raw-output arrays from a list of StepTrace records."""
    top = np.fromiter((t.top_card_value for t in traces), np.uint8, len(traces))
    raw = np.fromiter((t.extracted_value for t in traces), np.uint8, len(traces))
    return top, raw

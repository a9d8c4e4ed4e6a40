"""Cryptanalysis workbench for the Solitaire hand cipher.

A bit-exact cipher engine (reference implementation plus a numba-compiled
bulk twin), streaming keystream statistics, closed-form bias models,
functional-graph analysis of the update map, and simulations of two
keystream-bias attacks. See README.md for the command-line interface and the
acceptance battery.
"""

__version__ = "0.1.0"

from .cipher import (
    CipherState,
    Keystream,
    StepTrace,
    decrypt,
    encrypt,
    extract,
    keystream,
    keystream_traced,
    update,
)
from .deck import (
    Deck,
    adjacencies_preserved,
    adjacency_count,
    card_to_number,
    format_deck,
    number_to_card,
    parse_deck,
    shuffle,
)
from .errors import SolitaireError
from .model import entropy_leak, predicted_repeat_rate, story_conditions, story_sums
from .stats import StreamStats, TopCardHistogram, top_card_on_repeat
from .variants import VariantSpec, pair_sum_census, parse_variant_spec, variant_keystream

__all__ = [
    "CipherState",
    "Deck",
    "Keystream",
    "SolitaireError",
    "StepTrace",
    "StreamStats",
    "TopCardHistogram",
    "VariantSpec",
    "__version__",
    "adjacencies_preserved",
    "adjacency_count",
    "card_to_number",
    "decrypt",
    "encrypt",
    "entropy_leak",
    "extract",
    "format_deck",
    "keystream",
    "keystream_traced",
    "number_to_card",
    "pair_sum_census",
    "parse_deck",
    "parse_variant_spec",
    "predicted_repeat_rate",
    "shuffle",
    "story_conditions",
    "story_sums",
    "top_card_on_repeat",
    "update",
    "variant_keystream",
]

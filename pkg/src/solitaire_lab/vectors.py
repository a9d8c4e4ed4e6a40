"""Golden vectors for the update pipeline, hand-checked card by card.

Two fully worked 54-card examples: one exercising every stage of a single
update (joker moves, triple cut, count cut), and one walkthrough of the
causal repeat arrangement whose extraction survives an update unchanged.
All decks are row-major tuples, 1-indexed positions 1..54 left to right.
"""

WORKED_DECK = (
    26, 10, 43, 6, 29, 1, 28, 53, 14,
    38, 27, 47, 32, 20, 34, 9, 19, 4,
    18, 24, 2, 39, 35, 33, 51, 7, 3,
    36, 8, 16, 54, 15, 11, 25, 21, 31,
    44, 52, 40, 50, 49, 17, 41, 22, 5,
    23, 42, 37, 13, 48, 46, 12, 30, 45,
)

WORKED_DECK_CARDS = (
    "KD 10C 4S 6C 3H AC 2H jo AD "
    "QH AH 8S 6H 7D 8H 9C 6D 4C "
    "5D JD 2C KH 9H 7H QS 7C 3C "
    "10H 8C 3D JO 2D JC QD 8D 5H "
    "5S KS AS JS 10S 4D 2S 9D 5C "
    "10D 3S JH KC 9S 7S QC 4H 6S"
)

WORKED_EXTRACT = 3  # top card 26 dereferences position 27

WORKED_AFTER_JOKERS = (
    26, 10, 43, 6, 29, 1, 28, 14, 53,
    38, 27, 47, 32, 20, 34, 9, 19, 4,
    18, 24, 2, 39, 35, 33, 51, 7, 3,
    36, 8, 16, 15, 11, 54, 25, 21, 31,
    44, 52, 40, 50, 49, 17, 41, 22, 5,
    23, 42, 37, 13, 48, 46, 12, 30, 45,
)

WORKED_AFTER_TRIPLE = (
    25, 21, 31, 44, 52, 40, 50, 49, 17,
    41, 22, 5, 23, 42, 37, 13, 48, 46,
    12, 30, 45, 53, 38, 27, 47, 32, 20,
    34, 9, 19, 4, 18, 24, 2, 39, 35,
    33, 51, 7, 3, 36, 8, 16, 15, 11,
    54, 26, 10, 43, 6, 29, 1, 28, 14,
)

WORKED_AFTER_COUNT = (
    37, 13, 48, 46, 12, 30, 45, 53, 38,
    27, 47, 32, 20, 34, 9, 19, 4, 18,
    24, 2, 39, 35, 33, 51, 7, 3, 36,
    8, 16, 15, 11, 54, 26, 10, 43, 6,
    29, 1, 28, 25, 21, 31, 44, 52, 40,
    50, 49, 17, 41, 22, 5, 23, 42, 14,
)

# Walkthrough of the repeat arrangement: top card 3 extracts the 6; after one
# full update the top block is restored and the extraction repeats.
REPEAT_DECK = (
    3, 10, 43, 6, 29, 1, 28, 53, 46,
    38, 27, 14, 32, 20, 34, 9, 19, 4,
    18, 24, 2, 39, 35, 33, 51, 7, 26,
    36, 8, 16, 54, 15, 11, 25, 21, 31,
    44, 52, 40, 50, 49, 17, 41, 22, 5,
    23, 42, 37, 13, 48, 47, 12, 30, 45,
)

REPEAT_EXTRACT = 6

REPEAT_AFTER_JOKERS = (
    3, 10, 43, 6, 29, 1, 28, 46, 53,
    38, 27, 14, 32, 20, 34, 9, 19, 4,
    18, 24, 2, 39, 35, 33, 51, 7, 26,
    36, 8, 16, 15, 11, 54, 25, 21, 31,
    44, 52, 40, 50, 49, 17, 41, 22, 5,
    23, 42, 37, 13, 48, 47, 12, 30, 45,
)

REPEAT_AFTER_TRIPLE = (
    25, 21, 31, 44, 52, 40, 50, 49, 17,
    41, 22, 5, 23, 42, 37, 13, 48, 47,
    12, 30, 45, 53, 38, 27, 14, 32, 20,
    34, 9, 19, 4, 18, 24, 2, 39, 35,
    33, 51, 7, 26, 36, 8, 16, 15, 11,
    54, 3, 10, 43, 6, 29, 1, 28, 46,
)

REPEAT_AFTER_COUNT = (
    3, 10, 43, 6, 29, 1, 28, 25, 21,
    31, 44, 52, 40, 50, 49, 17, 41, 22,
    5, 23, 42, 37, 13, 48, 47, 12, 30,
    45, 53, 38, 27, 14, 32, 20, 34, 9,
    19, 4, 18, 24, 2, 39, 35, 33, 51,
    7, 26, 36, 8, 16, 15, 11, 54, 46,
)

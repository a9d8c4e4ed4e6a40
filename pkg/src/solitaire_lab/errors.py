"""Exception hierarchy shared across the package."""


class SolitaireError(Exception):
    """Base class for all errors raised by solitaire_lab."""


class InvalidDeckError(SolitaireError):
    """A card sequence is not a valid permutation of 1..n."""


class DeckFormatError(SolitaireError):
    """Deck or card text could not be parsed."""


class InsufficientDataError(SolitaireError):
    """A statistic was requested from an accumulator with too little data."""


class ModulusMismatchError(SolitaireError):
    """Stream values do not fit the accumulator's modulus."""


class BudgetExceededError(SolitaireError):
    """An exhaustive computation would exceed its configured state budget."""


class AlignmentError(SolitaireError):
    """Paired inputs (trace/stream, ciphertext/plaintext) have mismatched lengths."""

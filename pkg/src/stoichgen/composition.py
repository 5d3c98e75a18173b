"""Composition values, formula parsing/formatting and the matrix codec.

A composition is a multiset of elements with integer atom counts. The codec
maps it to a binary matrix with MAX_ATOMS rows and one column per vocabulary
element: count k puts a single 1 in row k-1, an absent element leaves its
column all zero.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .elements import ATOMIC_NUMBERS, ElementVocabulary
from .errors import (
    CountRangeError,
    FormulaError,
    FractionalCountError,
    MissingElementError,
)

# Rows of the composition matrix; also the per-element atom-count cap.
MAX_ATOMS = 8

_TOKEN = re.compile(r"([A-Z][a-z]?)(\d+\.\d+|\.\d+|\d+)?")


@dataclass(frozen=True)
class Composition:
    """Element -> atom-count multiset, stored in atomic-number order."""

    items: tuple[tuple[str, int], ...]

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "Composition":
        for symbol, count in counts.items():
            if symbol not in ATOMIC_NUMBERS:
                raise FormulaError(f"unknown element symbol {symbol!r}")
            if not isinstance(count, int) or count < 1:
                raise FormulaError(f"count for {symbol} must be a positive integer, got {count!r}")
        ordered = sorted(counts.items(), key=lambda kv: ATOMIC_NUMBERS[kv[0]])
        return cls(tuple(ordered))

    @property
    def counts(self) -> dict[str, int]:
        return dict(self.items)

    @property
    def elements(self) -> tuple[str, ...]:
        return tuple(sym for sym, _ in self.items)

    @property
    def arity(self) -> int:
        return len(self.items)

    @property
    def total_atoms(self) -> int:
        return sum(count for _, count in self.items)

    def __repr__(self) -> str:
        return f"Composition({format_formula(self)!r})"


EMPTY_COMPOSITION = Composition(())


def parse_formula(text: str) -> Composition:
    """Parse a formula string like 'Fe2O3' or 'LiFePO4' (implicit 1s allowed).

    Repeated element tokens sum. Fractional counts (doped formulas such as
    'LiZn0.01Fe0.99PO4') are rejected: only integer stoichiometries are
    representable.
    """
    if not isinstance(text, str) or not text.strip():
        raise FormulaError("empty formula")
    s = text.strip()
    counts: dict[str, int] = {}
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if m is None or m.start() != pos:
            raise FormulaError(f"cannot parse formula {text!r} at position {pos}")
        symbol, count_text = m.group(1), m.group(2)
        if symbol not in ATOMIC_NUMBERS:
            raise FormulaError(f"unknown element token {symbol!r} in {text!r}")
        if count_text is None:
            count = 1
        elif "." in count_text:
            raise FractionalCountError(
                f"fractional count {count_text!r} for {symbol} in {text!r}"
            )
        else:
            count = int(count_text)
            if count == 0:
                raise FormulaError(f"zero count for {symbol} in {text!r}")
        counts[symbol] = counts.get(symbol, 0) + count
        pos = m.end()
    return Composition.from_counts(counts)


def format_formula(comp: Composition) -> str:
    """Canonical formula: ascending atomic number, counts always explicit."""
    return "".join(f"{sym}{count}" for sym, count in comp.items)


def canonical_formula(value) -> str:
    """Canonical key for set membership; accepts Composition or formula text."""
    if isinstance(value, Composition):
        return format_formula(value)
    return format_formula(parse_formula(value))


def _encode_into(matrix, comp, index, rows):
    for symbol, count in comp.items:
        col = index.get(symbol)
        if col is None:
            raise MissingElementError(symbol, "not in vocabulary")
        if count > rows:
            raise CountRangeError(
                f"count {count} for {symbol} exceeds the {rows}-atom encoding range"
            )
        matrix[count - 1, col] = 1.0


def encode_composition(comp: Composition, vocabulary, rows: int = MAX_ATOMS) -> np.ndarray:
    """Encode a composition as a rows x size binary matrix (float32).

    `vocabulary` may be an ElementVocabulary or a plain symbol sequence.
    """
    symbols = _column_symbols(vocabulary)
    matrix = np.zeros((rows, len(symbols)), dtype=np.float32)
    _encode_into(matrix, comp, {s: j for j, s in enumerate(symbols)}, rows)
    return matrix


def encode_batch(
    comps: Iterable[Composition], vocabulary, rows: int = MAX_ATOMS
) -> np.ndarray:
    symbols = _column_symbols(vocabulary)
    index = {s: j for j, s in enumerate(symbols)}
    comps = list(comps)
    out = np.zeros((len(comps), rows, len(symbols)), dtype=np.float32)
    for i, comp in enumerate(comps):
        _encode_into(out[i], comp, index, rows)
    return out


def _column_symbols(vocabulary) -> tuple[str, ...]:
    if isinstance(vocabulary, ElementVocabulary):
        return vocabulary.symbols
    return tuple(vocabulary)


def decode_activation(
    matrix: np.ndarray, vocabulary, threshold: float = 0.5
) -> Composition:
    """Discretize an activation matrix back into a composition.

    Per column: the argmax row wins (ties go to the lowest row, i.e. the
    smallest count); the element is present with count row+1 iff the maximum
    activation reaches the threshold. May return the empty composition.
    `vocabulary` may be an ElementVocabulary or a plain symbol sequence.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    symbols = _column_symbols(vocabulary)
    m = np.asarray(matrix)
    if m.ndim == 3 and m.shape[0] == 1:
        m = m[0]
    if m.ndim != 2 or m.shape[1] != len(symbols):
        raise ValueError(
            f"activation matrix shape {m.shape} does not match vocabulary size "
            f"{len(symbols)}"
        )
    rows = np.argmax(m, axis=0)  # first max = lowest row on ties
    peaks = m[rows, np.arange(m.shape[1])]
    counts = {
        symbols[j]: int(rows[j]) + 1 for j in np.nonzero(peaks >= threshold)[0]
    }
    if not counts:
        return EMPTY_COMPOSITION
    return Composition.from_counts(counts)


def decode_batch(
    matrices: np.ndarray, vocabulary, threshold: float = 0.5
) -> list[Composition]:
    symbols = _column_symbols(vocabulary)
    return [decode_activation(m, symbols, threshold) for m in matrices]

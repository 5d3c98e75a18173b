"""Synthetic desk-scale task: valid binaries over a fixed 12-element vocabulary.

Used by the test suite and the example scripts. The vocabulary mixes
single-state cations with two anions so that the fully-valid slice of the
space is small but not trivial; training sets are seeded draws from the
exhaustively enumerated valid binaries.
"""

from __future__ import annotations

import numpy as np

from .composition import MAX_ATOMS, Composition
from .elements import ElementTable, ElementVocabulary, bundled_table
from .enumeration import EnumSpec, enumerate_compositions
from .errors import ConfigError

TOY_SYMBOLS = ("Li", "Na", "Mg", "Ca", "Al", "Ti", "V", "Mn", "Fe", "Cu", "O", "F")


def toy_vocabulary(table: ElementTable | None = None) -> ElementVocabulary:
    return ElementVocabulary.from_symbols(TOY_SYMBOLS, table or bundled_table())


def valid_binaries(table: ElementTable | None = None) -> list[Composition]:
    """All fully-valid binaries over the toy vocabulary, enumeration order."""
    table = table or bundled_table()
    spec = EnumSpec(
        vocabulary=toy_vocabulary(table),
        arities=(2,),
        max_count=MAX_ATOMS,
        filter_mode="fully_valid",
    )
    found: list[Composition] = []
    enumerate_compositions(spec, table, sink=found.append)
    return found


def toy_training_set(
    n: int = 500, seed: int = 0, pool: list[Composition] | None = None,
    table: ElementTable | None = None,
) -> list[Composition]:
    """n seeded draws (with replacement) from the valid-binary pool."""
    pool = pool if pool is not None else valid_binaries(table)
    if not pool:
        raise ConfigError("valid-binary pool is empty")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(pool), size=n)
    return [pool[i] for i in idx]


def sample_uniform_onehot(
    n: int,
    seed: int,
    vocabulary: ElementVocabulary | None = None,
    arities: tuple[int, ...] = (2, 3, 4),
    max_count: int = MAX_ATOMS,
) -> list[Composition]:
    """Uniform one-hot baseline samples over the enumerable design space.

    Each draw picks an arity uniformly from `arities`, then distinct columns
    uniformly, then counts uniformly in 1..max_count: a uniform sample of the
    one-hot matrices an exhaustive enumeration of those arities would visit.
    """
    vocab = vocabulary or toy_vocabulary()
    rng = np.random.default_rng(seed)
    syms = vocab.symbols
    out = []
    for _ in range(n):
        arity = int(rng.choice(arities))
        cols = np.sort(rng.choice(len(syms), size=arity, replace=False))
        counts = rng.integers(1, max_count + 1, size=arity)
        out.append(
            Composition(tuple((syms[c], int(k)) for c, k in zip(cols, counts)))
        )
    return out

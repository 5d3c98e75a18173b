"""Exhaustive enumeration of composition space with on-the-fly screening.

Visits every multiset of distinct vocabulary elements at the requested
arities with per-element counts 1..max_count, exactly once, in a fixed
order: arity ascending, element-index combinations lexicographic, counts
odometer-style (last element fastest). Compositions are classified for
charge neutrality / full validity as they stream by; only those passing
the configured filter are emitted to the sink, but all are counted.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Optional

from .composition import MAX_ATOMS, Composition
from .elements import ElementTable, ElementVocabulary
from .errors import ConfigError, EnumerationCancelled, PartialEnumerationError
from .validity import classify_validity

FILTER_MODES = ("none", "charge_neutral", "fully_valid")


@dataclass(frozen=True)
class EnumSpec:
    vocabulary: ElementVocabulary
    arities: tuple[int, ...]
    max_count: int = MAX_ATOMS
    filter_mode: str = "none"

    def __post_init__(self):
        if not self.arities:
            raise ConfigError("arities must be nonempty")
        if any(a < 2 for a in self.arities):
            raise ConfigError("arities must all be >= 2")
        if len(set(self.arities)) != len(self.arities):
            raise ConfigError("arities must be distinct")
        if not 1 <= self.max_count <= MAX_ATOMS:
            raise ConfigError(f"max_count must lie in 1..{MAX_ATOMS}")
        if self.filter_mode not in FILTER_MODES:
            raise ConfigError(f"filter_mode must be one of {FILTER_MODES}")


@dataclass(frozen=True)
class ArityStats:
    enumerated: int = 0
    charge_neutral: int = 0
    fully_valid: int = 0

    def __add__(self, other: "ArityStats") -> "ArityStats":
        return ArityStats(
            self.enumerated + other.enumerated,
            self.charge_neutral + other.charge_neutral,
            self.fully_valid + other.fully_valid,
        )


@dataclass
class SpaceStats:
    per_arity: dict[int, ArityStats]
    elapsed_seconds: float = 0.0

    @property
    def enumerated(self) -> int:
        return sum(st.enumerated for st in self.per_arity.values())

    @property
    def charge_neutral(self) -> int:
        return sum(st.charge_neutral for st in self.per_arity.values())

    @property
    def fully_valid(self) -> int:
        return sum(st.fully_valid for st in self.per_arity.values())

    def as_dict(self) -> dict:
        return {
            "per_arity": {
                str(a): {
                    "enumerated": st.enumerated,
                    "charge_neutral": st.charge_neutral,
                    "fully_valid": st.fully_valid,
                }
                for a, st in sorted(self.per_arity.items())
            },
            "totals": {
                "enumerated": self.enumerated,
                "charge_neutral": self.charge_neutral,
                "fully_valid": self.fully_valid,
            },
            "elapsed_seconds": self.elapsed_seconds,
        }


def closed_form_unfiltered(size: int, arity: int, max_count: int) -> int:
    """Unfiltered composition count: C(size, arity) * max_count**arity."""
    return math.comb(size, arity) * max_count**arity


def _passes(verdict, filter_mode: str) -> bool:
    if filter_mode == "none":
        return True
    if filter_mode == "charge_neutral":
        return verdict.charge_neutral
    return verdict.fully_valid


def _scan_block(
    symbols: tuple[str, ...],
    table: ElementTable,
    arity: int,
    lead: int,
    max_count: int,
    filter_mode: str,
    sink: Optional[Callable[[Composition], None]],
    collect: bool,
):
    """Enumerate the block of combinations whose first element index is `lead`.

    Returns (ArityStats, emitted list or None). With a sink, compositions are
    delivered inline and not collected.
    """
    enumerated = cn = valid = 0
    kept: list[Composition] | None = [] if collect else None
    counts_iter = list(product(range(1, max_count + 1), repeat=arity))
    for rest in combinations(range(lead + 1, len(symbols)), arity - 1):
        combo_symbols = (symbols[lead],) + tuple(symbols[j] for j in rest)
        for counts in counts_iter:
            comp = Composition(tuple(zip(combo_symbols, counts)))
            enumerated += 1
            verdict = classify_validity(comp, table)
            if verdict.charge_neutral:
                cn += 1
            if verdict.fully_valid:
                valid += 1
            if _passes(verdict, filter_mode):
                if sink is not None:
                    sink(comp)
                elif collect:
                    kept.append(comp)
    return ArityStats(enumerated, cn, valid), kept


_POOL_CTX: dict = {}


def _pool_init(symbols, table, max_count, filter_mode):
    _POOL_CTX["args"] = (symbols, table, max_count, filter_mode)


def _pool_task(task):
    arity, lead, collect = task
    symbols, table, max_count, filter_mode = _POOL_CTX["args"]
    stats, kept = _scan_block(
        symbols, table, arity, lead, max_count, filter_mode, None, collect
    )
    return arity, stats, kept


def enumerate_compositions(
    spec: EnumSpec,
    table: ElementTable,
    sink: Optional[Callable[[Composition], None]] = None,
    workers: int = 1,
) -> SpaceStats:
    """Walk the whole space described by `spec`, streaming matches to `sink`.

    Totals are independent of `workers`. With workers > 1, each leading-element
    block is scanned in a subprocess and its matches are replayed to the sink
    in block order, so delivery order equals the single-worker order. A sink
    may raise EnumerationCancelled to stop early; the resulting
    PartialEnumerationError carries the statistics gathered so far.
    """
    symbols = spec.vocabulary.symbols
    arities = tuple(sorted(spec.arities))
    start = time.perf_counter()
    per_arity = {a: ArityStats() for a in arities}

    def finish() -> SpaceStats:
        return SpaceStats(per_arity, elapsed_seconds=time.perf_counter() - start)

    def cancelled() -> PartialEnumerationError:
        return PartialEnumerationError("enumeration cancelled by sink", finish())

    tasks = [
        (arity, lead)
        for arity in arities
        for lead in range(len(symbols) - arity + 1)
    ]
    if workers <= 1 or len(tasks) <= 1:
        for arity, lead in tasks:
            try:
                stats, _ = _scan_block(
                    symbols, table, arity, lead, spec.max_count, spec.filter_mode,
                    sink, collect=False,
                )
            except EnumerationCancelled:
                raise cancelled() from None
            per_arity[arity] = per_arity[arity] + stats
        return finish()

    import multiprocessing as mp

    collect = sink is not None
    ctx = mp.get_context("fork")
    with ctx.Pool(
        workers, initializer=_pool_init,
        initargs=(symbols, table, spec.max_count, spec.filter_mode),
    ) as pool:
        for arity, stats, kept in pool.imap(
            _pool_task, [(a, l, collect) for a, l in tasks], chunksize=1
        ):
            per_arity[arity] = per_arity[arity] + stats
            if kept:
                for comp in kept:
                    try:
                        sink(comp)
                    except EnumerationCancelled:
                        pool.terminate()
                        raise cancelled() from None
    return finish()


def space_statistics(
    spec: EnumSpec, table: ElementTable, workers: int = 1
) -> SpaceStats:
    """Stats without emission; cross-checks unfiltered totals in closed form."""
    stats = enumerate_compositions(spec, table, sink=None, workers=workers)
    s = spec.vocabulary.size
    for arity, st in stats.per_arity.items():
        expect = closed_form_unfiltered(s, arity, spec.max_count)
        if st.enumerated != expect:
            raise RuntimeError(
                f"enumeration self-check failed for arity {arity}: "
                f"{st.enumerated} visited, closed form {expect}"
            )
    return stats

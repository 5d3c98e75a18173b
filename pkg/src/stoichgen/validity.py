"""Chemical screening: charge neutrality and electronegativity balance.

Both checks search over oxidation-state assignments (one state per element
species, applied to all its atoms). A composition is charge neutral when at
least one assignment sums to zero; it is electronegativity balanced when at
least one *neutral* assignment puts every positively charged element strictly
below every negatively charged one on the Pauling scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .composition import Composition
from .elements import ElementTable
from .errors import MissingElementError


@dataclass(frozen=True)
class OxidationAssignment:
    """One signed state per element species, in atomic-number order."""

    states: tuple[tuple[str, int], ...]

    def as_dict(self) -> dict[str, int]:
        return dict(self.states)


@dataclass(frozen=True)
class ValidityVerdict:
    charge_neutral: bool
    electronegativity_balanced: bool
    unknown_elements: tuple[str, ...] = field(default=(), compare=False)

    @property
    def fully_valid(self) -> bool:
        return self.charge_neutral and self.electronegativity_balanced


def neutral_assignments(
    comp: Composition, table: ElementTable
) -> list[OxidationAssignment]:
    """All assignments with zero total charge, in deterministic order.

    Elements are visited in atomic-number order with states ascending;
    branches whose remaining charge range cannot reach zero are pruned.
    The result set equals an unpruned product-space search.
    """
    if comp.arity == 0:
        return []
    symbols = []
    counts = []
    state_lists = []
    for symbol, count in comp.items:  # already atomic-number ordered
        rec = table[symbol]  # raises MissingElementError for unknown symbols
        symbols.append(symbol)
        counts.append(count)
        state_lists.append(sorted(rec.oxidation_states))

    n = len(symbols)
    # suffix_min[i]/suffix_max[i]: charge bounds attainable from element i on
    suffix_min = [0] * (n + 1)
    suffix_max = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        lo = counts[i] * state_lists[i][0]
        hi = counts[i] * state_lists[i][-1]
        suffix_min[i] = suffix_min[i + 1] + lo
        suffix_max[i] = suffix_max[i + 1] + hi

    found: list[OxidationAssignment] = []
    chosen: list[int] = []

    def descend(i: int, total: int) -> None:
        if i == n:
            if total == 0:
                found.append(
                    OxidationAssignment(tuple(zip(symbols, chosen)))
                )
            return
        if total + suffix_min[i] > 0 or total + suffix_max[i] < 0:
            return
        for state in state_lists[i]:
            chosen.append(state)
            descend(i + 1, total + counts[i] * state)
            chosen.pop()

    descend(0, 0)
    return found


def assignment_en_balanced(
    assignment: OxidationAssignment, comp: Composition, table: ElementTable
) -> bool:
    """True iff every cation is strictly less electronegative than every anion.

    Vacuously true on the empty assignment. False whenever an involved
    element lacks a tabulated electronegativity (conservative).
    """
    max_positive = None
    min_negative = None
    for symbol, state in assignment.states:
        en = table[symbol].electronegativity
        if en is None:
            return False
        if state > 0:
            max_positive = en if max_positive is None else max(max_positive, en)
        else:
            min_negative = en if min_negative is None else min(min_negative, en)
    if max_positive is None or min_negative is None:
        # A neutral nonempty assignment always carries both signs; this arm
        # covers the empty assignment (vacuously true).
        return assignment.states == ()
    return max_positive < min_negative


def classify_validity(comp: Composition, table: ElementTable) -> ValidityVerdict:
    """Charge-neutrality and electronegativity verdict for one composition.

    Unknown elements never abort a batch: they yield a {False, False}
    verdict carrying the offending symbols.
    """
    unknown = tuple(sym for sym in comp.elements if sym not in table)
    if unknown or comp.arity == 0:
        return ValidityVerdict(False, False, unknown)
    balanced = False
    neutral = neutral_assignments(comp, table)
    for assignment in neutral:
        if assignment_en_balanced(assignment, comp, table):
            balanced = True
            break
    return ValidityVerdict(bool(neutral), balanced)


def _classify_chunk(args) -> list[ValidityVerdict]:
    comps, table = args
    return [classify_validity(c, table) for c in comps]


def classify_batch(
    comps: Sequence[Composition], table: ElementTable, workers: int = 1
) -> list[ValidityVerdict]:
    """Classify many compositions, optionally in parallel, preserving order."""
    comps = list(comps)
    if workers <= 1 or len(comps) < 2 * workers:
        return [classify_validity(c, table) for c in comps]
    import multiprocessing as mp

    chunk = (len(comps) + workers - 1) // workers
    pieces = [(comps[i : i + chunk], table) for i in range(0, len(comps), chunk)]
    with mp.get_context("fork").Pool(workers) as pool:
        results = pool.map(_classify_chunk, pieces)
    out: list[ValidityVerdict] = []
    for piece in results:
        out.extend(piece)
    return out

"""Evaluation metrics for generated composition sets.

All set arithmetic runs over canonical formula strings, so compositions and
formula text mix freely. Only the uniqueness curve depends on sample order.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .composition import Composition, canonical_formula, parse_formula
from .elements import ElementTable
from .errors import EnrichmentUndefinedError, InputError
from .validity import classify_batch

NOVELTY_ARITIES = (2, 3, 4)


def _keys(values) -> list[str]:
    return [canonical_formula(v) for v in values]


def _key_set(values) -> set[str]:
    return set(_keys(values))


def _arity_of(key: str) -> int:
    return sum(1 for ch in key if ch.isupper())


@dataclass
class ValidityStats:
    n: int
    charge_neutral_pct: float
    electronegativity_pct: float
    empty: bool = False


def validity_report(samples, table: ElementTable, workers: int = 1) -> ValidityStats:
    """Percentage of samples passing charge neutrality / EN balance."""
    comps = list(samples)
    if not comps:
        return ValidityStats(0, 0.0, 0.0, empty=True)
    comps = [c if isinstance(c, Composition) else parse_formula(c) for c in comps]
    verdicts = classify_batch(comps, table, workers=workers)
    n = len(verdicts)
    cn = sum(v.charge_neutral for v in verdicts)
    en = sum(v.electronegativity_balanced for v in verdicts)
    return ValidityStats(n, 100.0 * cn / n, 100.0 * en / n)


def uniqueness_curve(samples: Sequence, step: int = 1) -> list[tuple[int, float]]:
    """(n, distinct/n) at n = step, 2*step, ..., len(samples)."""
    if step < 1:
        raise ValueError("step must be >= 1")
    keys = _keys(samples)
    seen: set[str] = set()
    points = []
    for n, key in enumerate(keys, start=1):
        seen.add(key)
        if n % step == 0 or n == len(keys):
            points.append((n, len(seen) / n))
    return points


@dataclass
class ArityNovelty:
    generated: int
    recovered_train_pct: float
    recovered_holdout_pct: float
    new_fraction: float


@dataclass
class NoveltyReport:
    unique_generated: int
    recovered_train_count: int
    recovered_holdout_count: int
    new_count: int
    recovered_train_pct: float
    recovered_holdout_pct: float
    new_samples: list[str] = field(repr=False)
    per_arity: dict[int, ArityNovelty] = field(default_factory=dict)


def novelty_report(samples, train, holdout) -> NoveltyReport:
    """Recovery of train/holdout sets and the new remainder.

    Recovery percentages are fractions of the reference sets; the partition
    |unique(samples)| = recovered_train + recovered_holdout + new always holds
    because train and holdout must be disjoint.
    """
    train_set = _key_set(train)
    holdout_set = _key_set(holdout)
    overlap = train_set & holdout_set
    if overlap:
        raise InputError(
            f"train and holdout overlap on {len(overlap)} formulas, e.g. "
            f"{sorted(overlap)[:3]}"
        )
    unique = _key_set(samples)
    in_train = unique & train_set
    in_holdout = unique & holdout_set
    new = unique - train_set - holdout_set

    def pct(part: int, whole: int) -> float:
        return 0.0 if whole == 0 else 100.0 * part / whole

    per_arity: dict[int, ArityNovelty] = {}
    for arity in NOVELTY_ARITIES:
        gen_a = {k for k in unique if _arity_of(k) == arity}
        train_a = {k for k in train_set if _arity_of(k) == arity}
        hold_a = {k for k in holdout_set if _arity_of(k) == arity}
        new_a = gen_a - train_a - hold_a
        per_arity[arity] = ArityNovelty(
            generated=len(gen_a),
            recovered_train_pct=pct(len(gen_a & train_a), len(train_a)),
            recovered_holdout_pct=pct(len(gen_a & hold_a), len(hold_a)),
            new_fraction=0.0 if not gen_a else len(new_a) / len(gen_a),
        )
    return NoveltyReport(
        unique_generated=len(unique),
        recovered_train_count=len(in_train),
        recovered_holdout_count=len(in_holdout),
        new_count=len(new),
        recovered_train_pct=pct(len(in_train), len(train_set)),
        recovered_holdout_pct=pct(len(in_holdout), len(holdout_set)),
        new_samples=sorted(new),
        per_arity=per_arity,
    )


def cross_confirm(new_samples, external) -> tuple[int, list[str]]:
    """How many new formulas an external dataset confirms; matches in order."""
    matched = sorted(_key_set(new_samples) & _key_set(external))
    return len(matched), matched


def enrichment_factor(gan_valid_fraction: float, baseline_valid_fraction: float) -> float:
    """Ratio of valid fractions: generator over enumeration baseline."""
    if baseline_valid_fraction <= 0:
        raise EnrichmentUndefinedError(
            "enrichment undefined for a zero baseline valid fraction"
        )
    return gan_valid_fraction / baseline_valid_fraction


@dataclass
class EvalReport:
    """Aggregated evaluation, ready for JSON serialization."""

    validity_raw: ValidityStats | None = None
    validity_unique: ValidityStats | None = None
    validity_train: ValidityStats | None = None
    uniqueness: list[tuple[int, float]] | None = None
    novelty: NoveltyReport | None = None
    cross_confirmation: dict[str, int] = field(default_factory=dict)
    enrichment: float | None = None

    def as_dict(self) -> dict:
        out = asdict(self)
        if self.novelty is not None:
            out["novelty"]["per_arity"] = {
                str(a): asdict(v) for a, v in self.novelty.per_arity.items()
            }
        if self.uniqueness is not None:
            out["uniqueness"] = [[n, frac] for n, frac in self.uniqueness]
        return out

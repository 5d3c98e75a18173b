"""Dataset loading and the screening pipeline.

Screening applies, in order: duplicate collapse by canonical formula keeping
the lowest formation energy, minimum-arity cut, per-element count cap,
element exclusions, and a mean +/- k*sigma formation-energy window computed
over what survived the earlier rules. Each removed record is attributed to
the first rule that rejected it.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .composition import Composition, canonical_formula, parse_formula
from .errors import ConfigError, DatasetFormatError, FormulaError


@dataclass
class DatasetRecord:
    formula: str
    composition: Composition
    formation_energy: float | None = None
    properties: dict[str, float] = field(default_factory=dict)
    line: int = 0

    @property
    def key(self) -> str:
        return canonical_formula(self.composition)


@dataclass
class QuarantinedRow:
    line: int
    formula: str
    reason: str


def _record_from_fields(formula, energy_text, props, line):
    comp = parse_formula(formula)
    energy = None
    if energy_text not in (None, ""):
        energy = float(energy_text)
    properties = {}
    for name, value in props.items():
        if value in (None, ""):
            continue
        try:
            properties[name] = float(value)
        except (TypeError, ValueError):
            continue  # non-numeric extras are not properties
    return DatasetRecord(formula, comp, energy, properties, line)


def load_dataset(path) -> tuple[list[DatasetRecord], list[QuarantinedRow]]:
    """Load a CSV (header with `formula`, optional `formation_energy`) or a
    JSON-lines file with the same field names. Rows with unparseable
    formulas are quarantined with their line number, never silently dropped.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetFormatError(f"cannot read dataset {path}: {exc}") from None
    records: list[DatasetRecord] = []
    quarantine: list[QuarantinedRow] = []

    def add(formula, energy_text, props, line):
        try:
            records.append(_record_from_fields(formula, energy_text, props, line))
        except (FormulaError, ValueError) as exc:
            quarantine.append(QuarantinedRow(line, str(formula), str(exc)))

    if path.suffix.lower() in (".jsonl", ".ndjson", ".json"):
        for lineno, raw in enumerate(text.splitlines(), start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                quarantine.append(QuarantinedRow(lineno, raw[:40], f"bad JSON: {exc}"))
                continue
            if "formula" not in obj:
                raise DatasetFormatError(f"{path}: line {lineno} has no 'formula' field")
            props = {
                k: v for k, v in obj.items() if k not in ("formula", "formation_energy")
            }
            add(obj["formula"], obj.get("formation_energy"), props, lineno)
    else:
        reader = csv.DictReader(text.splitlines())
        if reader.fieldnames is None or "formula" not in reader.fieldnames:
            raise DatasetFormatError(f"{path}: missing required 'formula' column")
        for lineno, row in enumerate(reader, start=2):
            props = {
                k: v
                for k, v in row.items()
                if k not in ("formula", "formation_energy") and k is not None
            }
            add(row["formula"], row.get("formation_energy"), props, lineno)
    return records, quarantine


@dataclass(frozen=True)
class ScreeningConfig:
    dedup: bool = True
    min_arity: int = 2
    max_per_element_count: int = 8
    excluded_elements: frozenset[str] = frozenset({"Kr", "He"})
    sigma_multiplier: float = 5.0
    # True: require formation energies, error without them.
    # None: apply the sigma window only when energies are present.
    # False: never apply it.
    sigma_filter: bool | None = None

    def __post_init__(self):
        if self.sigma_multiplier <= 0:
            raise ConfigError("sigma_multiplier must be positive")
        if not 1 <= self.max_per_element_count <= 8:
            raise ConfigError("max_per_element_count must lie in 1..8")
        if self.min_arity < 1:
            raise ConfigError("min_arity must be >= 1")


@dataclass
class ScreeningReport:
    input_count: int
    kept: int
    removed: dict[str, int]
    energy_mean: float | None = None
    energy_std: float | None = None

    def as_dict(self) -> dict:
        return {
            "input_count": self.input_count,
            "kept": self.kept,
            "removed": dict(self.removed),
            "energy_mean": self.energy_mean,
            "energy_std": self.energy_std,
        }


def screen_dataset(
    records: list[DatasetRecord], cfg: ScreeningConfig = ScreeningConfig()
) -> tuple[list[DatasetRecord], ScreeningReport]:
    """Apply the screening rules in order; survivors keep input order."""
    removed = {
        "duplicate": 0,
        "single_element": 0,
        "count_exceeds_max": 0,
        "excluded_element": 0,
        "energy_outlier": 0,
    }
    survivors = list(records)

    if cfg.dedup:
        best: dict[str, DatasetRecord] = {}
        for rec in survivors:
            cur = best.get(rec.key)
            if cur is None:
                best[rec.key] = rec
            else:
                # lowest formation energy wins; exact ties and energy-free
                # records keep the earlier row
                if (
                    rec.formation_energy is not None
                    and (cur.formation_energy is None
                         or rec.formation_energy < cur.formation_energy)
                ):
                    best[rec.key] = rec
        keep_ids = {id(rec) for rec in best.values()}
        removed["duplicate"] = len(survivors) - len(keep_ids)
        survivors = [rec for rec in survivors if id(rec) in keep_ids]

    kept = []
    for rec in survivors:
        if rec.composition.arity < cfg.min_arity:
            removed["single_element"] += 1
        elif any(c > cfg.max_per_element_count for c in rec.composition.counts.values()):
            removed["count_exceeds_max"] += 1
        elif any(sym in cfg.excluded_elements for sym in rec.composition.elements):
            removed["excluded_element"] += 1
        else:
            kept.append(rec)
    survivors = kept

    energies = [r.formation_energy for r in survivors if r.formation_energy is not None]
    mean = std = None
    apply_sigma = cfg.sigma_filter is True or (cfg.sigma_filter is None and energies)
    if cfg.sigma_filter is True and not energies:
        raise ConfigError("sigma filter requested but no record has a formation energy")
    if apply_sigma and energies:
        mean = sum(energies) / len(energies)
        std = math.sqrt(sum((e - mean) ** 2 for e in energies) / len(energies))
        lo, hi = mean - cfg.sigma_multiplier * std, mean + cfg.sigma_multiplier * std
        kept = []
        for rec in survivors:
            e = rec.formation_energy
            if e is not None and not lo <= e <= hi:
                removed["energy_outlier"] += 1
            else:
                kept.append(rec)
        survivors = kept

    report = ScreeningReport(
        input_count=len(records),
        kept=len(survivors),
        removed=removed,
        energy_mean=mean,
        energy_std=std,
    )
    return survivors, report


def filter_by_property(
    records: list[DatasetRecord], name: str, predicate: Callable[[float], bool]
) -> tuple[list[DatasetRecord], int]:
    """Subset of records whose named property satisfies the predicate.

    Records lacking the property are excluded; their count is returned so
    callers can report it.
    """
    subset = []
    missing = 0
    for rec in records:
        if name not in rec.properties:
            missing += 1
        elif predicate(rec.properties[name]):
            subset.append(rec)
    return subset, missing


def split_holdout(records, fraction: float, seed: int):
    """Seeded shuffle then split into (train, holdout); disjoint, exhaustive."""
    if not 0.0 < fraction < 1.0:
        raise ConfigError(f"holdout fraction must lie in (0, 1), got {fraction}")
    import numpy as np

    items = list(records)
    order = np.random.default_rng(seed).permutation(len(items))
    n_holdout = int(math.floor(fraction * len(items) + 0.5))
    holdout_idx = set(order[:n_holdout].tolist())
    train = [items[i] for i in range(len(items)) if i not in holdout_idx]
    holdout = [items[i] for i in range(len(items)) if i in holdout_idx]
    return train, holdout

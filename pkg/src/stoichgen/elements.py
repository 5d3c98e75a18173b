"""Per-element chemistry tables and ordered element vocabularies.

The table (electronegativity, allowed oxidation states) lives in a
replaceable data file; a canonical one covering Z=1..94 ships with the
package. Vocabularies fix the column order of every composition matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import ElementDataError, MissingElementError

# Symbol -> atomic number for Z=1..118. Chemistry facts, not screening data,
# so they stay in code: formula parsing and canonical ordering depend on them
# even for elements the bundled table omits.
_SYMBOLS = (
    "H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co "
    "Ni Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb "
    "Te I Xe Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re "
    "Os Ir Pt Au Hg Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es "
    "Fm Md No Lr Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og"
).split()

ATOMIC_NUMBERS: dict[str, int] = {s: z for z, s in enumerate(_SYMBOLS, start=1)}


@dataclass(frozen=True)
class ElementRecord:
    """One element's screening data."""

    symbol: str
    atomic_number: int
    electronegativity: float | None
    oxidation_states: tuple[int, ...]


class ElementTable(Mapping[str, ElementRecord]):
    """Immutable symbol-keyed collection of ElementRecords."""

    def __init__(self, records: Iterable[ElementRecord]):
        table: dict[str, ElementRecord] = {}
        for rec in records:
            if rec.symbol in table:
                raise ElementDataError(f"duplicate element symbol {rec.symbol!r}")
            table[rec.symbol] = rec
        self._table = table

    def __getitem__(self, symbol: str) -> ElementRecord:
        try:
            return self._table[symbol]
        except KeyError:
            raise MissingElementError(symbol, "not in element table") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._table)

    def __len__(self) -> int:
        return len(self._table)

    def __contains__(self, symbol) -> bool:
        return symbol in self._table


def _parse_line(line: str, lineno: int) -> ElementRecord:
    fields = line.split(",")
    if len(fields) != 4:
        raise ElementDataError(
            f"line {lineno}: expected 4 comma-separated fields, got {len(fields)}"
        )
    symbol, z_text, en_text, states_text = (f.strip() for f in fields)
    if symbol not in ATOMIC_NUMBERS:
        raise ElementDataError(f"line {lineno}: unknown element symbol {symbol!r}")
    try:
        z = int(z_text)
    except ValueError:
        raise ElementDataError(f"line {lineno}: bad atomic number {z_text!r}") from None
    if z <= 0:
        raise ElementDataError(f"line {lineno}: atomic number must be positive")
    if en_text:
        try:
            en = float(en_text)
        except ValueError:
            raise ElementDataError(
                f"line {lineno}: bad electronegativity {en_text!r}"
            ) from None
        if en <= 0:
            raise ElementDataError(f"line {lineno}: electronegativity must be positive")
    else:
        en = None
    if not states_text:
        raise ElementDataError(f"line {lineno}: empty oxidation-state list")
    states = []
    for tok in states_text.split(";"):
        try:
            state = int(tok)
        except ValueError:
            raise ElementDataError(
                f"line {lineno}: bad oxidation state {tok!r}"
            ) from None
        if state == 0:
            raise ElementDataError(f"line {lineno}: oxidation state 0 not allowed")
        if state in states:
            raise ElementDataError(f"line {lineno}: duplicate oxidation state {state}")
        states.append(state)
    return ElementRecord(symbol, z, en, tuple(states))


def parse_element_table(text: str) -> ElementTable:
    """Parse element-data text: `symbol,Z,electronegativity,states` per line."""
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        records.append(_parse_line(line, lineno))
    return ElementTable(records)


def load_element_table(path: str | Path) -> ElementTable:
    """Load an element table from a data file."""
    return parse_element_table(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=1)
def bundled_table() -> ElementTable:
    """The canonical table shipped with the package (Z=1..94, no He/Ne/Ar)."""
    text = resources.files("stoichgen.data").joinpath("elements.csv").read_text("utf-8")
    return parse_element_table(text)


@dataclass(frozen=True)
class ElementVocabulary:
    """Ordered element list defining matrix columns (size s)."""

    entries: tuple[ElementRecord, ...]

    def __post_init__(self):
        seen = set()
        last_z = 0
        for rec in self.entries:
            if rec.symbol in seen:
                raise ElementDataError(f"duplicate symbol {rec.symbol!r} in vocabulary")
            if rec.atomic_number <= last_z:
                raise ElementDataError("vocabulary not in increasing atomic-number order")
            seen.add(rec.symbol)
            last_z = rec.atomic_number
        object.__setattr__(
            self, "_index", {rec.symbol: i for i, rec in enumerate(self.entries)}
        )

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def usable(self) -> bool:
        return self.size > 0

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(rec.symbol for rec in self.entries)

    def index_of(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise MissingElementError(symbol, "not in vocabulary") from None

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._index

    @classmethod
    def from_symbols(cls, symbols: Iterable[str], table: ElementTable) -> "ElementVocabulary":
        records = sorted((table[s] for s in set(symbols)), key=lambda r: r.atomic_number)
        return cls(tuple(records))

    @classmethod
    def from_dataset(cls, compositions, table: ElementTable) -> "ElementVocabulary":
        """Vocabulary of exactly the elements appearing in >=1 composition."""
        symbols: set[str] = set()
        for comp in compositions:
            symbols.update(comp.elements)
        return cls.from_symbols(symbols, table)


def vocabulary_from_dataset(compositions, table: ElementTable) -> ElementVocabulary:
    return ElementVocabulary.from_dataset(compositions, table)

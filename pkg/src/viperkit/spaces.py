"""The three character neighbor spaces behind one lookup interface.

ICES: image-based, ranked by glyph cosine similarity (continuous weights).
DCES: description-based, all code points whose names share the same base
      letter and case (equidistant, uniform weights).
ECES: curated one-to-one map from each of a-zA-Z to a single diacritic
      variant.

All three materialize as a NeighborTable: code point -> ranked list of
(neighbor code point, weight), higher weight meaning more similar.
"""

from __future__ import annotations

import enum
import hashlib
import string
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import Catalog
from .glyphs import DEFAULT_K, EmbeddingStore

# Control range never joins similarity candidacy: no visual glyph to mimic.
CONTROL_LIMIT = 32

ECES_ALPHABET = string.ascii_lowercase + string.ascii_uppercase


class SpaceKind(str, enum.Enum):
    ICES = "ices"
    DCES = "dces"
    ECES = "eces"


class EmptyStoreError(ValueError):
    pass


class IncompleteTableError(ValueError):
    pass


class DuplicateKeyError(ValueError):
    pass


@dataclass(frozen=True)
class NeighborTable:
    """Ranked visual neighbors per code point for one space kind."""

    kind: SpaceKind
    source: str
    entries: dict[int, tuple[tuple[int, float], ...]] = field(repr=False)

    def neighbors(self, codepoint: int) -> list[tuple[int, float]]:
        """Stored ranked list, or [] for code points with no entry."""
        return list(self.entries.get(codepoint, ()))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, codepoint: int) -> bool:
        return codepoint in self.entries


def neighbors(table: NeighborTable, codepoint: int) -> list[tuple[int, float]]:
    return table.neighbors(codepoint)


def build_dces(catalog: Catalog, *, k: int = DEFAULT_K) -> NeighborTable:
    """Description-based space: neighbors share (base letter, case) by name.

    Every member of a letter class lists all other members with uniform
    weight 1.0; classes larger than k+1 are truncated to the first k
    neighbors by ascending code point.
    """
    entries: dict[int, tuple[tuple[int, float], ...]] = {}
    for members in catalog.letter_classes().values():
        for cp in members:
            others = [(o, 1.0) for o in members if o != cp][:k]
            if others:
                entries[cp] = tuple(others)
    digest = hashlib.sha256(
        "\n".join(f"{r.codepoint}:{r.name}" for r in catalog).encode()
    ).hexdigest()
    return NeighborTable(SpaceKind.DCES, f"catalog:sha256:{digest[:16]}", entries)


def build_ices_table(store: EmbeddingStore, *, k: int = DEFAULT_K) -> NeighborTable:
    """Image-based space: top-k cosine neighbors for every non-blank glyph.

    Candidates exclude blank glyphs, the control range, and neighbors with
    zero similarity (no shared ink is not a visual look-alike).
    """
    cps, unit, _ = store._candidate_matrix()
    keep = cps >= CONTROL_LIMIT
    cps, unit = cps[keep], unit[keep]
    if cps.size == 0:
        raise EmptyStoreError("store has no non-blank glyphs to index")

    entries: dict[int, tuple[tuple[int, float], ...]] = {}
    chunk = 512
    for start in range(0, cps.size, chunk):
        block = unit[start : start + chunk]
        sims = block @ unit.T  # (chunk, n)
        # Stable sort on -sim: ties fall back to column order, which is
        # ascending code point, giving the documented tie-break for free.
        order = np.argsort(-sims, axis=1, kind="stable")
        for row, cp in enumerate(cps[start : start + chunk]):
            ranked = []
            for idx in order[row]:
                other = int(cps[idx])
                sim = float(min(1.0, sims[row, idx]))
                if sim <= 0.0:
                    break  # sorted: everything after is zero too
                if other == cp:
                    continue
                ranked.append((other, sim))
                if len(ranked) == k:
                    break
            entries[int(cp)] = tuple(ranked)
    return NeighborTable(SpaceKind.ICES, store.font_id, entries)


def _parse_codepoint(text: str) -> int:
    text = text.strip()
    if text.upper().startswith("U+"):
        return int(text[2:], 16)
    if text.lower().startswith("0x"):
        return int(text, 16)
    return int(text, 16)


def build_eces(table_file: str | Path) -> NeighborTable:
    """Curated one-neighbor space over exactly the 52 letters a-zA-Z.

    The file has one `letter TAB replacement_codepoint` row per letter
    (hex or U+hex; extra columns are annotation).  Raises
    IncompleteTableError unless all 52 letters are covered exactly once,
    DuplicateKeyError on repeated letters or repeated replacements.
    """
    path = Path(table_file)
    mapping: dict[int, int] = {}
    replacements_seen: dict[int, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) < 2 or len(fields[0]) != 1:
                raise IncompleteTableError(f"{path}:{lineno}: expected `letter<TAB>codepoint`")
            letter = fields[0]
            if letter not in ECES_ALPHABET:
                raise IncompleteTableError(f"{path}:{lineno}: {letter!r} is not in a-zA-Z")
            try:
                replacement = _parse_codepoint(fields[1])
            except ValueError:
                raise IncompleteTableError(
                    f"{path}:{lineno}: bad replacement code point {fields[1]!r}"
                ) from None
            key = ord(letter)
            if key in mapping:
                raise DuplicateKeyError(f"{path}:{lineno}: duplicate letter {letter!r}")
            if replacement in replacements_seen:
                raise DuplicateKeyError(
                    f"{path}:{lineno}: replacement U+{replacement:04X} already used "
                    f"for {replacements_seen[replacement]!r}"
                )
            mapping[key] = replacement
            replacements_seen[replacement] = letter
    missing = [c for c in ECES_ALPHABET if ord(c) not in mapping]
    if missing:
        raise IncompleteTableError(f"{path}: missing letters {''.join(missing)!r}")
    entries = {cp: ((rep, 1.0),) for cp, rep in mapping.items()}
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    return NeighborTable(SpaceKind.ECES, f"{path.name}:sha256:{digest[:16]}", entries)


def default_eces_path() -> Path:
    return Path(__file__).parent / "data" / "eces.tsv"


def save_table(table: NeighborTable, path: str | Path) -> None:
    """TSV serialization: header line with kind and source, then one
    `codepoint TAB neighbor:weight,...` row per entry."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(f"# space_kind={table.kind.value} source={table.source}\n")
        for cp in sorted(table.entries):
            pairs = ",".join(f"{n}:{w!r}" for n, w in table.entries[cp])
            fh.write(f"{cp}\t{pairs}\n")
    tmp.replace(path)


def load_table(path: str | Path) -> NeighborTable:
    path = Path(path)
    entries: dict[int, tuple[tuple[int, float], ...]] = {}
    kind: SpaceKind | None = None
    source = ""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("#"):
            raise ValueError(f"{path}: missing header line")
        for part in header.lstrip("# ").split():
            key, _, value = part.partition("=")
            if key == "space_kind":
                kind = SpaceKind(value)
            elif key == "source":
                source = value
        if kind is None:
            raise ValueError(f"{path}: header does not name a space_kind")
        for line in fh:
            cp_field, _, pairs_field = line.rstrip("\n").partition("\t")
            pairs = []
            if pairs_field:
                for pair in pairs_field.split(","):
                    n_field, _, w_field = pair.partition(":")
                    pairs.append((int(n_field), float(w_field)))
            entries[int(cp_field)] = tuple(pairs)
    return NeighborTable(kind, source, entries)

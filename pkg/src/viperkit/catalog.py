"""Unicode character catalog: names-list ingestion and letter/case features.

The catalog is built from a UnicodeData.txt-style file (semicolon-delimited,
code point in uppercase hex in field 0, official name in field 1) and exposes
one record per assigned code point below the configured cap.  Records carry
the base letter and case parsed from the character name, which is what the
description-based neighbor space is built from.
"""

from __future__ import annotations

import enum
import re
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

MAX_CODEPOINT = 30000

# Pass-through alphabet used for the is_standard flag and as the default
# recovery target set: ASCII letters plus punctuation.  Digits and space are
# included so clean text is never forcibly mapped onto letters.
ASCII_PUNCTUATION = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~"
DEFAULT_STANDARD_CHARS = (
    "abcdefghijklmnopqrstuvwxyz"
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "0123456789 " + ASCII_PUNCTUATION
)
DEFAULT_STANDARD_CODEPOINTS = frozenset(ord(c) for c in DEFAULT_STANDARD_CHARS)

_TOKEN_SPLIT = re.compile(r"[ \-]+")
_SINGLE_LETTER = re.compile(r"^[A-Z]$")


class LetterCase(enum.Enum):
    SMALL = "small"
    CAPITAL = "capital"


class MalformedRecordError(ValueError):
    """A names-file line that matches no accepted format."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"names file line {line_number}: {reason}")
        self.line_number = line_number


@dataclass(frozen=True)
class CharRecord:
    """One assigned code point with its official name and letter features.

    base_letter and letter_case are either both set or both None: they are
    set only when the name identifies a single cased letter (e.g. the name
    "LATIN SMALL LETTER A WITH GRAVE" yields ('a', SMALL)).
    """

    codepoint: int
    name: str
    base_letter: str | None = None
    letter_case: LetterCase | None = None
    is_standard: bool = False

    def __post_init__(self):
        if (self.base_letter is None) != (self.letter_case is None):
            raise ValueError("base_letter and letter_case must be set together")
        if not self.name:
            raise ValueError("name must be non-empty")


def parse_letter_features(name: str) -> tuple[str | None, LetterCase | None]:
    """Extract (base_letter, case) from a Unicode character name.

    A name yields features only when exactly one of the tokens SMALL/CAPITAL
    is present along with the token LETTER; the base letter is the first
    single-character A-Z token after LETTER.  Anything else (digits, ligature
    names, small-capital variants carrying both case tokens) yields
    (None, None).  Total function: never raises.
    """
    tokens = [t for t in _TOKEN_SPLIT.split(name) if t]
    if "LETTER" not in tokens:
        return None, None
    has_small = "SMALL" in tokens
    has_capital = "CAPITAL" in tokens
    if has_small == has_capital:  # neither, or both ("SMALL CAPITAL" names)
        return None, None
    case = LetterCase.SMALL if has_small else LetterCase.CAPITAL
    letter_idx = tokens.index("LETTER")
    for token in tokens[letter_idx + 1 :]:
        if _SINGLE_LETTER.match(token):
            return token.lower(), case
    return None, None


class Catalog:
    """Immutable collection of CharRecords keyed by code point."""

    def __init__(self, records: Iterable[CharRecord]):
        self._records: dict[int, CharRecord] = {}
        for rec in records:
            if rec.codepoint in self._records:
                raise ValueError(f"duplicate codepoint U+{rec.codepoint:04X}")
            self._records[rec.codepoint] = rec
        self._records = dict(sorted(self._records.items()))

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[CharRecord]:
        return iter(self._records.values())

    def __contains__(self, codepoint: int) -> bool:
        return codepoint in self._records

    def get(self, codepoint: int) -> CharRecord | None:
        return self._records.get(codepoint)

    def letter_classes(self) -> dict[tuple[str, LetterCase], list[int]]:
        """Group code points by (base_letter, case), ascending within a class."""
        classes: dict[tuple[str, LetterCase], list[int]] = {}
        for rec in self:
            if rec.base_letter is not None and rec.letter_case is not None:
                classes.setdefault((rec.base_letter, rec.letter_case), []).append(
                    rec.codepoint
                )
        return classes


def iter_names_file(path: str | Path) -> Iterator[tuple[int, int, str]]:
    """Yield (line_number, codepoint, name) from a UnicodeData.txt-style file.

    Blank lines and '#' comments are skipped.  Raises MalformedRecordError on
    any other line that does not parse as `HEX;NAME[;...]`.
    """
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(";")
            if len(fields) < 2:
                raise MalformedRecordError(lineno, f"expected ';'-delimited fields, got {line!r}")
            try:
                codepoint = int(fields[0].strip(), 16)
            except ValueError:
                raise MalformedRecordError(
                    lineno, f"field 0 is not a hex code point: {fields[0]!r}"
                ) from None
            name = fields[1].strip()
            if not name:
                raise MalformedRecordError(lineno, "empty name field")
            yield lineno, codepoint, name


def load_catalog(
    names_file: str | Path,
    *,
    max_codepoint: int = MAX_CODEPOINT,
    standard: frozenset[int] = DEFAULT_STANDARD_CODEPOINTS,
) -> Catalog:
    """Load CharRecords for every assigned code point below max_codepoint.

    Range markers and control entries (names in angle brackets, e.g.
    "<control>") are omitted: they have no visual glyph and never take part
    in perturbation.  Raises FileNotFoundError or MalformedRecordError.
    """
    records = []
    seen: set[int] = set()
    for lineno, codepoint, name in iter_names_file(names_file):
        if codepoint in seen:
            raise MalformedRecordError(lineno, f"duplicate code point U+{codepoint:04X}")
        seen.add(codepoint)
        if codepoint >= max_codepoint:
            continue
        if name.startswith("<"):
            continue
        base_letter, letter_case = parse_letter_features(name)
        records.append(
            CharRecord(
                codepoint=codepoint,
                name=name,
                base_letter=base_letter,
                letter_case=letter_case,
                is_standard=codepoint in standard,
            )
        )
    return Catalog(records)


def dump_names_file(path: str | Path, *, max_codepoint: int = MAX_CODEPOINT) -> int:
    """Write a UnicodeData.txt-style names file from the stdlib unicodedata.

    Produces one `HEX;NAME` line per named code point below max_codepoint,
    which load_catalog accepts directly.  Returns the number of lines written.
    """
    path = Path(path)
    count = 0
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(f"# generated from Python unicodedata {unicodedata.unidata_version}\n")
        for codepoint in range(max_codepoint):
            try:
                name = unicodedata.name(chr(codepoint))
            except ValueError:
                continue
            fh.write(f"{codepoint:04X};{name}\n")
            count += 1
    tmp.replace(path)
    return count

"""Rule-based recovery: map non-standard characters to their nearest
standard look-alike in the image-based embedding space.

Standard characters pass through untouched.  Every other character with a
non-blank glyph is replaced by the standard character whose rendered glyph
is most cosine-similar; characters the font cannot render fall back to a
configurable default (pass-through unless told otherwise).  Note this is a
blunt instrument by design: legitimate foreign characters in clean text get
"recovered" too ('é' becomes 'e').
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .catalog import DEFAULT_STANDARD_CODEPOINTS
from .glyphs import EmbeddingStore


class MissingStandardEmbeddingError(ValueError):
    def __init__(self, codepoint: int):
        super().__init__(
            f"standard character U+{codepoint:04X} has no embedding in the store"
        )
        self.codepoint = codepoint


@dataclass(frozen=True)
class StandardSet:
    """The recovery target alphabet; defaults to ASCII letters, digits,
    space and punctuation."""

    members: frozenset[int]

    def __post_init__(self):
        if not self.members:
            raise ValueError("standard set must be non-empty")

    def __contains__(self, codepoint: int) -> bool:
        return codepoint in self.members

    @classmethod
    def default(cls) -> "StandardSet":
        return cls(DEFAULT_STANDARD_CODEPOINTS)

    @classmethod
    def from_chars(cls, chars: Iterable[str]) -> "StandardSet":
        return cls(frozenset(ord(c) for c in chars))


class RecoveryMap:
    """Precomputed nearest-standard lookup for one (store, standard set).

    Building is a single dense similarity product; recovery is then O(1)
    per character, which is what corpus-scale use needs.
    """

    def __init__(
        self,
        standard: StandardSet,
        mapping: dict[int, tuple[int, float]],
        fallback: str | None = None,
    ):
        self.standard = standard
        self.mapping = mapping
        self.fallback = fallback

    @classmethod
    def build(
        cls,
        store: EmbeddingStore,
        standard: StandardSet | None = None,
        *,
        fallback: str | None = None,
    ) -> "RecoveryMap":
        """Compute the nearest standard character for every non-blank glyph.

        Every standard member must be present in the store; members whose
        glyphs are blank (space) stay valid pass-through characters but are
        not similarity targets.  Ties break by ascending code point.
        """
        standard = standard or StandardSet.default()
        for member in standard.members:
            if member not in store:
                raise MissingStandardEmbeddingError(member)
        targets = sorted(
            cp for cp in standard.members if store.pixels(cp).any()
        )
        if not targets:
            raise MissingStandardEmbeddingError(min(standard.members))
        target_m = np.stack([store.pixels(cp) for cp in targets]).astype(np.float32)
        target_m /= np.linalg.norm(target_m, axis=1, keepdims=True)

        query_cps = [
            cp for cp in store.non_blank_codepoints() if cp not in standard.members
        ]
        mapping: dict[int, tuple[int, float]] = {}
        if query_cps:
            query_m = np.stack([store.pixels(cp) for cp in query_cps]).astype(np.float32)
            query_m /= np.linalg.norm(query_m, axis=1, keepdims=True)
            sims = query_m @ target_m.T  # (q, t)
            # argmax returns the first maximum; targets are in ascending
            # code point order, so ties resolve low.
            best = np.argmax(sims, axis=1)
            for row, cp in enumerate(query_cps):
                mapping[cp] = (
                    targets[int(best[row])],
                    float(min(1.0, sims[row, best[row]])),
                )
        return cls(standard, mapping, fallback=fallback)

    def recover_char(self, ch: str) -> str:
        cp = ord(ch)
        if cp in self.standard.members:
            return ch
        hit = self.mapping.get(cp)
        if hit is not None:
            return chr(hit[0])
        return ch if self.fallback is None else self.fallback

    def recover(self, text: str) -> str:
        return "".join(self.recover_char(ch) for ch in text)

    def save(self, path: str | Path) -> None:
        """Cache as TSV: codepoint, nearest standard codepoint, similarity."""
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(
                "# standard=" + ",".join(map(str, sorted(self.standard.members))) + "\n"
            )
            for cp in sorted(self.mapping):
                std, sim = self.mapping[cp]
                fh.write(f"{cp}\t{std}\t{sim!r}\n")
        tmp.replace(path)

    @classmethod
    def load(cls, path: str | Path, *, fallback: str | None = None) -> "RecoveryMap":
        path = Path(path)
        mapping: dict[int, tuple[int, float]] = {}
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith("# standard="):
                raise ValueError(f"{path}: missing standard-set header")
            members = frozenset(
                int(v) for v in header.partition("=")[2].split(",") if v
            )
            for line in fh:
                cp_field, std_field, sim_field = line.rstrip("\n").split("\t")
                mapping[int(cp_field)] = (int(std_field), float(sim_field))
        return cls(StandardSet(members), mapping, fallback=fallback)


def recover(
    text: str,
    store: EmbeddingStore,
    standard: StandardSet | None = None,
    *,
    fallback: str | None = None,
) -> str:
    """One-shot convenience wrapper; builds the lookup and applies it.

    For repeated calls over a corpus build a RecoveryMap once instead.
    """
    return RecoveryMap.build(store, standard, fallback=fallback).recover(text)

"""Glyph rasterization and the image-based character embedding store.

Each code point the font actually maps is rendered onto a fixed 24x24
grayscale canvas; the flattened 576-component intensity vector is its visual
embedding.  Code points the font sends to the missing-glyph slot get no
embedding at all, so the .notdef box can never masquerade as a look-alike
cluster.  Glyphs that render with zero ink (spaces and friends) are stored
but excluded from similarity candidacy.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Iterator

import numpy as np
from fontTools.ttLib import TTFont
from PIL import Image, ImageDraw, ImageFont

CANVAS_SIZE = 24
EMBEDDING_DIM = CANVAS_SIZE * CANVAS_SIZE
DEFAULT_FONT_SIZE = 20
DEFAULT_K = 20

_SCRATCH = CANVAS_SIZE * 4
_ORIGIN = CANVAS_SIZE  # draw offset inside the scratch image


class FontLoadError(RuntimeError):
    pass


class RenderError(RuntimeError):
    """Rasterizer failure for a code point the font claims to cover."""

    def __init__(self, codepoint: int, cause: str):
        super().__init__(f"failed to render U+{codepoint:04X}: {cause}")
        self.codepoint = codepoint


class ZeroVectorError(ValueError):
    pass


class UnknownCodepointError(KeyError):
    pass


class VisualEmbedding:
    """576-dim grayscale intensity vector for one code point."""

    __slots__ = ("codepoint", "pixels")

    def __init__(self, codepoint: int, pixels: np.ndarray):
        pixels = np.asarray(pixels, dtype=np.uint8)
        if pixels.shape != (EMBEDDING_DIM,):
            raise ValueError(f"expected {EMBEDDING_DIM} components, got {pixels.shape}")
        self.codepoint = codepoint
        self.pixels = pixels

    @property
    def is_blank(self) -> bool:
        return not self.pixels.any()

    def bitmap(self) -> np.ndarray:
        return self.pixels.reshape(CANVAS_SIZE, CANVAS_SIZE)

    def __repr__(self) -> str:
        return f"VisualEmbedding(U+{self.codepoint:04X}, ink={int(self.pixels.sum())})"


def default_font_path() -> Path:
    """Bundled pan-Unicode default font; VIPERKIT_FONT overrides it."""
    env = os.environ.get("VIPERKIT_FONT")
    if env:
        return Path(env)
    return Path(__file__).parent / "data" / "fonts" / "DejaVuSans.ttf"


class GlyphRenderer:
    """Deterministic rasterizer: one code point -> one 24x24 grayscale canvas.

    Glyphs are drawn anti-aliased at a fixed size, horizontally centered by
    ink extent, and vertically placed on a shared baseline so that a letter
    and its accented variants overlap pixel for pixel.  Ink larger than the
    canvas is scaled down to fit (rare: stacked diacritics, wide ideographs).
    """

    def __init__(
        self,
        font_path: str | Path | None = None,
        *,
        canvas: int = CANVAS_SIZE,
        font_size: int = DEFAULT_FONT_SIZE,
    ):
        self.font_path = Path(font_path) if font_path else default_font_path()
        self.canvas = canvas
        self.font_size = font_size
        try:
            self._font = ImageFont.truetype(str(self.font_path), font_size)
            with open(self.font_path, "rb") as fh:
                digest = hashlib.sha256(fh.read()).hexdigest()
            self._cmap = set(TTFont(str(self.font_path), fontNumber=0).getBestCmap())
        except FileNotFoundError:
            raise FontLoadError(f"font file not found: {self.font_path}") from None
        except Exception as exc:
            raise FontLoadError(f"cannot load font {self.font_path}: {exc}") from exc
        self.font_id = f"{self.font_path.name}:sha256:{digest[:16]}"
        ascent, descent = self._font.getmetrics()
        # Shared top-of-ascender row; keeps the baseline identical across glyphs.
        self._ascender_row = max(0, (canvas - (ascent + descent)) // 2)

    def has_glyph(self, codepoint: int) -> bool:
        return codepoint in self._cmap

    def render(self, codepoint: int) -> VisualEmbedding | None:
        """Render one code point, or None when the font has no glyph for it."""
        if codepoint not in self._cmap:
            return None
        try:
            scratch = Image.new("L", (_SCRATCH, _SCRATCH), 0)
            draw = ImageDraw.Draw(scratch)
            draw.text((_ORIGIN, _ORIGIN), chr(codepoint), font=self._font, fill=255)
            bbox = scratch.getbbox()
        except ValueError:
            # surrogate code points cannot form a Python str
            return None
        except Exception as exc:
            raise RenderError(codepoint, str(exc)) from exc

        out = Image.new("L", (self.canvas, self.canvas), 0)
        if bbox is not None:
            ink = scratch.crop(bbox)
            width, height = ink.size
            if width > self.canvas or height > self.canvas:
                scale = min(self.canvas / width, self.canvas / height)
                width = max(1, int(width * scale))
                height = max(1, int(height * scale))
                ink = ink.resize((width, height), Image.LANCZOS)
                top = (self.canvas - height) // 2
            else:
                top = bbox[1] - _ORIGIN + self._ascender_row
                top = min(max(top, 0), self.canvas - height)
            left = (self.canvas - width) // 2
            out.paste(ink, (left, top))
        pixels = np.asarray(out, dtype=np.uint8).reshape(-1)
        return VisualEmbedding(codepoint, pixels)

    def render_params(self) -> dict:
        return {"canvas": self.canvas, "font_size": self.font_size}


class EmbeddingStore:
    """Immutable map from code point to visual embedding, plus provenance.

    Build once per font, then query cosine similarities and nearest
    neighbors; similarity candidacy excludes blank (zero-ink) glyphs.
    """

    def __init__(
        self,
        embeddings: dict[int, np.ndarray],
        font_id: str,
        render_params: dict,
    ):
        self._embeddings = dict(sorted(embeddings.items()))
        self.font_id = font_id
        self.render_params = dict(render_params)
        self._matrix_cache: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    @classmethod
    def build(
        cls,
        font_path: str | Path | None = None,
        *,
        max_codepoint: int = 30000,
        font_size: int = DEFAULT_FONT_SIZE,
    ) -> "EmbeddingStore":
        renderer = GlyphRenderer(font_path, font_size=font_size)
        embeddings: dict[int, np.ndarray] = {}
        for codepoint in range(max_codepoint):
            emb = renderer.render(codepoint)
            if emb is not None:
                embeddings[codepoint] = emb.pixels
        params = renderer.render_params()
        params["max_codepoint"] = max_codepoint
        return cls(embeddings, renderer.font_id, params)

    def __len__(self) -> int:
        return len(self._embeddings)

    def __contains__(self, codepoint: int) -> bool:
        return codepoint in self._embeddings

    def codepoints(self) -> Iterator[int]:
        return iter(self._embeddings)

    def get(self, codepoint: int) -> VisualEmbedding:
        try:
            return VisualEmbedding(codepoint, self._embeddings[codepoint])
        except KeyError:
            raise UnknownCodepointError(codepoint) from None

    def pixels(self, codepoint: int) -> np.ndarray:
        try:
            return self._embeddings[codepoint]
        except KeyError:
            raise UnknownCodepointError(codepoint) from None

    def non_blank_codepoints(self) -> list[int]:
        return [cp for cp, px in self._embeddings.items() if px.any()]

    def _candidate_matrix(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(codepoints, unit-normalized matrix, raw matrix) over non-blank glyphs."""
        if self._matrix_cache is None:
            cps = np.array(self.non_blank_codepoints(), dtype=np.int64)
            raw = np.stack([self._embeddings[cp] for cp in cps]).astype(np.float32)
            norms = np.linalg.norm(raw, axis=1, keepdims=True)
            self._matrix_cache = (cps, raw / norms, raw)
        return self._matrix_cache

    def save(self, path: str | Path) -> None:
        """Write `codepoint TAB space-separated-intensities` rows plus a JSON
        sidecar (same path + .meta.json) recording font id and render params."""
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            for cp, px in self._embeddings.items():
                fh.write(f"{cp}\t{' '.join(map(str, px.tolist()))}\n")
        tmp.replace(path)
        meta = {
            "font_id": self.font_id,
            "render_params": self.render_params,
            "count": len(self._embeddings),
        }
        meta_path = path.with_name(path.name + ".meta.json")
        tmp = meta_path.with_name(meta_path.name + ".tmp")
        tmp.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
        tmp.replace(meta_path)

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingStore":
        path = Path(path)
        meta = json.loads(path.with_name(path.name + ".meta.json").read_text("utf-8"))
        embeddings: dict[int, np.ndarray] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                cp_field, _, px_field = line.rstrip("\n").partition("\t")
                embeddings[int(cp_field)] = np.array(px_field.split(), dtype=np.uint8)
        return cls(embeddings, meta["font_id"], meta["render_params"])


def cosine_similarity(a: VisualEmbedding, b: VisualEmbedding) -> float:
    """Cosine of two embeddings; lies in [0, 1] since intensities are >= 0.

    Raises ZeroVectorError when either embedding has no ink.
    """
    va = a.pixels.astype(np.float64)
    vb = b.pixels.astype(np.float64)
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise ZeroVectorError(
            f"zero-ink embedding in cosine (U+{a.codepoint:04X}, U+{b.codepoint:04X})"
        )
    return float(min(1.0, np.dot(va, vb) / (na * nb)))


def nearest_neighbors(
    codepoint: int, store: EmbeddingStore, k: int = DEFAULT_K
) -> list[tuple[int, float]]:
    """Top-k non-blank code points by descending cosine similarity.

    The query itself is excluded; ties break by ascending code point.
    Raises UnknownCodepointError when the store has no embedding for the
    query, ZeroVectorError when the query glyph is blank.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    query = store.pixels(codepoint)
    if not query.any():
        raise ZeroVectorError(f"U+{codepoint:04X} has a blank glyph")
    cps, unit, _ = store._candidate_matrix()
    q = query.astype(np.float32)
    sims = unit @ (q / np.linalg.norm(q))
    mask = cps != codepoint
    cps, sims = cps[mask], sims[mask]
    order = np.lexsort((cps, -sims))[:k]
    return [(int(cps[i]), float(min(1.0, sims[i]))) for i in order]

"""viperkit: visual character perturbation toolkit.

Build visual neighbor spaces for Unicode characters (from rendered glyphs,
from character names, or from a curated table), perturb text with
probabilistic homoglyph substitution, recover perturbed text back to a
standard alphabet, and measure how much a text classifier degrades under
attack and how much shielding buys back.
"""

__version__ = "0.1.0"

from .catalog import (
    Catalog,
    CharRecord,
    LetterCase,
    MalformedRecordError,
    load_catalog,
    parse_letter_features,
)
from .glyphs import (
    EmbeddingStore,
    GlyphRenderer,
    VisualEmbedding,
    cosine_similarity,
    default_font_path,
    nearest_neighbors,
)
from .spaces import (
    NeighborTable,
    SpaceKind,
    build_dces,
    build_eces,
    build_ices_table,
    load_table,
    save_table,
)

__all__ = [
    "Catalog",
    "CharRecord",
    "LetterCase",
    "MalformedRecordError",
    "load_catalog",
    "parse_letter_features",
    "EmbeddingStore",
    "GlyphRenderer",
    "VisualEmbedding",
    "cosine_similarity",
    "default_font_path",
    "nearest_neighbors",
    "NeighborTable",
    "SpaceKind",
    "build_dces",
    "build_eces",
    "build_ices_table",
    "load_table",
    "save_table",
    "__version__",
]

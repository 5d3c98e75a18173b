"""Generative sampling of inorganic composition space.

Pipeline: ingest/screen formula datasets, encode compositions as binary
count matrices, train a weight-clipped Wasserstein GAN (and a dice-loss
autoencoder for decodability screening), generate candidates, filter them
with charge-neutrality / electronegativity rules, and evaluate validity,
uniqueness, novelty and enrichment against an exhaustive-enumeration
baseline.
"""

__version__ = "0.1.0"

from .composition import (
    MAX_ATOMS,
    Composition,
    canonical_formula,
    decode_activation,
    encode_batch,
    encode_composition,
    format_formula,
    parse_formula,
)
from .elements import (
    ElementRecord,
    ElementTable,
    ElementVocabulary,
    bundled_table,
    load_element_table,
    vocabulary_from_dataset,
)
from .validity import (
    OxidationAssignment,
    ValidityVerdict,
    assignment_en_balanced,
    classify_batch,
    classify_validity,
    neutral_assignments,
)

__all__ = [
    "MAX_ATOMS",
    "Composition",
    "ElementRecord",
    "ElementTable",
    "ElementVocabulary",
    "OxidationAssignment",
    "ValidityVerdict",
    "__version__",
    "assignment_en_balanced",
    "bundled_table",
    "canonical_formula",
    "classify_batch",
    "classify_validity",
    "decode_activation",
    "encode_batch",
    "encode_composition",
    "format_formula",
    "load_element_table",
    "neutral_assignments",
    "parse_formula",
    "vocabulary_from_dataset",
]

"""Finite-depth counterexamples to absolute continuity of superpositions.

Exact rational descriptors for the Schwarz function, non-Lipschitz
primitives, zigzag Lipschitz paths and the separately-Lipschitz pyramid
surface, with variation, Lipschitz, distribution and L^p certificates.
"""

__version__ = "0.1.0"

from .constructions import (
    SeqSpec,
    build_pathology,
    build_zigzag,
    find_witnesses,
    gallery,
    lnx_tail_sequence,
    parse_seq,
    rademacher,
    schauder,
    schauder_separation,
    seq_transform,
)
from .measure import DerivativeField, distribution, dominance_check, lp_norm, verify_bounds
from .realfn import Interval, Partition, compose, compose2, diagonal, lift, section
from .variation import ac_modulus, lipschitz_estimate, total_variation, variation_refined

__all__ = [
    "DerivativeField",
    "Interval",
    "Partition",
    "SeqSpec",
    "ac_modulus",
    "build_pathology",
    "build_zigzag",
    "compose",
    "compose2",
    "diagonal",
    "distribution",
    "dominance_check",
    "find_witnesses",
    "gallery",
    "lift",
    "lipschitz_estimate",
    "lnx_tail_sequence",
    "lp_norm",
    "parse_seq",
    "rademacher",
    "schauder",
    "schauder_separation",
    "section",
    "seq_transform",
    "total_variation",
    "variation_refined",
    "verify_bounds",
]

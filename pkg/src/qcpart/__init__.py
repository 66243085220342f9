"""qcpart: layered-decoding partition schemes for QC-LDPC codes.

Tools to split the rows of a quasi-cyclic parity-check matrix into decoding
layers whose supports are block cyclic shifts of one another, to construct
new QC-LDPC codes that admit such partitions by design, and to validate the
results with a layered sum-product decoder over an AWGN channel.
"""

from .qc import BaseMatrix, SparsePcm, bundled_matrix, expand, load_base_matrix, parse_base_matrix

__all__ = [
    "BaseMatrix",
    "SparsePcm",
    "bundled_matrix",
    "expand",
    "load_base_matrix",
    "parse_base_matrix",
]

__version__ = "0.1.0"

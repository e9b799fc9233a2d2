"""Magic-square enumeration, binary parity patterns, and PCA/LDA analysis."""

from .core import (
    D4Transform,
    FamilySpec,
    MsqError,
    Square,
    apply_d4,
    complement,
    frenicle_form,
    is_associative,
    is_franklin,
    is_magic,
    is_pandiagonal,
    is_ultra,
    magic_constant,
)

__version__ = "0.1.0"

__all__ = [
    "D4Transform", "FamilySpec", "MsqError", "Square", "apply_d4",
    "complement", "frenicle_form", "is_associative", "is_franklin",
    "is_magic", "is_pandiagonal", "is_ultra", "magic_constant",
    "__version__",
]

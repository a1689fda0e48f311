"""Integrable highest weight modules, crystal lattices and braid operators."""

from .braid import (braid, braid_matrix, braid_word, conjugated_raising, conjugated_raising_matrix,
                    word_matrix)
from .crystal import (CrystalLattice, HighestVerdict, NotInLattice, a_infinity_basis, build_crystal_lattice,
                      congruent_at_infinity, highest_at_infinity, kashiwara, kashiwara_matrices)
from .module import (CapExceeded, InternalInconsistency, RelationReport, WeightModuleRealization, act,
                     build_irreducible, contragredient_form, divided_power, divided_power_chain,
                     extremal_vector, gram_blocks, gram_matrix, rho_image, tensor, tensor_vectors,
                     verify_relations)
from .serialize import parse_realization, render_realization

__all__ = [
    "CapExceeded", "CrystalLattice", "HighestVerdict", "InternalInconsistency", "NotInLattice",
    "RelationReport", "WeightModuleRealization", "a_infinity_basis", "act", "braid", "braid_matrix",
    "braid_word", "build_crystal_lattice", "build_irreducible", "congruent_at_infinity",
    "conjugated_raising", "conjugated_raising_matrix", "contragredient_form", "divided_power",
    "divided_power_chain", "extremal_vector", "gram_blocks", "gram_matrix", "highest_at_infinity",
    "kashiwara", "kashiwara_matrices", "parse_realization", "render_realization", "rho_image",
    "tensor", "tensor_vectors", "verify_relations", "word_matrix",
]

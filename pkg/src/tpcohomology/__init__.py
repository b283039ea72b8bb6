"""Tangential Poisson cohomology of Lie-Poisson structures over localized polynomial rings."""
from .catalog import CatalogEntry, LieSpec, available_entries, lie_poisson, lie_spec, load_all, load_entry, verify_entry
from .cohomology import TruncationSpec, casimir_basis, is_exact, truncated_dimensions
from .ring import LocElem, Poly, RingSpec
from .schouten import PoissonStructure, hamiltonian_field, schouten_bracket, sharp, sigma
from .splitting import Splitting, make_splitting
from .tensors import KForm, MultiVec

__all__ = [
    "CatalogEntry", "KForm", "LieSpec", "LocElem", "MultiVec", "PoissonStructure", "Poly", "RingSpec",
    "Splitting", "TruncationSpec", "available_entries", "casimir_basis", "hamiltonian_field", "is_exact",
    "lie_poisson", "lie_spec", "load_all", "load_entry", "make_splitting", "schouten_bracket", "sharp",
    "sigma", "truncated_dimensions", "verify_entry",
]

"""Molecular descriptors: counting features, logP, polar surface area, and
the drug-likeness score, all backed by provenance-checked parameter tables."""
from .basic import (
    aromatic_ring_count,
    branching_degree,
    formal_charge_total,
    halogen_count,
    hba_count,
    hbd_count,
    heavy_atom_count,
    hetero_atom_count,
    molecular_weight,
    ring_count,
    rotatable_bonds,
    symmetry_class_count,
)
from .crippen import crippen_atom_types, crippen_logp
from .qed import alert_count, qed, qed_properties
from .registry import (
    DescriptorRegistry,
    compute,
    default_registry,
    descriptor_names,
)
from .tables import ParameterTable, load_table
from .tpsa import tpsa
from .vector import descriptor_matrix, descriptor_vector

__all__ = [
    "molecular_weight",
    "heavy_atom_count",
    "hetero_atom_count",
    "formal_charge_total",
    "hbd_count",
    "hba_count",
    "halogen_count",
    "ring_count",
    "aromatic_ring_count",
    "rotatable_bonds",
    "branching_degree",
    "symmetry_class_count",
    "tpsa",
    "crippen_logp",
    "crippen_atom_types",
    "qed",
    "qed_properties",
    "alert_count",
    "DescriptorRegistry",
    "default_registry",
    "compute",
    "descriptor_names",
    "descriptor_vector",
    "descriptor_matrix",
    "ParameterTable",
    "load_table",
]

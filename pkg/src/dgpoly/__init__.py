"""Polymorphism conditions on finite digraphs: constructions, solvers and table transforms."""

from .constructions import (
    cycle,
    direct_product,
    disjoint_union,
    extend_bottom,
    extend_bottom_top,
    extend_top,
    interval_extension,
    single_vertex,
    structured_union,
    transitive_tournament,
)
from .dgformat import format_dg, parse_dg, read_dg, write_dg
from .homsolver import core_of, enumerate_homomorphisms, find_homomorphism
from .identities import IdentitySystem, named_system, parse_condition
from .polyconstruct import OperationTable, verify
from .polysolver import analyze, build_indicator, has_polymorphisms, min_parameter, no_gumm_witness
from .structures import RelStruct, build_structure

__version__ = "0.1.0"

"""Symbolic alternating finite automata with equivalence checking by
bisimulation up to congruence."""

from . import pbf
from .algebra import Algebra, AlgebraError, BitVectorAlgebra, IntervalAlgebra, MAX_CODEPOINT
from .automaton import (
    Safa,
    complement,
    intersection,
    intersect_all,
    is_normal,
    normalize,
    prune,
    reverse,
    union,
)
from .baseline import Sfa, reverse_equivalent, sfa_equiv
from .congruence import CongruenceContext, congruent
from .equivalence import EquivResult, EquivStats, Timeout, is_empty, is_equivalent
from .formats import FormatError, dump_safa, load_safa, parse_safa
from .pbf import Pbf

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "AlgebraError",
    "BitVectorAlgebra",
    "CongruenceContext",
    "EquivResult",
    "EquivStats",
    "FormatError",
    "IntervalAlgebra",
    "MAX_CODEPOINT",
    "Pbf",
    "Safa",
    "Sfa",
    "Timeout",
    "complement",
    "congruent",
    "dump_safa",
    "intersect_all",
    "intersection",
    "is_empty",
    "is_equivalent",
    "is_normal",
    "load_safa",
    "normalize",
    "parse_safa",
    "pbf",
    "prune",
    "reverse",
    "reverse_equivalent",
    "sfa_equiv",
    "union",
]

"""Satisfiability for a three-sorted quantified set-theory fragment.

Individuals, sets of individuals and collections of sets; restricted
quantification over individuals and sets; finite enumerations.  The
decision procedure normalizes a formula, checks that its nested
universals are linked, and searches for models up to a size bound
computed from the formula.
"""

from .encoders import (
    bell,
    build_cardinality,
    build_level0,
    build_level1,
    build_pow_star,
    build_ucp_disjoint,
    build_ucp_enum,
    build_ucp_partition,
    build_ucp_same,
    length_report,
    partitions,
    ucp_oracle,
)
from .errors import NotInFragment, ParseError, ResourceLimit
from .fragment import check_fragment
from .normalize import normalize
from .parser import parse, parse_file, render
from .relativize import build_universe, domain_bound, relativize, relativized_model
from .semantics import Interpretation, enumerate_models, evaluate, find_model
from .solver import Budget, SatResult, decide

__version__ = "0.1.0"

"""Learning bimonoid recognisers for series-parallel pomset languages."""

from .pomset import (
    ONE,
    HOLE_TERM,
    Context,
    Pomset,
    compose,
    decompose,
    enumerate_pomsets,
    letter,
    par,
    parse,
    parse_context,
    plug,
    plug_context,
    seq,
    subterms,
)

__version__ = "0.1.0"

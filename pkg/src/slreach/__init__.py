"""Workbench for propositional separation logic with reachability predicates:
parsing, model checking, heap abstraction by test formulae, small-model
shrinking, satisfiability for the decidable fragments, and the encoding of
first-order separation logic into the propositional language."""

from .heaps import (
    Heap,
    MemoryState,
    OverlapError,
    compose,
    extensions,
    isomorphic_wrt,
    iterate,
    load_state,
    save_state,
    subheaps,
)
from .parser import ParseError, parse, to_text
from .semantics import (
    CheckResult,
    WandPolicy,
    WandForbiddenError,
    check,
    check_exact,
    sl_star_wand_bound,
)
from .solver import (
    FragmentError,
    SatResult,
    brute_sat,
    counterexample,
    entails,
    sat,
    sat_bool_shf,
    sat_boolcomb,
    sat_reachplus,
)
from .support import build_support_graph, meet_point, term_value
from .syntax import Fragment, classify, expand_macro, msize, rewrite_reach
from .testform import (
    LiteralProfile,
    encode_atomic,
    equivalent,
    match_split,
    profile,
    shrink,
    small_heap_bound,
)
from .fowand import (
    EncodingContext,
    check_fo,
    encode_sat,
    encode_state,
    encode_val,
    parse_fo,
    translate,
)

__all__ = [name for name in dir() if not name.startswith("_")]

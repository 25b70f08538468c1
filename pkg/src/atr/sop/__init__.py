"""Second-order polynomials: syntax, typing, evaluation, normalization and safety."""

from .eval import Curried, GridFn, exact_length, length_env, sop_eval
from .gr import GR_SIGMA, gr_safe_bound, random_gr
from .normal import beta_normalize, shadowed_occurrences, sop_depth, subterm_at
from .poly import (
    Ap, Lam, Max, Pair, PC, Pi1, Pi2, Plus, Poly, QC, RC, RIter, Succ, Tally, Times, V, ONE, ZERO,
    apply, free_vars, parse_poly, plus, show, subst, times, vmax,
)
from .safe import NotSafe, SafeForm, classify_safe, decompose, poly_label, safe_substitute
from .types import COST, Prod, T, format_size_type, parse_size_type, pot_type, tc_type
from .typing import sop_typecheck

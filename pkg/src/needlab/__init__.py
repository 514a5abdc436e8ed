"""Lambda-calculus laboratory for needed reduction, non-idempotent
intersection types and call-by-need evaluation."""

from .syntax import Abs, App, Closure, Term, Var, alpha_eq, occurrences, parse, replace_at, subterm_at
from .reduction import contract, leftmost_redex, redex_occurrences, run_strategy
from .neededness import brute_force_classify, classify
from .typesys import Derivation, typed_occurrences, validate
from .derivations import expand_derivation, infer_principal, reduce_derivation, whnd_redexes_by_typing
from .cbneed import eval_need, unfold

__version__ = "0.1.0"

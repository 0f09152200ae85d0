"""Exact symbolic kernel for the string oscillator algebra and its Yangian-style bialgebra."""

from .algebra import (
    H,
    Algebra,
    BracketTable,
    Element,
    Generator,
    IndexedParam,
    Params,
    a,
    b,
    bracket_gen,
    builtin_table,
    commutator,
    grade,
    multiply,
    normal_order,
    render,
)
from .checks import check_bialgebra, check_casimir, check_jacobi, homomorphism_residual
from .derivation import derive_fg_epsilon, solve_central, solve_delta_prime, solve_gamma
from .dsl import load_presentation, load_profile, parse_expression, parse_presentation
from .errors import AlgebraError, ParseError
from .presentation import Presentation, builtin_presentation
from .tensor import (
    Bialgebra,
    TensorElement,
    casimir_bracket,
    casimir_invariance_check,
    coproduct,
    counit,
    delta_prime,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

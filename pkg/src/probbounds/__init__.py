"""Sound probability bounds for events described by boolean formulas.

Given probabilities (or intervals) for some events, compute the tightest
interval for another event exactly on small problems, or a sound relaxed
interval from families of valid linear inequalities on larger ones.
"""

from .algebra import (
    ClauseMatrix,
    MonotoneBasis,
    atoms_to_basis,
    basis_to_atoms,
    clause_matrices_direct,
    clause_matrices_recursive,
    graded_tensor,
)
from .atoms import AtomSpace, AtomVector
from .engine import (
    BoundResult,
    Consistent,
    Inconsistent,
    RefinementConfig,
    bound,
    check_consistency,
    fuzzy_evaluate,
    refine,
)
from .errors import InfeasibleSystemError, ParseError, ResourceLimitError, UndeclaredVariableError
from .formula import CnfFormula, CnfMode, parse_expression, render, to_cnf, truth_table
from .inequalities import (
    LinearInequality,
    SymmetricSpec,
    compound,
    escalator_lift,
    flip_transform,
    generate_family,
    is_valid,
    negate_variable,
    parity_check,
    parse_inequality,
    permute_variables,
    synthesize,
)
from .kb import Assertion, KnowledgeBase
from .lp import Infeasible, LinearProgram, Optimal, Unbounded, solve, verify_outcome
from .linear import LinearSystem, Row
from .problem import load_problem, parse_problem
from .projection import enumerate_facets, fm_eliminate, oracle_bounds, project

__version__ = "0.1.0"

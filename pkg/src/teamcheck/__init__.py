"""Team-semantics model checking and weighted team definability.

Evaluates dependence, inclusion, and independence logic formulas over
finite relational structures, searches for satisfying teams of a given
size, and ships the instance encoders and brute-force oracles used to
cross-validate everything.
"""

from .errors import EvaluationError, ParseError, TeamcheckError
from .evaluator import check_sentence, eval_fo_tarski, eval_team
from .formulas import (
    And,
    Const,
    Dep,
    Eq,
    Exists,
    Forall,
    Formula,
    FragmentReport,
    Inc,
    Indep,
    Neq,
    NegRel,
    Or,
    Rel,
    Var,
    classify,
    free_vars,
    parse,
    render,
)
from .inclusion import eval_inclusion, max_subteam
from .model import (
    Structure,
    Team,
    Vocabulary,
    all_assignments,
    duplicate,
    parse_structure,
    parse_team,
    rel,
    render_structure,
    render_team,
    restrict,
    supplement,
)
from .prop import PAnd, PLit, POr, PropFormula, gamma_class, parse_prop, render_prop
from .reductions import (
    BooleanCircuit,
    Graph,
    build_syntax_circuit,
    circuit_eval,
    encode_clique,
    encode_domset,
    encode_indset,
    encode_wsat,
    graph_brute,
    parse_circuit,
    parse_graph,
    phi_inclusion,
    proof_tree_exists,
    render_circuit,
    render_graph,
    theta_formula,
    wsat_brute,
)
from .solver import (
    WdFormula,
    WtInstance,
    wd_check,
    wd_solve,
    wt_solve,
    wt_solve_fo,
    wt_solve_sentence,
)

__all__ = [name for name in dir() if not name.startswith("_")]

"""Polynomial evaluation of inclusion-logic formulas via maximal subteams.

Satisfying teams of a formula built from first-order literals and inclusion
atoms are closed under unions, so every team has a unique maximal
satisfying subteam: the union of all satisfying subteams.  ``max_subteam``
computes it compositionally:

* literals keep the rows satisfying them pointwise;
* an inclusion atom repeatedly deletes rows whose left value is missing
  from the surviving right values;
* a disjunction takes the union of its operands' maximal subteams;
* a conjunction alternates the two operands to a mutual fixpoint;
* an existential keeps rows with at least one surviving extension in the
  maximal subteam of the duplicated team;
* a universal repeatedly keeps rows all of whose extensions survive.

``eval_inclusion`` then reports whether the maximal subteam is the whole
team.  Correctness is established in the test suite purely by agreement
with the exhaustive evaluator and with subteam enumeration.
"""

from __future__ import annotations

from .errors import EvaluationError
from .formulas import (
    And,
    Eq,
    Exists,
    Forall,
    Formula,
    Inc,
    Neq,
    NegRel,
    Or,
    Rel,
    Term,
    Var,
    atom_set,
    free_vars,
)
from .model import Row, Structure, Team, duplicate


def _require_inclusion_fragment(formula: Formula) -> None:
    banned = atom_set(formula) & {"dep", "indep"}
    if banned:
        raise EvaluationError(
            f"the fixpoint evaluator handles only literals and inclusion atoms, got {sorted(banned)}"
        )


def _value_getter(structure: Structure, team: Team, terms: tuple[Term, ...]):
    plan: list[tuple[bool, int]] = []
    for term in terms:
        if isinstance(term, Var):
            try:
                plan.append((True, team.variables.index(term.name)))
            except ValueError:
                raise EvaluationError(
                    f"free variable {term.name!r} is not in the team domain {team.variables}"
                ) from None
        else:
            try:
                plan.append((False, structure.constants[term.name]))
            except KeyError:
                raise EvaluationError(f"unknown constant {term.name!r}") from None

    def get(row: Row) -> Row:
        return tuple(row[i] if is_var else i for is_var, i in plan)

    return get


def _literal_rows(structure: Structure, team: Team, formula: Formula) -> frozenset[Row]:
    if isinstance(formula, Eq):
        get = _value_getter(structure, team, (formula.left, formula.right))
        return frozenset(r for r in team.rows if (lambda ab: ab[0] == ab[1])(get(r)))
    if isinstance(formula, Neq):
        get = _value_getter(structure, team, (formula.left, formula.right))
        return frozenset(r for r in team.rows if (lambda ab: ab[0] != ab[1])(get(r)))
    if isinstance(formula, (Rel, NegRel)):
        try:
            relation = structure.relations[formula.name]
        except KeyError:
            raise EvaluationError(f"unknown relation {formula.name!r}") from None
        get = _value_getter(structure, team, formula.terms)
        if isinstance(formula, Rel):
            return frozenset(r for r in team.rows if get(r) in relation)
        return frozenset(r for r in team.rows if get(r) not in relation)
    raise EvaluationError(f"unexpected node {type(formula).__name__}")


def _extensions(structure: Structure, team: Team, variable: str, row: Row) -> list[Row]:
    new_vars = tuple(sorted(set(team.variables) | {variable}))
    at = new_vars.index(variable)
    if variable in team.variables:
        return [row[:at] + (a,) + row[at + 1:] for a in structure.elements]
    return [row[:at] + (a,) + row[at:] for a in structure.elements]


def max_subteam(structure: Structure, team: Team, formula: Formula) -> Team:
    """The unique maximal subteam satisfying the formula."""
    _require_inclusion_fragment(formula)
    missing = free_vars(formula) - team.domain()
    if missing:
        raise EvaluationError(f"free variables {sorted(missing)} are not in the team domain")
    return _max(structure, team, formula)


def _max(structure: Structure, team: Team, formula: Formula) -> Team:
    if isinstance(formula, (Eq, Neq, Rel, NegRel)):
        return Team(team.variables, _literal_rows(structure, team, formula))
    if isinstance(formula, Inc):
        get_left = _value_getter(structure, team, formula.left)
        get_right = _value_getter(structure, team, formula.right)
        rows = set(team.rows)
        while True:
            right_values = {get_right(r) for r in rows}
            surviving = {r for r in rows if get_left(r) in right_values}
            if surviving == rows:
                return Team(team.variables, frozenset(rows))
            rows = surviving
    if isinstance(formula, Or):
        left = _max(structure, team, formula.left)
        right = _max(structure, team, formula.right)
        return Team(team.variables, left.rows | right.rows)
    if isinstance(formula, And):
        current = team
        while True:
            passed = _max(structure, _max(structure, current, formula.left), formula.right)
            if passed.rows == current.rows:
                return current
            current = passed
    if isinstance(formula, Exists):
        dup = duplicate(structure, team, formula.variable)
        surviving = _max(structure, dup, formula.body).rows
        keep = [
            row
            for row in team.rows
            if any(ext in surviving for ext in _extensions(structure, team, formula.variable, row))
        ]
        return Team(team.variables, frozenset(keep))
    if isinstance(formula, Forall):
        current = team
        while True:
            dup = duplicate(structure, current, formula.variable)
            surviving = _max(structure, dup, formula.body).rows
            keep = frozenset(
                row
                for row in current.rows
                if all(ext in surviving for ext in _extensions(structure, current, formula.variable, row))
            )
            if keep == current.rows:
                return current
            current = Team(current.variables, keep)
    raise EvaluationError(f"unexpected node {type(formula).__name__}")


def eval_inclusion(structure: Structure, team: Team, formula: Formula) -> bool:
    """Team satisfaction for inclusion-logic formulas in polynomial time."""
    return max_subteam(structure, team, formula).rows == team.rows

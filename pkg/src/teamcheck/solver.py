"""Weighted team search and weighted definability with a free relation symbol.

``wt_solve`` looks for a team of exactly ``k`` distinct assignments over
the formula's free variables.  Candidate teams are enumerated in colex
order over assignment indices (assignments ordered as ``all_assignments``
yields them), so witnesses are reproducible.  Three exact refinements keep
the search tractable without changing verdicts or witnesses:

* rows failing a top-level literal conjunct are excluded up front — every
  row of a satisfying team must satisfy such literals pointwise;
* on downward-closed fragments (no inclusion/independence atoms), partial
  teams that already fail can be pruned, since supersets of failing teams
  fail too;
* branches that cannot reach ``k`` rows are cut by counting.

Per-candidate checks dispatch by fragment: first-order formulas are counted
via Tarski evaluation, inclusion formulas use the polynomial fixpoint,
dependence formulas the strict evaluator, everything else the generic lax
evaluator.  ``fast_path="off"`` forces the generic evaluator for every
check (pruning then also uses it).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .errors import EvaluationError
from .evaluator import (
    DEFAULT_CACHE_ENTRIES,
    _Evaluator,
    check_sentence,
    eval_fo_tarski,
    is_pointwise,
)
from .formulas import And, Formula, NegRel, Rel, classify, free_vars, subformulas
from .inclusion import eval_inclusion
from .model import Row, Structure, Team, canonical_rows


@dataclass(frozen=True)
class WtInstance:
    """One weighted team definability question: structure, formula, team size."""

    structure: Structure
    formula: Formula
    k: int

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("team size must be nonnegative")


@dataclass(frozen=True)
class WdFormula:
    """A first-order formula over the vocabulary plus one free relation symbol."""

    formula: Formula
    symbol: str = "S"
    arity: int = 1

    def occurrences(self) -> tuple[str, ...]:
        """Polarity of each occurrence of the free symbol, in syntactic order."""
        out = []
        for sub in subformulas(self.formula):
            if isinstance(sub, Rel) and sub.name == self.symbol:
                out.append("positive")
            elif isinstance(sub, NegRel) and sub.name == self.symbol:
                out.append("negative")
        return tuple(out)


def _top_level_literals(formula: Formula) -> list[Formula]:
    if isinstance(formula, And):
        return _top_level_literals(formula.left) + _top_level_literals(formula.right)
    if is_pointwise(formula) and not isinstance(formula, And):
        return [formula]
    return []


def colex_subsets(
    indices: int,
    k: int,
    extendable: Callable[[tuple[int, ...]], bool] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Size-k index subsets in colex order, with optional partial-choice pruning.

    Partial choices are passed largest-index-first; when ``extendable``
    returns false for a partial, every candidate extending it is skipped.
    """

    def rec(limit: int, chosen: tuple[int, ...], need: int) -> Iterator[tuple[int, ...]]:
        if need == 0:
            yield chosen
            return
        for m in range(need - 1, limit):
            extended = chosen + (m,)
            if extendable is not None and not extendable(extended):
                continue
            yield from rec(m, extended, need - 1)

    yield from rec(indices, (), k)


def wt_solve(
    instance: WtInstance,
    *,
    fast_path: str = "auto",
    max_cache_entries: int = DEFAULT_CACHE_ENTRIES,
) -> Team | None:
    """First witnessing team of exactly ``k`` rows, or ``None``.

    ``k = 0`` always yields the empty team (every formula holds on it).
    For sentences only ``k <= 1`` can succeed.
    """
    if fast_path not in ("auto", "off"):
        raise ValueError("fast_path must be 'auto' or 'off'")
    structure, formula, k = instance.structure, instance.formula, instance.k
    variables = tuple(sorted(free_vars(formula)))
    if k == 0:
        return Team.empty(variables)
    if not variables:
        if k == 1 and _sentence_holds(structure, formula, fast_path, max_cache_entries):
            return Team.singleton_empty_assignment()
        return None
    report = classify(formula)
    rows = canonical_rows(structure.domain_size, variables)

    evaluator = _Evaluator(structure, strict=False, max_cache_entries=max_cache_entries)
    strict_evaluator = _Evaluator(structure, strict=True, max_cache_entries=max_cache_entries)

    def lax_check(team_rows: Iterable[Row]) -> bool:
        return evaluator.check(Team(variables, frozenset(team_rows)), formula)

    def strict_check(team_rows: Iterable[Row]) -> bool:
        return strict_evaluator.check(Team(variables, frozenset(team_rows)), formula)

    def inclusion_check(team_rows: Iterable[Row]) -> bool:
        return eval_inclusion(structure, Team(variables, frozenset(team_rows)), formula)

    if fast_path == "auto" and report.fragment == "FO":
        satisfying = [
            row
            for row in rows
            if eval_fo_tarski(structure, dict(zip(variables, row)), formula)
        ]
        if len(satisfying) < k:
            return None
        return Team(variables, frozenset(satisfying[:k]))

    if fast_path == "auto":
        if report.fragment == "FO(inc)":
            check = inclusion_check
        elif report.fragment == "FO(dep)":
            check = strict_check
        else:
            check = lax_check
    else:
        check = lax_check

    downward = report.fragment in ("FO", "FO(dep)")
    prune_check = strict_check if (fast_path == "auto" and report.fragment == "FO(dep)") else lax_check

    allowed_indices = list(range(len(rows)))
    literals = _top_level_literals(formula)
    if literals:
        conjunction = literals[0]
        for lit in literals[1:]:
            conjunction = And(conjunction, lit)
        allowed_indices = [
            i
            for i in allowed_indices
            if eval_fo_tarski(structure, dict(zip(variables, rows[i])), conjunction)
        ]
    if len(allowed_indices) < k:
        return None

    extendable = None
    if downward:
        def extendable(partial: tuple[int, ...]) -> bool:
            return prune_check(rows[allowed_indices[i]] for i in partial)

    for combo in colex_subsets(len(allowed_indices), k, extendable):
        team_rows = frozenset(rows[allowed_indices[i]] for i in combo)
        if check(team_rows):
            return Team(variables, team_rows)
    return None


def _sentence_holds(structure: Structure, formula: Formula, fast_path: str, max_cache_entries: int) -> bool:
    if fast_path == "off":
        from .evaluator import eval_team

        return eval_team(
            structure,
            Team.singleton_empty_assignment(),
            formula,
            max_cache_entries=max_cache_entries,
        )
    return check_sentence(structure, formula, max_cache_entries=max_cache_entries)


def wt_solve_fo(structure: Structure, formula: Formula, k: int) -> bool:
    """Decide the weighted question for first-order formulas by counting.

    First-order satisfaction is flat, so a size-k team exists exactly when
    at least k assignments satisfy the formula.
    """
    report = classify(formula)
    if report.fragment != "FO":
        raise EvaluationError("the counting path applies to first-order formulas only")
    if k < 0:
        raise ValueError("team size must be nonnegative")
    variables = tuple(sorted(report.free_variables))
    count = 0
    for row in canonical_rows(structure.domain_size, variables):
        if eval_fo_tarski(structure, dict(zip(variables, row)), formula):
            count += 1
            if count >= k:
                return True
    return count >= k


def wt_solve_sentence(structure: Structure, formula: Formula, k: int) -> bool:
    """Weighted question for sentences: only the teams of size 0 and 1 exist."""
    if free_vars(formula):
        raise EvaluationError("expected a sentence without free variables")
    if k < 0:
        raise ValueError("team size must be nonnegative")
    if k == 0:
        return True
    if k == 1:
        return check_sentence(structure, formula)
    return False


def wd_check(structure: Structure, wd: WdFormula, interpretation: Iterable[Row]) -> bool:
    """Tarski truth of the formula with the free symbol interpreted by the given tuples."""
    tuples = frozenset(tuple(t) for t in interpretation)
    for tup in tuples:
        if len(tup) != wd.arity:
            raise EvaluationError(f"tuple {tup} does not match free-symbol arity {wd.arity}")
        if any(not (0 <= v < structure.domain_size) for v in tup):
            raise EvaluationError(f"tuple {tup} mentions elements outside the domain")
    if structure.vocabulary.relation_arity(wd.symbol) is not None:
        raise EvaluationError(f"free symbol {wd.symbol!r} clashes with the vocabulary")
    if free_vars(wd.formula):
        raise EvaluationError("weighted definability formulas must be sentences")
    return eval_fo_tarski(structure, {}, wd.formula, extra_relations={wd.symbol: tuples})


def wd_solve(structure: Structure, wd: WdFormula, k: int) -> frozenset[Row] | None:
    """First size-k interpretation of the free symbol making the formula true."""
    if k < 0:
        raise ValueError("solution size must be nonnegative")
    universe = list(itertools.product(structure.elements, repeat=wd.arity))
    if k > len(universe):
        return None
    for combo in colex_subsets(len(universe), k):
        interpretation = frozenset(universe[i] for i in combo)
        if wd_check(structure, wd, interpretation):
            return interpretation
    return None

import itertools

import pytest

from teamcheck.errors import EvaluationError
from teamcheck.evaluator import check_sentence, eval_fo_tarski, eval_team
from teamcheck.formulas import parse
from teamcheck.model import Structure, Team, Vocabulary
from teamcheck.reductions import Graph, encode_indset

GRAPH_VOCAB = Vocabulary(relations=(("E", 2),))


def graph_structure(n, directed_edges):
    return Structure(GRAPH_VOCAB, n, {"E": frozenset(directed_edges)})


def k3():
    return graph_structure(3, [(a, b) for a in range(3) for b in range(3) if a != b])


class TestAtoms:
    def test_inclusion_atom_on_swap_team(self):
        team = Team.make(["x", "y"], [(1, 2), (2, 1)])
        assert eval_team(graph_structure(3, []), team, parse("inc(x;y)"))

    def test_dependence_atom_detects_conflict(self):
        team = Team.make(["x", "y"], [(0, 1), (0, 2)])
        assert not eval_team(graph_structure(3, []), team, parse("dep(x;y)"))
        assert eval_team(graph_structure(3, []), team, parse("dep(y;x)"))

    def test_constancy_shorthand(self):
        team = Team.make(["x", "y"], [(0, 1), (0, 2)])
        assert eval_team(graph_structure(3, []), team, parse("dep(;x)"))
        assert not eval_team(graph_structure(3, []), team, parse("dep(;y)"))

    def test_independence_atom_rectangle(self):
        rect = Team.make(["x", "y"], [(0, 0), (0, 1), (1, 0), (1, 1)])
        bent = Team.make(["x", "y"], [(0, 0), (0, 1), (1, 0)])
        structure = graph_structure(2, [])
        assert eval_team(structure, rect, parse("indep(;x;y)"))
        assert not eval_team(structure, bent, parse("indep(;x;y)"))

    def test_unknown_relation_raises(self):
        with pytest.raises(EvaluationError):
            eval_team(graph_structure(2, []), Team.make(["x"], [(0,)]), parse("F(x)"))

    def test_missing_free_variable_raises(self):
        with pytest.raises(EvaluationError):
            eval_team(k3(), Team.make(["x"], [(0,)]), parse("E(x,y)"))


class TestEmptyTeamProperty:
    FORMULAS = [
        "E(x,y)",
        "x!=x",
        "dep(x;y)",
        "inc(x;y)",
        "indep(x;y;x)",
        "forall u exists v (E(u,v) & inc(v;x) & dep(u;y))",
    ]

    @pytest.mark.parametrize("text", FORMULAS)
    def test_empty_team_satisfies_everything(self, text):
        formula = parse(text)
        team = Team.empty(sorted({"x", "y"}))
        assert eval_team(k3(), team, formula)


class TestIndependentSetExample:
    def setup_method(self):
        # path graph on three vertices, encoded with vertex and edge elements
        self.instance = encode_indset(Graph.make(3, [(0, 1), (1, 2)]), 2)

    def test_nonadjacent_pair_satisfies(self):
        team = Team.make(["x"], [(0,), (2,)])
        assert eval_team(self.instance.structure, team, self.instance.formula)

    def test_adjacent_pair_fails(self):
        team = Team.make(["x"], [(0,), (1,)])
        assert not eval_team(self.instance.structure, team, self.instance.formula)

    def test_strict_mode_agrees(self):
        for rows in [[(0,), (2,)], [(0,), (1,)]]:
            team = Team.make(["x"], rows)
            lax = eval_team(self.instance.structure, team, self.instance.formula)
            strict = eval_team(self.instance.structure, team, self.instance.formula, strict=True)
            assert lax == strict


class TestLaxSearch:
    def test_disjunction_needs_a_cover_not_pointwise_choice(self):
        # neither disjunct alone holds, but the team splits
        structure = graph_structure(2, [(0, 1)])
        team = Team.make(["x", "y"], [(0, 1), (1, 0)])
        assert eval_team(structure, team, parse("E(x,y) | E(y,x)"))
        assert not eval_team(structure, team, parse("E(x,y) & E(y,x)"))

    def test_disjunction_with_team_atoms_allows_overlap(self):
        structure = graph_structure(3, [])
        team = Team.make(["x", "y"], [(0, 0), (1, 1), (2, 2)])
        assert eval_team(structure, team, parse("inc(x;y) | inc(y;x)"))

    def test_existential_uses_value_sets(self):
        # y must take two values per row to make inc(y;x) and x=x work: lax only
        structure = graph_structure(2, [])
        team = Team.make(["x"], [(0,), (1,)])
        assert eval_team(structure, team, parse("exists y (inc(y;x) & inc(x;y))"))

    def test_universal_duplicates(self):
        structure = graph_structure(2, [(0, 0), (0, 1)])
        team = Team.make(["x"], [(0,)])
        assert eval_team(structure, team, parse("forall y E(x,y)"))
        assert not eval_team(structure, team, parse("forall y E(y,x)"))


class TestStrictMode:
    def test_rejects_inclusion_atoms(self):
        with pytest.raises(EvaluationError):
            eval_team(k3(), Team.empty(["x", "y"]), parse("inc(x;y)"), strict=True)

    def test_agrees_with_lax_on_dependence_corpus(self):
        structure = graph_structure(3, [(0, 1), (1, 2), (2, 0)])
        formulas = [
            "dep(x;y)",
            "dep(x;y) | dep(y;x)",
            "E(x,y) | dep(y;x)",
            "exists u (E(x,u) & dep(u;y))",
            "forall u (!E(u,x) | dep(u;y))",
        ]
        rows = [(a, b) for a in range(3) for b in range(3)]
        for text in formulas:
            formula = parse(text)
            for size in (0, 1, 2, 3):
                for combo in itertools.combinations(rows, size):
                    team = Team.make(["x", "y"], combo)
                    assert eval_team(structure, team, formula) == eval_team(
                        structure, team, formula, strict=True
                    ), (text, combo)


class TestTarski:
    def test_edge_atom(self):
        structure = graph_structure(2, [(0, 1)])
        assert eval_fo_tarski(structure, {"x": 0, "y": 1}, parse("E(x,y)"))
        assert not eval_fo_tarski(structure, {"x": 1, "y": 0}, parse("E(x,y)"))

    def test_directed_cycle_has_outgoing_edges(self):
        structure = graph_structure(3, [(0, 1), (1, 2), (2, 0)])
        assert eval_fo_tarski(structure, {}, parse("forall x exists y E(x,y)"))

    def test_inequality_with_self(self):
        assert not eval_fo_tarski(graph_structure(2, []), {"x": 1}, parse("x!=x"))

    def test_rejects_team_atoms(self):
        with pytest.raises(EvaluationError):
            eval_fo_tarski(graph_structure(2, []), {"x": 0, "y": 0}, parse("dep(x;y)"))

    def test_flatness_on_singletons(self):
        structure = graph_structure(3, [(0, 1), (1, 2)])
        formula = parse("exists y E(x,y)")
        for a in range(3):
            team = Team.make(["x"], [(a,)])
            assert eval_team(structure, team, formula) == eval_fo_tarski(structure, {"x": a}, formula)


class TestCheckSentence:
    def test_reflexive_universal(self):
        structure = graph_structure(2, [(0, 0), (1, 1)])
        assert check_sentence(structure, parse("forall x E(x,x)"))

    def test_inclusion_sentence_matches_generic(self):
        structure = graph_structure(3, [(0, 1), (1, 2), (2, 0)])
        sentence = parse("forall x exists y (E(x,y) & inc(y;x))")
        generic = eval_team(structure, Team.singleton_empty_assignment(), sentence)
        assert check_sentence(structure, sentence) == generic

    def test_dependence_sentence(self):
        structure = graph_structure(2, [])
        assert check_sentence(structure, parse("exists x exists y (dep(x;y) & x!=y)"))

    def test_rejects_free_variables(self):
        with pytest.raises(EvaluationError):
            check_sentence(graph_structure(2, []), parse("E(x,x)"))


class TestAgainstNaiveReference:
    """Cross-check against a clause-by-clause reference evaluator.

    The reference enumerates disjunction covers by labeling rows
    left/right/both and existential choices as products of nonempty value
    sets per row, with no memoization, sharing no code with the optimized
    search paths.
    """

    @staticmethod
    def reference(structure, rows, formula):
        # rows: list of assignment dicts sharing a domain
        from teamcheck.formulas import (
            And, Dep, Eq, Exists, Forall, Inc, Indep, Neq, NegRel, Or, Rel, Var,
        )

        def value(term, s):
            return s[term.name] if isinstance(term, Var) else structure.constants[term.name]

        def values(terms, s):
            return tuple(value(t, s) for t in terms)

        def sat(rows, node):
            if isinstance(node, Eq):
                return all(value(node.left, s) == value(node.right, s) for s in rows)
            if isinstance(node, Neq):
                return all(value(node.left, s) != value(node.right, s) for s in rows)
            if isinstance(node, Rel):
                return all(values(node.terms, s) in structure.relations[node.name] for s in rows)
            if isinstance(node, NegRel):
                return all(values(node.terms, s) not in structure.relations[node.name] for s in rows)
            if isinstance(node, Dep):
                return all(
                    values(node.determined, s1) == values(node.determined, s2)
                    for s1 in rows
                    for s2 in rows
                    if values(node.determinants, s1) == values(node.determinants, s2)
                )
            if isinstance(node, Inc):
                return all(
                    any(values(node.left, s1) == values(node.right, s2) for s2 in rows)
                    for s1 in rows
                )
            if isinstance(node, Indep):
                return all(
                    any(
                        values(node.condition, s3) == values(node.condition, s1)
                        and values(node.left, s3) == values(node.left, s1)
                        and values(node.right, s3) == values(node.right, s2)
                        for s3 in rows
                    )
                    for s1 in rows
                    for s2 in rows
                    if values(node.condition, s1) == values(node.condition, s2)
                )
            if isinstance(node, And):
                return sat(rows, node.left) and sat(rows, node.right)
            if isinstance(node, Or):
                for labels in itertools.product((0, 1, 2), repeat=len(rows)):
                    left = [s for s, l in zip(rows, labels) if l != 1]
                    right = [s for s, l in zip(rows, labels) if l != 0]
                    if sat(dedup(left), node.left) and sat(dedup(right), node.right):
                        return True
                return False
            if isinstance(node, Exists):
                if not rows:
                    return sat(rows, node.body)
                choices = []
                for s in rows:
                    exts = [{**s, node.variable: a} for a in structure.elements]
                    opts = []
                    for size in range(1, len(exts) + 1):
                        opts.extend(itertools.combinations(exts, size))
                    choices.append(opts)
                for pick in itertools.product(*choices):
                    supplemented = [s for group in pick for s in group]
                    if sat(dedup(supplemented), node.body):
                        return True
                return False
            if isinstance(node, Forall):
                duplicated = [{**s, node.variable: a} for s in rows for a in structure.elements]
                return sat(dedup(duplicated), node.body)
            raise AssertionError(node)

        def dedup(rows):
            seen = []
            for s in rows:
                if s not in seen:
                    seen.append(s)
            return seen

        return sat(dedup(rows), formula)

    def test_agreement_on_random_small_cases(self):
        from teamcheck.corpus import SplitMix64, random_structure, random_team
        from teamcheck.corpus import _random_quantifier_free
        from teamcheck.formulas import Exists, Forall, free_vars

        rng = SplitMix64(31)
        fragments = ["FO", "FO(dep)", "FO(inc)", "FO(indep)"]
        checked = 0
        while checked < 240:
            structure = random_structure(rng, 3)
            fragment = fragments[checked % 4]
            body = _random_quantifier_free(rng, fragment, ["x", "y", "u"])
            shape = rng.randrange(3)
            if shape == 1:
                formula = Exists("u", body)
            elif shape == 2:
                formula = Forall("u", body)
            else:
                formula = body
            if not free_vars(formula) <= {"x", "y"}:
                continue
            team = random_team(rng, structure, ["x", "y"], 2)
            rows = [dict(zip(team.variables, row)) for row in sorted(team.rows)]
            expected = self.reference(structure, rows, formula)
            assert eval_team(structure, team, formula) == expected, (
                structure.relations,
                sorted(team.rows),
                formula,
            )
            checked += 1

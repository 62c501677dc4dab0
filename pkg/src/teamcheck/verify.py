"""Verification suites: closure properties, reduction faithfulness, experiments.

Each suite produces a line-per-case report plus pass/fail/discrepancy
counts.  Failures mean a checked invariant is violated; discrepancies are
recorded observations (the clique experiment reports them without failing).
Suites accept a ``jobs`` argument that fans independent cases out to worker
processes; results are always ordered by case index.
"""

from __future__ import annotations

import itertools
import json
import multiprocessing
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .corpus import (
    SplitMix64,
    all_graphs,
    random_circuit,
    random_formula,
    random_layered_prop,
    random_sentence,
    random_structure,
    random_team,
)
from .evaluator import check_sentence, eval_fo_tarski, eval_team
from .formulas import free_vars, parse
from .inclusion import eval_inclusion, max_subteam
from .model import Team, canonical_rows, restrict
from .prop import parse_prop, prop_variables, render_prop
from .reductions import (
    Graph,
    build_syntax_circuit,
    circuit_eval,
    encode_clique,
    encode_domset,
    encode_indset,
    encode_wsat,
    graph_brute,
    graph_structure,
    proof_tree_exists,
    theta_formula,
    wsat_brute,
)
from .solver import WdFormula, WtInstance, wd_solve, wt_solve, wt_solve_fo, wt_solve_sentence


@dataclass(frozen=True)
class CaseResult:
    index: int
    name: str
    status: str  # pass | fail | discrepancy
    detail: str = ""


@dataclass
class Report:
    suite: str
    cases: list[CaseResult]
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> int:
        return sum(1 for c in self.cases if c.status == "pass")

    @property
    def failed(self) -> int:
        return sum(1 for c in self.cases if c.status == "fail")

    @property
    def discrepancies(self) -> int:
        return sum(1 for c in self.cases if c.status == "discrepancy")

    def ok(self) -> bool:
        return self.failed == 0

    def summary(self) -> str:
        return (
            f"summary: suite={self.suite} cases={len(self.cases)} "
            f"pass={self.passed} fail={self.failed} discrepancies={self.discrepancies}"
        )

    def lines(self) -> list[str]:
        out = []
        for case in self.cases:
            line = f"{self.suite} {case.index:05d} {case.status.upper()} {case.name}"
            if case.detail:
                line += f" :: {case.detail}"
            out.append(line)
        out.append(self.summary())
        return out

    def to_json(self) -> str:
        return json.dumps(
            {
                "suite": self.suite,
                "cases": [
                    {"index": c.index, "name": c.name, "status": c.status, "detail": c.detail}
                    for c in self.cases
                ],
                "summary": {
                    "cases": len(self.cases),
                    "pass": self.passed,
                    "fail": self.failed,
                    "discrepancies": self.discrepancies,
                },
                "metadata": self.metadata,
            },
            indent=2,
            sort_keys=True,
        )


def _run_cases(runner: Callable, tasks: Sequence, jobs: int) -> list:
    if jobs <= 1:
        return [runner(task) for task in tasks]
    with multiprocessing.Pool(jobs) as pool:
        return pool.map(runner, tasks, chunksize=max(1, len(tasks) // (jobs * 8) or 1))


# --- closure suite -----------------------------------------------------------

_FRAGMENTS = ("FO", "FO(dep)", "FO(inc)", "FO(indep)")


def _closure_case(task) -> CaseResult:
    index, fragment, structure, team, second_team, formula = task
    violations: list[str] = []

    satisfied = eval_team(structure, team, formula)

    if not eval_team(structure, Team.empty(team.variables), formula):
        violations.append("empty-team")

    local = eval_team(structure, restrict(team, free_vars(formula)), formula)
    if local != satisfied:
        violations.append("locality")

    if fragment == "FO":
        flat = all(
            eval_fo_tarski(structure, assignment, formula) for assignment in team.assignments()
        )
        if flat != satisfied:
            violations.append("flatness")

    if fragment in ("FO", "FO(dep)"):
        if eval_team(structure, team, formula, strict=True) != satisfied:
            violations.append("strict-lax")
        if satisfied:
            rows = sorted(team.rows)
            for mask in range(1 << len(rows)):
                sub = Team(team.variables, frozenset(r for i, r in enumerate(rows) if mask >> i & 1))
                if not eval_team(structure, sub, formula):
                    violations.append("downward-closure")
                    break

    if fragment == "FO(inc)":
        other = eval_team(structure, second_team, formula)
        if satisfied and other:
            union = Team(team.variables, team.rows | second_team.rows)
            if not eval_team(structure, union, formula):
                violations.append("union-closure")
        if len(team) <= 3:
            rows = sorted(team.rows)
            satisfying = []
            for mask in range(1 << len(rows)):
                sub = frozenset(r for i, r in enumerate(rows) if mask >> i & 1)
                if eval_team(structure, Team(team.variables, sub), formula):
                    satisfying.append(sub)
            for left in satisfying[:8]:
                for right in satisfying[:8]:
                    union = Team(team.variables, left | right)
                    if not eval_team(structure, union, formula):
                        violations.append("union-closure")
                        break
                else:
                    continue
                break

    status = "pass" if not violations else "fail"
    name = f"{fragment} n={structure.domain_size} team={len(team)}"
    return CaseResult(index, name, status, ",".join(violations))


def run_closure_suite(
    seed: int,
    cases_per_fragment: int = 500,
    max_domain: int = 4,
    max_team_rows: int = 4,
    jobs: int = 1,
) -> Report:
    """Empty-team, locality, flatness, downward/union closure, strict-lax agreement."""
    rng = SplitMix64(seed)
    tasks = []
    index = 0
    for fragment in _FRAGMENTS:
        for _ in range(cases_per_fragment):
            structure = random_structure(rng, max_domain)
            with_extra = rng.random() < 0.4
            formula = random_formula(rng, fragment, structure.domain_size, max_team_rows)
            domain = sorted(free_vars(formula) | ({"w"} if with_extra else set()))
            team = random_team(rng, structure, domain, max_team_rows)
            second = random_team(rng, structure, domain, max_team_rows)
            tasks.append((index, fragment, structure, team, second, formula))
            index += 1
    cases = _run_cases(_closure_case, tasks, jobs)
    return Report("closure", cases, {"seed": seed, "cases_per_fragment": cases_per_fragment})


# --- inclusion fixpoint suite ---------------------------------------------------

#: Inclusion-formula templates for the fixpoint cross-validation grid.  The
#: two-variable templates run on every structure/team in the grid; the
#: forall/exists template (the shape of the dominating-set encoding) is
#: exercised at domain size <= 2, where the exhaustive evaluator stays
#: cheap, and the dominating-set reduction suite covers it at scale.
INCLUSION_TEMPLATES: tuple[tuple[str, int], ...] = (
    ("inc(x;y)", 3),
    ("inc(x;y) & E(x,y)", 3),
    ("inc(x,y;y,x) | x=y", 3),
    ("E(x,y) & x!=y & inc(y;x) & inc(x;y)", 3),
    ("inc(x;y) | inc(y;x)", 3),
    ("exists u (E(x,u) & inc(u;x))", 3),
    ("forall u (!E(u,x) | inc(x;u))", 3),
    ("exists u (inc(u;x) & (E(u,y) | u=y))", 3),
    ("forall u exists v (inc(v;x) & (E(u,v) | u=v))", 2),
)


def _inclusion_case(task) -> CaseResult:
    index, structure, team, text = task
    formula = parse(text, structure.vocabulary)
    fixpoint = eval_inclusion(structure, team, formula)
    generic = eval_team(structure, team, formula)
    problems = []
    if fixpoint != generic:
        problems.append(f"verdict fixpoint={fixpoint} generic={generic}")
    maximal = max_subteam(structure, team, formula)
    rows = sorted(team.rows)
    union: set = set()
    for mask in range(1 << len(rows)):
        sub = frozenset(r for i, r in enumerate(rows) if mask >> i & 1)
        if eval_team(structure, Team(team.variables, sub), formula):
            union |= sub
    if frozenset(union) != maximal.rows:
        problems.append("max-subteam differs from union of satisfying subteams")
    status = "pass" if not problems else "fail"
    return CaseResult(index, f"{text} n={structure.domain_size} team={len(team)}", status, "; ".join(problems))


def run_inclusion_suite(seed: int, max_domain: int = 3, max_team_rows: int = 4, jobs: int = 1) -> Report:
    """Fixpoint evaluation versus the exhaustive evaluator and subteam enumeration."""
    rng = SplitMix64(seed)
    tasks = []
    index = 0
    for text, template_max_n in INCLUSION_TEMPLATES:
        formula = parse(text)
        variables = tuple(sorted(free_vars(formula)))
        for n in range(1, min(max_domain, template_max_n) + 1):
            for _ in range(2):
                structure = random_structure(rng, n, min_domain=n)
                rows = canonical_rows(n, variables)
                for size in range(0, min(max_team_rows, len(rows)) + 1):
                    for combo in itertools.combinations(range(len(rows)), size):
                        team = Team(variables, frozenset(rows[i] for i in combo))
                        tasks.append((index, structure, team, text))
                        index += 1
    cases = _run_cases(_inclusion_case, tasks, jobs)
    return Report("inclusion", cases, {"seed": seed, "templates": len(INCLUSION_TEMPLATES)})


# --- reductions suite ------------------------------------------------------------

def _domset_case(task) -> CaseResult:
    index, edges, vertex_count, k = task
    graph = Graph.make(vertex_count, edges)
    expected = graph_brute("domset", graph, k)
    witness = wt_solve(encode_domset(graph, k))
    status = "pass" if (witness is not None) == expected else "fail"
    return CaseResult(index, f"domset edges={sorted(edges)} k={k}", status,
                      "" if status == "pass" else f"brute={expected} solver={witness is not None}")


def _indset_case(task) -> CaseResult:
    index, edges, vertex_count, k = task
    graph = Graph.make(vertex_count, edges)
    expected = graph_brute("indset", graph, k)
    witness = wt_solve(encode_indset(graph, k))
    status = "pass" if (witness is not None) == expected else "fail"
    return CaseResult(index, f"indset edges={sorted(edges)} k={k}", status,
                      "" if status == "pass" else f"brute={expected} solver={witness is not None}")


def _clique_forward_case(task) -> CaseResult:
    index, edges, vertex_count, k = task
    graph = Graph.make(vertex_count, edges)
    if not graph_brute("clique", graph, k):
        return CaseResult(index, f"clique-forward edges={sorted(edges)} k={k}", "pass", "no clique")
    witness = wt_solve(encode_clique(graph, k))
    status = "pass" if witness is not None else "fail"
    return CaseResult(index, f"clique-forward edges={sorted(edges)} k={k}", status)


CLIQUE_WD_TEXT = "forall x forall y (!S(x) | !S(y) | x=y | E(x,y))"
DOMSET_WD_TEXT = "forall x exists y (S(y) & (E(x,y) | x=y))"


def clique_wd_formula() -> WdFormula:
    return WdFormula(parse(CLIQUE_WD_TEXT), "S", 1)


def domset_wd_formula() -> WdFormula:
    return WdFormula(parse(DOMSET_WD_TEXT), "S", 1)


def _wd_clique_case(task) -> CaseResult:
    index, edges, vertex_count, k = task
    graph = Graph.make(vertex_count, edges)
    structure = graph_structure(graph)
    expected = graph_brute("clique", graph, k)
    solved = wd_solve(structure, clique_wd_formula(), k) is not None
    status = "pass" if solved == expected else "fail"
    return CaseResult(index, f"wd-clique edges={sorted(edges)} k={k}", status,
                      "" if status == "pass" else f"brute={expected} wd={solved}")


def _wsat_inclusion_case(task) -> CaseResult:
    index, sample, formula_blob, k = task
    formula = parse_prop(formula_blob)
    expected = wsat_brute(formula, k)
    instance, depth = encode_wsat(formula, k)
    witness = wt_solve(instance)
    status = "pass" if (witness is not None) == expected else "fail"
    return CaseResult(index, f"wsat-inc #{sample} {formula_blob!r} k={k} depth={depth}", status,
                      "" if status == "pass" else f"brute={expected} solver={witness is not None}")


def _theta_case(task) -> CaseResult:
    index, formula_blob, depth, negative, k = task
    formula = parse_prop(formula_blob)
    expected = wsat_brute(formula, k)
    structure = build_syntax_circuit(formula, depth)
    wd = theta_formula(depth, negative=negative)
    solved = wd_solve(structure, wd, k) is not None
    status = "pass" if solved == expected else "fail"
    kind = "negative" if negative else "positive"
    return CaseResult(index, f"theta-{kind} depth={depth} {formula_blob!r} k={k}", status,
                      "" if status == "pass" else f"brute={expected} wd={solved}")


def run_reductions_suite(
    seed: int,
    vertex_count: int = 5,
    k_values: Iterable[int] = (1, 2, 3),
    wsat_samples: int = 200,
    theta_samples: int = 200,
    jobs: int = 1,
) -> Report:
    """Exhaustive graph-reduction faithfulness plus sampled level-formula checks."""
    rng = SplitMix64(seed)
    ks = tuple(k_values)
    graphs = [frozenset(g.edges) for g in all_graphs(vertex_count)]

    domset_tasks = []
    indset_tasks = []
    clique_tasks = []
    wd_tasks = []
    index = 0
    for edges in graphs:
        for k in ks:
            domset_tasks.append((index, edges, vertex_count, k))
            index += 1
    for edges in graphs:
        for k in ks:
            indset_tasks.append((index, edges, vertex_count, k))
            index += 1
    for edges in graphs:
        for k in (2, 3):
            clique_tasks.append((index, edges, vertex_count, k))
            index += 1
    for edges in graphs:
        for k in range(0, max(ks) + 1):
            wd_tasks.append((index, edges, vertex_count, k))
            index += 1

    wsat_tasks = []
    for sample in range(wsat_samples):
        formula = random_layered_prop(rng, 2, positive=True)
        blob = render_prop(formula)
        for k in range(1, len(prop_variables(formula)) + 1):
            wsat_tasks.append((index, sample, blob, k))
            index += 1

    theta_tasks = []
    for depth in (1, 3):
        for _ in range(theta_samples // 2):
            formula = random_layered_prop(rng, depth, positive=False)
            blob = render_prop(formula)
            for k in range(1, len(prop_variables(formula)) + 1):
                theta_tasks.append((index, blob, depth, True, k))
                index += 1
    for _ in range(theta_samples // 4):
        formula = random_layered_prop(rng, 2, positive=True)
        blob = render_prop(formula)
        for k in range(1, len(prop_variables(formula)) + 1):
            theta_tasks.append((index, blob, 2, False, k))
            index += 1

    cases = []
    cases += _run_cases(_domset_case, domset_tasks, jobs)
    cases += _run_cases(_indset_case, indset_tasks, jobs)
    cases += _run_cases(_clique_forward_case, clique_tasks, jobs)
    cases += _run_cases(_wd_clique_case, wd_tasks, jobs)
    cases += _run_cases(_wsat_inclusion_case, wsat_tasks, jobs)
    cases += _run_cases(_theta_case, theta_tasks, jobs)
    return Report(
        "reductions",
        cases,
        {
            "seed": seed,
            "vertex_count": vertex_count,
            "k_values": list(ks),
            "wsat_samples": wsat_samples,
            "theta_samples": theta_samples,
        },
    )


# --- clique experiment -----------------------------------------------------------

def _clique_experiment_case(task) -> CaseResult:
    index, edges, vertex_count, k = task
    graph = Graph.make(vertex_count, edges)
    expected = graph_brute("clique", graph, k)
    instance = encode_clique(graph, k)
    witness = wt_solve(instance)
    solved = witness is not None
    if expected and not solved:
        return CaseResult(index, f"clique edges={sorted(edges)} k={k}", "fail", "forward direction broken")
    if solved and not expected:
        return CaseResult(
            index,
            f"clique edges={sorted(edges)} k={k}",
            "discrepancy",
            f"encoded instance satisfiable without a {k}-clique (team size {instance.k})",
        )
    return CaseResult(index, f"clique edges={sorted(edges)} k={k}", "pass")


def run_clique_experiment(
    vertex_count: int = 5,
    k_values: Iterable[int] = (2, 3),
    jobs: int = 1,
) -> Report:
    """Full-equivalence experiment for the clique encoding.

    The forward direction (clique implies satisfiable encoding) is an
    invariant; reverse-direction mismatches are reported as discrepancies
    in machine-readable form, not failures.
    """
    tasks = []
    index = 0
    for graph in all_graphs(vertex_count):
        for k in k_values:
            tasks.append((index, frozenset(graph.edges), vertex_count, k))
            index += 1
    cases = _run_cases(_clique_experiment_case, tasks, jobs)
    discrepancies = [
        {
            "edges": sorted(list(e) for e in tasks[c.index][1]),
            "k": tasks[c.index][3],
            "detail": c.detail,
        }
        for c in cases
        if c.status == "discrepancy"
    ]
    pentagon = Graph.make(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    pentagon_case = {
        "edges": sorted(list(e) for e in pentagon.edges),
        "k": 3,
        "satisfiable_without_clique": wt_solve(encode_clique(pentagon, 3)) is not None,
    }
    return Report(
        "clique-experiment",
        cases,
        {
            "vertex_count": vertex_count,
            "k_values": list(k_values),
            "discrepancies": discrepancies,
            "pentagon_check": pentagon_case,
        },
    )


# --- circuit suite ---------------------------------------------------------------

def _circuit_case(task) -> CaseResult:
    index, circuit = task
    for size in range(len(circuit.inputs) + 1):
        for chosen in itertools.combinations(sorted(circuit.inputs), size):
            direct = circuit_eval(circuit, frozenset(chosen))
            via_tree = proof_tree_exists(circuit, frozenset(chosen))
            if direct != via_tree:
                return CaseResult(
                    index,
                    f"circuit gates={circuit.gate_count} inputs={sorted(circuit.inputs)}",
                    "fail",
                    f"inputs={chosen} eval={direct} proof-tree={via_tree}",
                )
    return CaseResult(index, f"circuit gates={circuit.gate_count} inputs={sorted(circuit.inputs)}", "pass")


def run_circuit_suite(seed: int, circuits: int = 500, max_gates: int = 6, jobs: int = 1) -> Report:
    """Bottom-up circuit evaluation versus exhaustive proof-tree search."""
    rng = SplitMix64(seed)
    tasks = [(i, random_circuit(rng, max_gates)) for i in range(circuits)]
    cases = _run_cases(_circuit_case, tasks, jobs)
    return Report("circuit", cases, {"seed": seed, "circuits": circuits, "max_gates": max_gates})


# --- sentence and first-order fast-path suites -----------------------------------

def run_sentence_suite(seed: int, per_fragment: int = 100, max_domain: int = 4) -> Report:
    """Weighted solving of sentences: k=0 holds, k=1 matches truth, k>=2 never."""
    rng = SplitMix64(seed)
    cases = []
    index = 0
    for fragment in _FRAGMENTS:
        for _ in range(per_fragment):
            structure = random_structure(rng, max_domain)
            sentence = random_sentence(rng, fragment, structure.domain_size)
            problems = []
            truth = check_sentence(structure, sentence)
            if not wt_solve_sentence(structure, sentence, 0):
                problems.append("k=0 rejected")
            if wt_solve_sentence(structure, sentence, 1) != truth:
                problems.append("k=1 mismatch")
            if wt_solve_sentence(structure, sentence, 2) or wt_solve_sentence(structure, sentence, 3):
                problems.append("k>=2 accepted")
            witness = wt_solve(WtInstance(structure, sentence, 1))
            if (witness is not None) != truth:
                problems.append("generic solver disagrees at k=1")
            status = "pass" if not problems else "fail"
            cases.append(CaseResult(index, f"sentence {fragment} n={structure.domain_size}", status, ",".join(problems)))
            index += 1
    return Report("sentences", cases, {"seed": seed, "per_fragment": per_fragment})


def run_fo_fastpath_suite(seed: int, formulas: int = 200, max_domain: int = 5) -> Report:
    """Counting fast path versus generic enumeration, all 0 <= k <= n^2."""
    rng = SplitMix64(seed)
    cases = []
    index = 0
    produced = 0
    while produced < formulas:
        structure = random_structure(rng, max_domain)
        n = structure.domain_size
        team_hint = min(n ** 2, 8) + 1
        formula = random_formula(rng, "FO", n, team_hint)
        variables = tuple(sorted(free_vars(formula)))
        satisfying = sum(
            1
            for row in canonical_rows(n, variables)
            if eval_fo_tarski(structure, dict(zip(variables, row)), formula)
        )
        if n >= 4 and satisfying > 8:
            continue  # keeps the unsatisfiable side of the generic search enumerable
        produced += 1
        problems = []
        for k in range(0, n ** 2 + 1 if variables else 2):
            counted = wt_solve_fo(structure, formula, k)
            generic = wt_solve(WtInstance(structure, formula, k), fast_path="off") is not None
            fast = wt_solve(WtInstance(structure, formula, k), fast_path="auto") is not None
            if counted != generic or counted != fast:
                problems.append(f"k={k} counted={counted} generic={generic} fast={fast}")
                break
        status = "pass" if not problems else "fail"
        cases.append(CaseResult(index, f"fo-fastpath n={n} sat={satisfying}", status, ";".join(problems)))
        index += 1
    return Report("fo-fastpath", cases, {"seed": seed, "formulas": formulas})

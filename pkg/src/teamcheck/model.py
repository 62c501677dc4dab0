"""Finite relational structures, assignments, and teams.

Elements of a structure are dense integer ids ``0..n-1``; external formats
use those ids directly.  A team is a set of assignments over a shared
variable domain.  Internally a team stores its variables as a sorted tuple
and its rows as a frozenset of value tuples aligned with that variable
order, so row sets hash and compare cheaply and team equality is exactly
row-set equality.

All values here are immutable after construction and every operation is
pure, so they are safe to share between concurrent workers.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import ParseError


@dataclass(frozen=True)
class Vocabulary:
    """Relation symbols with positive arities, plus constant symbols."""

    relations: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        names = [name for name, _ in self.relations] + list(self.constants)
        if len(set(names)) != len(names):
            raise ValueError("relation and constant names must be pairwise distinct")
        for name, arity in self.relations:
            if not isinstance(arity, int) or arity < 1:
                raise ValueError(f"relation {name!r} must have a positive integer arity, got {arity!r}")

    def relation_arity(self, name: str) -> int | None:
        for rel, arity in self.relations:
            if rel == name:
                return arity
        return None

    def has_constant(self, name: str) -> bool:
        return name in self.constants


@dataclass(frozen=True, eq=False)
class Structure:
    """A finite structure: domain ``0..domain_size-1`` with named relations and constants."""

    vocabulary: Vocabulary
    domain_size: int
    relations: Mapping[str, frozenset[tuple[int, ...]]] = field(default_factory=dict)
    constants: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.domain_size < 1:
            raise ValueError("structures must have at least one element")
        object.__setattr__(self, "relations", dict(self.relations))
        object.__setattr__(self, "constants", dict(self.constants))
        declared = dict(self.vocabulary.relations)
        for name, tuples in self.relations.items():
            if name not in declared:
                raise ValueError(f"relation {name!r} not declared in the vocabulary")
            arity = declared[name]
            for tup in tuples:
                if len(tup) != arity:
                    raise ValueError(f"tuple {tup} has wrong arity for {name!r}/{arity}")
                if any(not (0 <= v < self.domain_size) for v in tup):
                    raise ValueError(f"tuple {tup} of {name!r} mentions elements outside the domain")
            self.relations[name] = frozenset(tuple(t) for t in tuples)
        for name in declared:
            self.relations.setdefault(name, frozenset())
        for name in self.vocabulary.constants:
            if name not in self.constants:
                raise ValueError(f"constant {name!r} is not mapped to an element")
            if not (0 <= self.constants[name] < self.domain_size):
                raise ValueError(f"constant {name!r} maps outside the domain")
        for name in self.constants:
            if not self.vocabulary.has_constant(name):
                raise ValueError(f"constant {name!r} not declared in the vocabulary")

    @property
    def elements(self) -> range:
        return range(self.domain_size)


Row = tuple[int, ...]


@dataclass(frozen=True)
class Team:
    """A set of assignments sharing a variable domain.

    ``variables`` is always sorted; each row is a value tuple aligned with
    it.  The empty team is valid over any domain, including the empty one,
    in which case the single possible row is the empty tuple.
    """

    variables: tuple[str, ...]
    rows: frozenset[Row]

    def __post_init__(self) -> None:
        if tuple(sorted(self.variables)) != self.variables:
            raise ValueError("team variables must be sorted; use Team.make")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable in team domain")
        for row in self.rows:
            if len(row) != len(self.variables):
                raise ValueError(f"row {row} does not match domain {self.variables}")

    @classmethod
    def make(cls, variables: Iterable[str], rows: Iterable[Mapping[str, int] | Row] = ()) -> "Team":
        """Build a team from assignment dicts or pre-aligned value tuples."""
        vs = tuple(sorted(set(variables)))
        out: set[Row] = set()
        for row in rows:
            if isinstance(row, Mapping):
                if set(row) != set(vs):
                    raise ValueError(f"assignment {dict(row)} does not bind exactly {vs}")
                out.add(tuple(row[v] for v in vs))
            else:
                tup = tuple(row)
                if len(tup) != len(vs):
                    raise ValueError(f"row {tup} does not match domain {vs}")
                out.add(tup)
        return cls(vs, frozenset(out))

    @classmethod
    def empty(cls, variables: Iterable[str] = ()) -> "Team":
        return cls.make(variables, ())

    @classmethod
    def singleton_empty_assignment(cls) -> "Team":
        """The one-row team over the empty domain, used for sentences."""
        return cls((), frozenset({()}))

    def __len__(self) -> int:
        return len(self.rows)

    def domain(self) -> frozenset[str]:
        return frozenset(self.variables)

    def assignments(self) -> Iterator[dict[str, int]]:
        for row in sorted(self.rows):
            yield dict(zip(self.variables, row))


def duplicate(structure: Structure, team: Team, variable: str) -> Team:
    """Extend (or overwrite) ``variable`` with every element, per row.

    Result domain is ``team.domain ∪ {variable}``; the empty team stays
    empty.  With a fresh variable and a nonempty team the result has
    exactly ``len(team) * n`` rows.
    """
    new_vars = tuple(sorted(set(team.variables) | {variable}))
    insert_at = new_vars.index(variable)
    overwrite = variable in team.variables
    rows: set[Row] = set()
    for row in team.rows:
        if overwrite:
            for a in structure.elements:
                rows.add(row[:insert_at] + (a,) + row[insert_at + 1:])
        else:
            for a in structure.elements:
                rows.add(row[:insert_at] + (a,) + row[insert_at:])
    return Team(new_vars, frozenset(rows))


def supplement(
    structure: Structure,
    team: Team,
    variable: str,
    values: Mapping[Row, Iterable[int]],
) -> Team:
    """Extend ``variable`` row by row with the chosen nonempty value sets.

    ``values`` must be total on the team's rows (keys are value tuples
    aligned with ``team.variables``) and every value set must be a
    nonempty subset of the domain.  The constant full-domain choice
    coincides with :func:`duplicate`.
    """
    new_vars = tuple(sorted(set(team.variables) | {variable}))
    insert_at = new_vars.index(variable)
    overwrite = variable in team.variables
    rows: set[Row] = set()
    for row in team.rows:
        if row not in values:
            raise ValueError(f"supplementing function misses row {row}")
        chosen = set(values[row])
        if not chosen:
            raise ValueError(f"supplementing function maps row {row} to an empty set")
        for a in chosen:
            if not (0 <= a < structure.domain_size):
                raise ValueError(f"value {a} outside the domain")
            if overwrite:
                rows.add(row[:insert_at] + (a,) + row[insert_at + 1:])
            else:
                rows.add(row[:insert_at] + (a,) + row[insert_at:])
    return Team(new_vars, frozenset(rows))


def restrict(team: Team, variables: Iterable[str]) -> Team:
    """Project the team onto a subset of its domain, deduplicating rows."""
    vs = tuple(sorted(set(variables)))
    missing = set(vs) - set(team.variables)
    if missing:
        raise ValueError(f"cannot restrict to variables outside the domain: {sorted(missing)}")
    cols = [team.variables.index(v) for v in vs]
    return Team(vs, frozenset(tuple(row[c] for c in cols) for row in team.rows))


def rel(team: Team, order: Iterable[str]) -> frozenset[Row]:
    """The relation defined by the team, columns in the given order.

    ``order`` must be a permutation of the team's domain; the map from
    rows to tuples is then a bijection.
    """
    cols_order = tuple(order)
    if sorted(cols_order) != list(team.variables) or len(cols_order) != len(team.variables):
        raise ValueError(f"{cols_order} is not a permutation of the domain {team.variables}")
    cols = [team.variables.index(v) for v in cols_order]
    return frozenset(tuple(row[c] for c in cols) for row in team.rows)


def canonical_rows(domain_size: int, variables: Iterable[str]) -> list[Row]:
    """All value tuples over the sorted variables, in lexicographic order."""
    width = len(tuple(sorted(set(variables))))
    return [tup for tup in itertools.product(range(domain_size), repeat=width)]


def all_assignments(structure: Structure, variables: Iterable[str]) -> Iterator[dict[str, int]]:
    """Yield every assignment exactly once.

    Order is lexicographic: variables sorted by name, element ids
    ascending, the last variable varying fastest.  Over the empty variable
    set this yields exactly the empty assignment.
    """
    vs = tuple(sorted(set(variables)))
    for tup in itertools.product(structure.elements, repeat=len(vs)):
        yield dict(zip(vs, tup))


# ---------------------------------------------------------------------------
# Structure text format
#
#   domain <n>
#   rel <name>/<arity> : (a,b) (c,d) ...
#   const <name> = <id>
#
# Whitespace separated; `#` starts a comment.

_TUPLE_RE = re.compile(r"\(([0-9,\s]*)\)")


def parse_structure(text: str) -> Structure:
    domain_size: int | None = None
    relations: dict[str, frozenset[Row]] = {}
    rel_decls: list[tuple[str, int]] = []
    constants: dict[str, int] = {}
    const_decls: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "domain":
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError("expected `domain <n>`", lineno, 1)
            domain_size = int(parts[1])
        elif parts[0] == "rel":
            m = re.match(r"rel\s+(\w+)/(\d+)\s*:(.*)$", line)
            if not m:
                raise ParseError("expected `rel <name>/<arity> : (a,b) ...`", lineno, 1)
            name, arity, rest = m.group(1), int(m.group(2)), m.group(3)
            tuples: set[Row] = set()
            leftovers = _TUPLE_RE.sub("", rest).strip()
            if leftovers:
                raise ParseError(f"unexpected text in relation line: {leftovers!r}", lineno, 1)
            for grp in _TUPLE_RE.findall(rest):
                items = [s.strip() for s in grp.split(",") if s.strip()]
                if len(items) != arity:
                    raise ParseError(f"tuple ({grp}) does not have arity {arity}", lineno, 1)
                tuples.add(tuple(int(s) for s in items))
            rel_decls.append((name, arity))
            relations[name] = frozenset(tuples)
        elif parts[0] == "const":
            m = re.match(r"const\s+(\w+)\s*=\s*(\d+)$", line)
            if not m:
                raise ParseError("expected `const <name> = <id>`", lineno, 1)
            const_decls.append(m.group(1))
            constants[m.group(1)] = int(m.group(2))
        else:
            raise ParseError(f"unknown directive {parts[0]!r}", lineno, 1)
    if domain_size is None:
        raise ParseError("missing `domain <n>` header")
    vocab = Vocabulary(tuple(rel_decls), tuple(const_decls))
    try:
        return Structure(vocab, domain_size, relations, constants)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def render_structure(structure: Structure) -> str:
    lines = [f"domain {structure.domain_size}"]
    for name, arity in structure.vocabulary.relations:
        tuples = " ".join(f"({','.join(map(str, t))})" for t in sorted(structure.relations[name]))
        lines.append(f"rel {name}/{arity} :{' ' + tuples if tuples else ''}")
    for name in structure.vocabulary.constants:
        lines.append(f"const {name} = {structure.constants[name]}")
    return "\n".join(lines) + "\n"


# Team text format: one assignment per non-comment line as `var=value`
# pairs; an optional `vars x y ...` header pins the domain (useful for the
# empty team).

def parse_team(text: str, default_variables: Iterable[str] = ()) -> Team:
    variables: tuple[str, ...] | None = None
    rows: list[dict[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vars":
            variables = tuple(sorted(set(parts[1:])))
            continue
        binding: dict[str, int] = {}
        for part in parts:
            if "=" not in part:
                raise ParseError(f"expected `var=value`, got {part!r}", lineno, 1)
            var, _, val = part.partition("=")
            if not val.lstrip("-").isdigit():
                raise ParseError(f"value for {var!r} is not an integer", lineno, 1)
            if var in binding:
                raise ParseError(f"variable {var!r} bound twice", lineno, 1)
            binding[var] = int(val)
        rows.append(binding)
    if variables is None:
        variables = tuple(sorted(set(rows[0]))) if rows else tuple(sorted(set(default_variables)))
    try:
        return Team.make(variables, rows)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def render_team(team: Team) -> str:
    lines = ["vars " + " ".join(team.variables) if team.variables else "vars"]
    for assignment in team.assignments():
        lines.append(" ".join(f"{v}={assignment[v]}" for v in team.variables))
    return "\n".join(lines) + "\n"

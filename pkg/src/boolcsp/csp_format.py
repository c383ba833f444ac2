"""Text formats: constraint instances, trees, graphs, and halting tables.

Instance files are line-oriented:

    rel NAME ARITY : TUPLE TUPLE ...   # tuples as bitstrings, coordinate 1 leftmost
    var N
    c NAME v1 ... vk
    L v1 v2 ...                        # optional localized set

Blank lines and ``#`` comments are skipped. Canonical printing emits the
catalogue sorted by name, then the universe, constraints in order, and the
localized set; parsing also stores the catalogue name-sorted, so parse and
print are mutually inverse on canonical data.
"""

from __future__ import annotations

from .dnr import MockOracle
from .errors import ParseError, InputError
from .instances import Constraint, Instance
from .reductions import Graph
from .relations import BoolRelation, index_to_tuple, tuple_to_index
from .trees import BinaryTree


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_instance_file(text: str) -> Instance:
    relations: dict[str, BoolRelation] = {}
    num_vars: int | None = None
    raw_constraints: list[tuple[int, str, list[int]]] = []
    localized: list[int] | None = None

    for lineno, line in _lines(text):
        parts = line.split()
        kind = parts[0]
        if kind == "rel":
            if ":" not in parts:
                raise ParseError("rel line needs a ':' separator", lineno)
            sep = parts.index(":")
            if sep != 3:
                raise ParseError("rel line must read 'rel NAME ARITY : tuples...'", lineno)
            name = parts[1]
            if name in relations:
                raise ParseError(f"duplicate relation name {name!r}", lineno)
            try:
                arity = int(parts[2])
            except ValueError:
                raise ParseError(f"bad arity {parts[2]!r}", lineno) from None
            indices = []
            for tok in parts[sep + 1:]:
                if len(tok) != arity or any(ch not in "01" for ch in tok):
                    raise ParseError(
                        f"tuple {tok!r} does not match arity {arity}", lineno
                    )
                indices.append(tuple_to_index([int(ch) for ch in tok]))
            try:
                relations[name] = BoolRelation.from_indices(arity, indices, name)
            except InputError as exc:
                raise ParseError(str(exc), lineno) from None
        elif kind == "var":
            if num_vars is not None:
                raise ParseError("duplicate var line", lineno)
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError("var line must read 'var N'", lineno)
            num_vars = int(parts[1])
        elif kind == "c":
            if len(parts) < 2:
                raise ParseError("constraint line needs a relation name", lineno)
            try:
                vs = [int(tok) for tok in parts[2:]]
            except ValueError:
                raise ParseError("constraint variables must be integers", lineno) from None
            raw_constraints.append((lineno, parts[1], vs))
        elif kind == "L":
            if localized is not None:
                raise ParseError("duplicate L line", lineno)
            try:
                localized = [int(tok) for tok in parts[1:]]
            except ValueError:
                raise ParseError("localized variables must be integers", lineno) from None
        else:
            raise ParseError(f"unknown directive {kind!r}", lineno)

    if num_vars is None:
        raise ParseError("missing 'var N' line")
    ordered_names = sorted(relations)
    index_of = {name: i for i, name in enumerate(ordered_names)}
    constraints = []
    for lineno, name, vs in raw_constraints:
        if name not in index_of:
            raise ParseError(f"unknown relation name {name!r}", lineno)
        rel = relations[name]
        if len(vs) != rel.arity:
            raise ParseError(
                f"constraint on {name!r} has {len(vs)} variables for arity {rel.arity}", lineno
            )
        for v in vs:
            if not 0 <= v < num_vars:
                raise ParseError(f"variable {v} outside universe of {num_vars}", lineno)
        constraints.append(Constraint(index_of[name], tuple(vs)))
    if localized is not None:
        for v in localized:
            if not 0 <= v < num_vars:
                raise ParseError(f"localized variable {v} outside universe")
        localized = sorted(set(localized))
    return Instance(
        tuple(relations[name] for name in ordered_names),
        num_vars,
        tuple(constraints),
        tuple(localized) if localized is not None else None,
    )


def print_instance(instance: Instance) -> str:
    names = []
    for i, rel in enumerate(instance.catalogue):
        names.append(rel.name if rel.name else f"R{i}")
    if len(set(names)) != len(names):
        raise InputError("canonical printing needs distinct relation names")
    order = sorted(range(len(names)), key=lambda i: names[i])
    lines = []
    for old in order:
        rel = instance.catalogue[old]
        rows = " ".join(
            "".join(str(b) for b in index_to_tuple(k, rel.arity)) for k in rel.rows()
        )
        lines.append(f"rel {names[old]} {rel.arity} : {rows}".rstrip())
    lines.append(f"var {instance.num_vars}")
    for c in instance.constraints:
        lines.append(f"c {names[c.rel]} " + " ".join(str(v) for v in c.vars))
    if instance.localized is not None:
        lines.append("L " + " ".join(str(v) for v in instance.localized))
    return "\n".join(lines) + "\n"


def parse_tree_file(text: str) -> BinaryTree:
    strings = set()
    for lineno, line in _lines(text):
        if any(ch not in "01" for ch in line):
            raise ParseError(f"tree line must be a binary string, got {line!r}", lineno)
        strings.add(line)
    strings.add("")
    for s in strings:
        if s and s[:-1] not in strings:
            raise ParseError(f"tree file is not downward closed at {s!r}")
    return BinaryTree.from_strings(strings)


def print_tree_file(tree: BinaryTree) -> str:
    return "\n".join(sorted((s for s in tree.strings if s), key=lambda s: (len(s), s))) + "\n"


def parse_graph_file(text: str) -> Graph:
    edges = []
    top = -1
    for lineno, line in _lines(text):
        parts = line.split()
        if parts[0] != "e" or len(parts) != 3:
            raise ParseError("graph lines must read 'e U V'", lineno)
        try:
            u, v = int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError("graph endpoints must be integers", lineno) from None
        if u < 0 or v < 0:
            raise ParseError("graph endpoints must be nonnegative", lineno)
        edges.append((u, v))
        top = max(top, u, v)
    return Graph.from_edges(top + 1, edges)


def print_graph_file(graph: Graph) -> str:
    return "\n".join(f"e {u} {v}" for u, v in sorted(graph.edges)) + "\n"


def parse_oracle_file(text: str) -> MockOracle:
    triples = []
    for lineno, line in _lines(text):
        parts = line.split()
        if parts[0] != "halt" or len(parts) != 4:
            raise ParseError("oracle lines must read 'halt E VALUE STAGE'", lineno)
        try:
            triples.append((int(parts[1]), int(parts[2]), int(parts[3])))
        except ValueError:
            raise ParseError("oracle fields must be integers", lineno) from None
    try:
        return MockOracle.from_entries(triples)
    except InputError as exc:
        raise ParseError(str(exc)) from None


def print_oracle_file(oracle: MockOracle) -> str:
    lines = [
        f"halt {e} {value} {stage}"
        for e, (value, stage) in sorted(oracle.entries.items())
    ]
    return "\n".join(lines) + ("\n" if lines else "")

"""Instance transformations: graph/disequality translation, the star
translation through conjunctive definitions, the unit-to-constant rewrite
for complementive targets, and the localized-to-unlocalized construction."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Mapping, Sequence

from .errors import DefinitionMismatchError, InputError, ResourceBudgetError
from .instances import Assignment, Constraint, Instance
from .relations import BoolRelation, REL_EQ, REL_FALSE_UNIT, REL_NEQ, REL_TRUE_UNIT
from .solvers import solve_dispatch

ENTAILMENT_BUDGET = 10_000


# ---------------------------------------------------------------------------
# Graphs <-> disequality instances.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1; self-loops tolerated as data."""

    num_vertices: int
    edges: frozenset[tuple[int, int]]  # stored with u <= v

    def __post_init__(self) -> None:
        for u, v in self.edges:
            if not (0 <= u <= v < self.num_vertices):
                raise InputError(f"edge ({u}, {v}) out of range")

    @classmethod
    def from_edges(cls, num_vertices: int, edges) -> "Graph":
        norm = frozenset((min(u, v), max(u, v)) for u, v in edges)
        return cls(num_vertices, norm)


def graph_to_neq(graph: Graph) -> Instance:
    """One disequality constraint per edge, lower endpoint first. A self-loop
    becomes the unsatisfiable constraint NEQ(v, v)."""
    constraints = [Constraint(0, (u, v)) for u, v in sorted(graph.edges)]
    return Instance((REL_NEQ,), graph.num_vertices, tuple(constraints))


def neq_to_graph(instance: Instance) -> Graph:
    edges = []
    for c in instance.constraints:
        if instance.catalogue[c.rel] != REL_NEQ:
            raise InputError("instance contains a non-disequality constraint")
        edges.append(tuple(c.vars))
    return Graph.from_edges(instance.num_vars, edges)


def bipartition_of_model(nu: Assignment, num_vertices: int) -> tuple[list[int], list[int]]:
    p0 = [v for v in range(num_vertices) if nu.values[v] == 0]
    p1 = [v for v in range(num_vertices) if nu.values[v] == 1]
    return p0, p1


# ---------------------------------------------------------------------------
# Star translation through existential conjunctive definitions.
# ---------------------------------------------------------------------------

# Slot in a definition body: ("param", i), ("exist", j) or ("const", 0/1).
Slot = tuple[str, int]


@dataclass(frozen=True)
class RelAtom:
    rel: int  # index into the target catalogue
    args: tuple[Slot, ...]


@dataclass(frozen=True)
class EqAtom:
    left: Slot
    right: Slot


@dataclass(frozen=True)
class ConjunctiveDefinition:
    """(exists z_0..z_{k-1}) conjunction of atoms over params, existentials
    and the Boolean constants."""

    arity: int
    n_exists: int
    atoms: tuple[RelAtom | EqAtom, ...]


def _slot_value(slot: Slot, params: tuple[int, ...], exists: tuple[int, ...]) -> int:
    kind, i = slot
    if kind == "param":
        return params[i]
    if kind == "exist":
        return exists[i]
    if kind == "const":
        return i
    raise InputError(f"unknown slot kind {kind!r}")


def definition_relation(defn: ConjunctiveDefinition, catalogue: Sequence[BoolRelation]) -> BoolRelation:
    """Brute-force projection of the body onto the parameters."""
    total = defn.arity + defn.n_exists
    if total > 16:
        raise InputError("definition projection capped at 16 total variables")
    bits = 0
    for p in range(1 << defn.arity):
        params = tuple((p >> i) & 1 for i in range(defn.arity))
        for e in range(1 << defn.n_exists):
            exists = tuple((e >> j) & 1 for j in range(defn.n_exists))
            ok = True
            for atom in defn.atoms:
                if isinstance(atom, EqAtom):
                    if _slot_value(atom.left, params, exists) != _slot_value(atom.right, params, exists):
                        ok = False
                        break
                else:
                    idx = 0
                    for j, slot in enumerate(atom.args):
                        idx |= _slot_value(slot, params, exists) << j
                    if not catalogue[atom.rel].has(idx):
                        ok = False
                        break
            if ok:
                bits |= 1 << p
                break
    return BoolRelation(defn.arity, bits) if defn.arity else None


def identity_definition(source_rel: BoolRelation, target_index: int) -> ConjunctiveDefinition:
    args = tuple(("param", i) for i in range(source_rel.arity))
    return ConjunctiveDefinition(source_rel.arity, 0, (RelAtom(target_index, args),))


def reduce_via_representation(
    instance: Instance,
    definitions: Mapping[int, ConjunctiveDefinition],
    target_catalogue: Sequence[BoolRelation],
) -> Instance:
    """Rewrite every constraint through its relation's definition over the
    target catalogue.

    Every definition is first checked extensionally against the relation it
    replaces. Existential slots take fresh variables per occurrence;
    equality atoms expand into two disequality constraints through a fresh
    middle variable; constant slots are realized by two global constant
    variables tied by one disequality. The localized set is untouched.
    """
    target_catalogue = tuple(target_catalogue)
    for rel_idx, defn in definitions.items():
        source = instance.catalogue[rel_idx]
        if defn.arity != source.arity:
            raise DefinitionMismatchError(
                f"definition arity {defn.arity} differs from relation arity {source.arity}"
            )
        derived = definition_relation(defn, target_catalogue)
        if derived != source:
            raise DefinitionMismatchError(
                f"definition for relation {rel_idx} denotes {derived!r}, expected {source!r}"
            )
    used = {c.rel for c in instance.constraints}
    missing = used - set(definitions)
    if missing:
        raise InputError(f"no definition for constrained relations {sorted(missing)}")

    uses_eq = any(
        isinstance(a, EqAtom) for d in definitions.values() for a in d.atoms
    )
    uses_const = any(
        slot[0] == "const"
        for d in definitions.values()
        for a in d.atoms
        for slot in (a.args if isinstance(a, RelAtom) else (a.left, a.right))
    )
    neq_index = None
    if uses_eq or uses_const:
        for i, rel in enumerate(target_catalogue):
            if rel == REL_NEQ:
                neq_index = i
                break
        if neq_index is None:
            raise InputError(
                "equality chains and constants need the binary disequality relation "
                "in the target catalogue"
            )

    next_var = instance.num_vars
    constraints: list[Constraint] = []
    const_var: dict[int, int] = {}

    def fresh() -> int:
        nonlocal next_var
        v = next_var
        next_var += 1
        return v

    def const(bit: int) -> int:
        if not const_var:
            c0, c1 = fresh(), fresh()
            const_var[0], const_var[1] = c0, c1
            constraints.append(Constraint(neq_index, (c0, c1)))
        return const_var[bit]

    def resolve(slot: Slot, params: tuple[int, ...], exists: tuple[int, ...]) -> int:
        kind, i = slot
        if kind == "param":
            return params[i]
        if kind == "exist":
            return exists[i]
        return const(i)

    def add_equality(a: int, b: int) -> None:
        mid = fresh()
        constraints.append(Constraint(neq_index, (a, mid)))
        constraints.append(Constraint(neq_index, (mid, b)))

    for c in instance.constraints:
        defn = definitions[c.rel]
        exists = tuple(fresh() for _ in range(defn.n_exists))
        for atom in defn.atoms:
            if isinstance(atom, EqAtom):
                add_equality(
                    resolve(atom.left, c.vars, exists), resolve(atom.right, c.vars, exists)
                )
            else:
                constraints.append(
                    Constraint(atom.rel, tuple(resolve(s, c.vars, exists) for s in atom.args))
                )

    return Instance(target_catalogue, next_var, tuple(constraints), instance.localized)


def flatten_units(instance: Instance) -> Instance:
    """Replace unit constraints by equality chains to two fresh constant
    variables tied by one disequality; non-unit constraints pass through.

    This is the constants rewrite for complementive targets: a model of the
    output instance, negated pointwise when the false-constant variable came
    out true, is a model of the input.
    """
    catalogue = list(instance.catalogue)
    try:
        neq_index = catalogue.index(REL_NEQ)
    except ValueError:
        neq_index = len(catalogue)
        catalogue.append(REL_NEQ)

    next_var = instance.num_vars
    c0, c1 = next_var, next_var + 1
    next_var += 2
    constraints: list[Constraint] = [Constraint(neq_index, (c0, c1))]

    def add_equality(a: int, b: int) -> None:
        nonlocal next_var
        mid = next_var
        next_var += 1
        constraints.append(Constraint(neq_index, (a, mid)))
        constraints.append(Constraint(neq_index, (mid, b)))

    for c in instance.constraints:
        rel = instance.catalogue[c.rel]
        if rel == REL_TRUE_UNIT:
            add_equality(c.vars[0], c1)
        elif rel == REL_FALSE_UNIT:
            add_equality(c.vars[0], c0)
        else:
            constraints.append(c)
    return Instance(tuple(catalogue), next_var, tuple(constraints), instance.localized)


# ---------------------------------------------------------------------------
# Localized -> unlocalized.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnlocalizeResult:
    """The rewritten instance plus the map sending its homogeneous sets back
    into the localized set of the original."""

    instance: Instance
    mode: str  # "tail" | "staged"
    entailed: tuple[Constraint, ...]
    tail: tuple[int, ...]
    tie_of: dict[int, int]  # fresh variable -> tied localized variable

    def back_map(self, H: Sequence[int]) -> tuple[int, ...]:
        hs = set(H)
        if self.mode == "tail":
            return tuple(v for v in self.tail if v in hs)
        direct = [v for v in self.tail if v in hs]
        via_ties = sorted({self.tie_of[y] for y in hs if y in self.tie_of})
        return tuple(via_ties) if len(via_ties) > len(direct) else tuple(direct)


def unlocalize(
    instance: Instance,
    L: Sequence[int] | None = None,
    small_threshold: int = 0,
    budget: int = ENTAILMENT_BUDGET,
) -> UnlocalizeResult:
    """Remove the localized set.

    First enumerate the catalogue-relation formulas over localized variables
    that the instance entails (a formula is entailed when the instance plus
    the complementary relation on the same tuple is unsatisfiable). With at
    most ``small_threshold`` such formulas, a tail of L already preserves
    homogeneity. Otherwise build the staged instance: each entailed formula
    gets a fresh variable tied by equality to its greatest variable, and a
    copy of the formula with that variable substituted.
    """
    loc = tuple(L) if L is not None else instance.localized
    if loc is None:
        raise InputError("instance has no localized set and none was given")
    loc = tuple(sorted(set(loc)))

    entailed: list[Constraint] = []
    checks = 0
    for rel_idx, rel in enumerate(instance.catalogue):
        if rel.is_empty:
            continue
        full = (1 << (1 << rel.arity)) - 1
        comp = BoolRelation(rel.arity, full ^ rel.tuples)
        for vars_tuple in permutations(loc, rel.arity):
            checks += 1
            if checks > budget:
                raise ResourceBudgetError(f"entailment checks exceeded the budget {budget}")
            if comp.is_empty:
                entailed.append(Constraint(rel_idx, vars_tuple))
                continue
            probe = Instance(
                instance.catalogue + (comp,),
                instance.num_vars,
                instance.constraints + (Constraint(len(instance.catalogue), vars_tuple),),
            )
            if not solve_dispatch(probe).is_sat:
                entailed.append(Constraint(rel_idx, vars_tuple))

    if len(entailed) <= small_threshold:
        m = max((max(c.vars) for c in entailed), default=-1)
        tail = tuple(v for v in loc if v > m)
        bare = Instance(instance.catalogue, instance.num_vars, instance.constraints)
        return UnlocalizeResult(bare, "tail", tuple(entailed), tail, {})

    catalogue = list(instance.catalogue)
    try:
        eq_index = catalogue.index(REL_EQ)
    except ValueError:
        eq_index = len(catalogue)
        catalogue.append(REL_EQ)
    constraints: list[Constraint] = []
    tie_of: dict[int, int] = {}
    next_var = instance.num_vars
    for phi in entailed:
        y = next_var
        next_var += 1
        greatest = max(phi.vars)
        tie_of[y] = greatest
        constraints.append(Constraint(eq_index, (greatest, y)))
        substituted = tuple(y if v == greatest else v for v in phi.vars)
        constraints.append(Constraint(phi.rel, substituted))
    staged = Instance(tuple(catalogue), next_var, tuple(constraints))
    return UnlocalizeResult(staged, "staged", tuple(entailed), loc, tie_of)

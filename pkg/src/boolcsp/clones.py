"""Post's lattice fragment: fixed-arity clone generation, the appendix-style
clone catalogue, and Galois-style co-clone membership."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import ArityCapError, InputError, ResourceBudgetError
from .relations import (
    BoolRelation,
    FUNCTION_ARITY_CAP,
    TruthTable,
    dual_function,
    is_polymorphism,
    projection,
    table_from_callable,
    threshold_function,
)

CLONE_COMPOSITION_BUDGET = 2_000_000
COCLONE_BUDGET = 10_000_000


def compose(f: TruthTable, gs: tuple[TruthTable, ...], k: int) -> TruthTable:
    """The arity-k table f(g_1, ..., g_m) for arity-k inner tables."""
    if len(gs) != f.arity:
        raise InputError(f"composition arity mismatch: {f.arity} vs {len(gs)} arguments")
    bits = 0
    for p in range(1 << k):
        point = 0
        for i, g in enumerate(gs):
            point |= ((g.bits >> p) & 1) << i
        bits |= ((f.bits >> point) & 1) << p
    return TruthTable(k, bits)


def generate_clone_functions(
    base: frozenset[TruthTable] | set[TruthTable],
    k: int,
    budget: int = CLONE_COMPOSITION_BUDGET,
) -> frozenset[TruthTable]:
    """All arity-k members of the clone generated by ``base``.

    Least fixpoint containing the k projections and closed under composing a
    base function over members. Raises ResourceBudgetError when the number
    of composition steps exceeds ``budget`` (the top clones at arity 4 do).
    """
    if not 1 <= k <= FUNCTION_ARITY_CAP:
        raise ArityCapError(f"clone generation arity {k} outside [1, {FUNCTION_ARITY_CAP}]")
    members: set[TruthTable] = {projection(k, i) for i in range(k)}
    full_size = 1 << (1 << k)
    steps = 0
    changed = True
    while changed and len(members) < full_size:
        changed = False
        snapshot = tuple(members)
        for f in base:
            for gs in product(snapshot, repeat=f.arity):
                steps += 1
                if steps > budget:
                    raise ResourceBudgetError(
                        f"clone generation exceeded {budget} composition steps at arity {k}"
                    )
                h = compose(f, gs, k)
                if h not in members:
                    members.add(h)
                    changed = True
    return frozenset(members)


@dataclass(frozen=True)
class CloneDescriptor:
    """One row of the clone catalogue: name, definition note, base functions.

    ``base`` is None for threshold-family rows whose base functions exceed
    the arity cap; membership in those is not decidable here.
    """

    name: str
    definition: str
    base: tuple[TruthTable, ...] | None
    base_note: str = ""


def clone_contains(clone: CloneDescriptor, f: TruthTable, budget: int = CLONE_COMPOSITION_BUDGET) -> bool:
    """Membership of f in the clone, by fixed-arity generation."""
    if clone.base is None:
        raise InputError(f"membership in {clone.name} is not decidable at the arity cap")
    if f.arity < 1:
        raise InputError("membership testing needs arity >= 1; lift constants to unary tables")
    return f in generate_clone_functions(frozenset(clone.base), f.arity, budget)


def _tt(arity: int, fn) -> TruthTable:
    return table_from_callable(arity, fn)


_AND = _tt(2, lambda a, b: a & b)
_OR = _tt(2, lambda a, b: a | b)
_NOT = _tt(1, lambda a: 1 - a)
_XOR = _tt(2, lambda a, b: a ^ b)
_XNOR = _tt(2, lambda a, b: 1 - (a ^ b))
_ID = _tt(1, lambda a: a)
_ZERO = _tt(1, lambda a: 0)
_ONE = _tt(1, lambda a: 1)
_MAJ = _tt(3, lambda a, b, c: (a & b) | (b & c) | (a & c))
_AFF = _tt(3, lambda a, b, c: a ^ b ^ c)
_AFF1 = _tt(3, lambda a, b, c: 1 - (a ^ b ^ c))
_IMP = _tt(2, lambda a, b: (1 - a) | b)
_ANDNOT = _tt(2, lambda a, b: a & (1 - b))
_X_OR_Y_ANDNOT_Z = _tt(3, lambda x, y, z: x | (y & (1 - z)))
_X_OR_YZ = _tt(3, lambda x, y, z: x | (y & z))
_X_AND_Y_OR_NOT_Z = _tt(3, lambda x, y, z: x & (y | (1 - z)))
_X_AND_Y_OR_Z = _tt(3, lambda x, y, z: x & (y | z))
_DUAL_MAJ_VARIANT = _tt(3, lambda x, y, z: (x & (1 - y)) | (x & (1 - z)) | ((1 - y) & (1 - z)))
_D1_BASE = _tt(3, lambda x, y, z: (x & y) | (x & (1 - z)) | (y & (1 - z)))
_R2_BASE = _tt(3, lambda x, y, z: x & (1 - (y ^ z)))


def _t(n: int) -> TruthTable:
    return threshold_function(n)


def _family(symbol: str, definition: str, base_fn) -> list[CloneDescriptor]:
    rows = [
        CloneDescriptor(f"{symbol}^{n}", definition.replace("<n>", str(n)), tuple(base_fn(n)))
        for n in (2, 3)
    ]
    rows.append(
        CloneDescriptor(
            f"{symbol}^n",
            definition.replace("<n>", "n"),
            None,
            base_note="threshold family; instantiated above for n in {2, 3}, larger n exceeds the arity cap",
        )
    )
    return rows


def _build_catalogue() -> tuple[CloneDescriptor, ...]:
    rows: list[CloneDescriptor] = [
        CloneDescriptor("BF", "all Boolean functions", (_AND, _NOT)),
        CloneDescriptor("R0", "0-reproducing functions", (_AND, _XOR)),
        CloneDescriptor("R1", "1-reproducing functions", (_OR, _XNOR)),
        CloneDescriptor("R2", "R1 and R0", (_OR, _R2_BASE)),
        CloneDescriptor("M", "monotonic functions", (_AND, _OR, _ZERO, _ONE)),
        CloneDescriptor("M1", "M and R1", (_AND, _OR, _ONE)),
        CloneDescriptor("M0", "M and R0", (_AND, _OR, _ZERO)),
        CloneDescriptor("M2", "M and R2", (_AND, _OR)),
    ]
    rows += _family("S0", "0-separating of degree <n>", lambda n: (_IMP, dual_function(_t(n))))
    rows.append(CloneDescriptor("S0", "0-separating functions", (_IMP,)))
    rows += _family("S1", "1-separating of degree <n>", lambda n: (_ANDNOT, _t(n)))
    rows.append(CloneDescriptor("S1", "1-separating functions", (_ANDNOT,)))
    rows += _family("S02", "S0^<n> and R2", lambda n: (_X_OR_Y_ANDNOT_Z, dual_function(_t(n))))
    rows.append(CloneDescriptor("S02", "S0 and R2", (_X_OR_Y_ANDNOT_Z,)))
    rows += _family("S01", "S0^<n> and M", lambda n: (dual_function(_t(n)), _ONE))
    rows.append(CloneDescriptor("S01", "S0 and M", (_X_OR_YZ, _ONE)))
    rows += _family("S00", "S0^<n>, R2 and M", lambda n: (_X_OR_YZ, dual_function(_t(n))))
    rows.append(CloneDescriptor("S00", "S0, R2 and M", (_X_OR_YZ,)))
    rows += _family("S12", "S1^<n> and R2", lambda n: (_X_AND_Y_OR_NOT_Z, _t(n)))
    rows.append(CloneDescriptor("S12", "S1 and R2", (_X_AND_Y_OR_NOT_Z,)))
    rows += _family("S11", "S1^<n> and M", lambda n: (_t(n), _ZERO))
    rows.append(CloneDescriptor("S11", "S1 and M", (_X_AND_Y_OR_Z, _ZERO)))
    rows += _family("S10", "S1^<n>, R2 and M", lambda n: (_X_AND_Y_OR_Z, _t(n)))
    rows.append(CloneDescriptor("S10", "S1, R2 and M", (_X_AND_Y_OR_Z,)))
    rows += [
        CloneDescriptor("D", "self-dual functions", (_DUAL_MAJ_VARIANT,)),
        CloneDescriptor("D1", "D and R2", (_D1_BASE,)),
        CloneDescriptor("D2", "D and M", (_MAJ,)),
        CloneDescriptor("L", "linear functions", (_XOR, _ONE)),
        CloneDescriptor("L0", "L and R0", (_XOR,)),
        CloneDescriptor("L1", "L and R1", (_XNOR,)),
        CloneDescriptor("L2", "L and R2", (_AFF,)),
        CloneDescriptor("L3", "L and D", (_AFF1,)),
        CloneDescriptor("V", "disjunctions or constants", (_OR, _ZERO, _ONE)),
        CloneDescriptor("V0", "disjunctions or constant 0", (_OR, _ZERO)),
        CloneDescriptor("V1", "disjunctions or constant 1", (_OR, _ONE)),
        CloneDescriptor("V2", "disjunctions", (_OR,)),
        CloneDescriptor("E", "conjunctions or constants", (_AND, _ZERO, _ONE)),
        CloneDescriptor("E0", "conjunctions or constant 0", (_AND, _ZERO)),
        CloneDescriptor("E1", "conjunctions or constant 1", (_AND, _ONE)),
        CloneDescriptor("E2", "conjunctions", (_AND,)),
        CloneDescriptor("N", "negation and constants", (_NOT, _ONE)),
        CloneDescriptor("N2", "negation", (_NOT,)),
        CloneDescriptor("I", "identity and constants", (_ID, _ZERO, _ONE)),
        CloneDescriptor("I0", "identity and constant 0", (_ID, _ZERO)),
        CloneDescriptor("I1", "identity and constant 1", (_ID, _ONE)),
        CloneDescriptor("I2", "identity", (_ID,)),
    ]
    return tuple(rows)


CLONE_CATALOGUE: tuple[CloneDescriptor, ...] = _build_catalogue()


def clone_by_name(name: str) -> CloneDescriptor:
    for row in CLONE_CATALOGUE:
        if row.name == name:
            return row
    raise InputError(f"unknown clone {name!r}")


def atlas_table() -> str:
    """The catalogue as an aligned text table: Class, Definition, Base."""
    lines = []
    rows = [("Class", "Definition", "Base")]
    for c in CLONE_CATALOGUE:
        if c.base is None:
            base = f"({c.base_note})"
        else:
            base = ", ".join(f.table_string() for f in c.base)
        rows.append((c.name, c.definition, base))
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    for i, r in enumerate(rows):
        lines.append("  ".join(r[j].ljust(widths[j]) for j in range(3)).rstrip())
        if i == 0:
            lines.append("-" * (sum(widths) + 4))
    return "\n".join(lines)


def in_coclone(R: BoolRelation, S: tuple[BoolRelation, ...] | list[BoolRelation],
               budget: int = COCLONE_BUDGET) -> bool:
    """Galois test for membership of R in the co-clone generated by S.

    Functions of arity |R| suffice: R lies outside the co-clone iff some
    polymorphism of S of that arity fails to preserve R.
    """
    if not S:
        raise InputError("co-clone membership needs a nonempty relation set")
    t = R.size
    if t == 0:
        raise InputError("co-clone membership of the empty relation is undefined")
    if t > 4:
        raise ResourceBudgetError(
            f"Galois bound needs functions of arity {t} > 4; |R| exceeds the decidable cap"
        )
    combos = sum(rel.size**t for rel in S) + R.size**t
    if (1 << (1 << t)) * combos > budget:
        raise ResourceBudgetError(f"co-clone enumeration would exceed the budget {budget}")
    for fbits in range(1 << (1 << t)):
        f = TruthTable(t, fbits)
        if all(is_polymorphism(f, rel) for rel in S) and not is_polymorphism(f, R):
            return False
    return True

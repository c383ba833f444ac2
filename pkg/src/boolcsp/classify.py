"""The three dichotomy classifiers over finite relation sets, the exhaustive
case split they rest on, and the unit-pinning gadget search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .clones import in_coclone
from .errors import DegenerateRelationError, InputError, LemmaFalsifiedError, NoGadgetError
from .relations import (
    AFF,
    BoolRelation,
    CONJ,
    CONST0,
    CONST1,
    DISJ,
    MAJ,
    NEG,
    PropertyProfile,
    REL_FALSE_UNIT,
    REL_NEQ,
    REL_TRUE_UNIT,
    is_polymorphism,
    relation_properties,
)


def _check_set(S: Sequence[BoolRelation]) -> list[PropertyProfile]:
    if not S:
        raise InputError("classification needs a nonempty relation set")
    for rel in S:
        if rel.is_empty:
            raise DegenerateRelationError("classification rejects empty relations")
    return [relation_properties(rel) for rel in S]


@dataclass(frozen=True)
class PolProfile:
    """Membership of each named generator in the polymorphisms of the set."""

    has_const0: bool
    has_const1: bool
    has_neg: bool
    has_conj: bool
    has_disj: bool
    has_maj: bool
    has_aff: bool


def pol_profile(S: Sequence[BoolRelation]) -> PolProfile:
    _check_set(S)
    return PolProfile(
        has_const0=all(is_polymorphism(CONST0, r) for r in S),
        has_const1=all(is_polymorphism(CONST1, r) for r in S),
        has_neg=all(is_polymorphism(NEG, r) for r in S),
        has_conj=all(is_polymorphism(CONJ, r) for r in S),
        has_disj=all(is_polymorphism(DISJ, r) for r in S),
        has_maj=all(is_polymorphism(MAJ, r) for r in S),
        has_aff=all(is_polymorphism(AFF, r) for r in S),
    )


def lemma43_case(S: Sequence[BoolRelation]) -> str:
    """First holding case of the exhaustive split: (a) all relations 0-valid,
    (b) all 1-valid, (c) both unit relations in the co-clone, (d) the binary
    disequality in the co-clone. Must never fall through."""
    profiles = _check_set(S)
    if all(p.zero_valid for p in profiles):
        return "a"
    if all(p.one_valid for p in profiles):
        return "b"
    S = tuple(S)
    if in_coclone(REL_TRUE_UNIT, S) and in_coclone(REL_FALSE_UNIT, S):
        return "c"
    if in_coclone(REL_NEQ, S):
        return "d"
    raise LemmaFalsifiedError("the four-way case split failed; this must be unreachable")


@dataclass(frozen=True)
class ComplexityClass:
    kind: str  # "poly_time" | "np_complete"
    witness: str | None = None  # which condition fired
    letter: str | None = None   # its position (a)-(f)

    def __str__(self) -> str:
        if self.kind == "poly_time":
            return f"poly_time({self.letter}:{self.witness})"
        return "np_complete"


@dataclass(frozen=True)
class SatStrength:
    kind: str  # "provable_rca0" | "equiv_wkl"
    witness: str | None = None
    letter: str | None = None

    def __str__(self) -> str:
        if self.kind == "provable_rca0":
            return f"provable_rca0({self.letter}:{self.witness})"
        return "equiv_wkl"


@dataclass(frozen=True)
class RamseyStrength:
    kind: str  # "provable_rca0" | "rcolor2" | "bijunctive" | "affine" | "full_rwkl"
    witness: str | None = None

    def __str__(self) -> str:
        if self.kind == "provable_rca0":
            return f"provable_rca0({self.witness})"
        return self.kind


def classify_complexity(S: Sequence[BoolRelation]) -> ComplexityClass:
    """Polynomial-time decidable iff one of the six class conditions holds
    for every relation; otherwise NP-complete."""
    profiles = _check_set(S)
    conditions = [
        ("a", "zero_valid", all(p.zero_valid for p in profiles)),
        ("b", "one_valid", all(p.one_valid for p in profiles)),
        ("c", "horn", all(p.horn for p in profiles)),
        ("d", "cohorn", all(p.cohorn for p in profiles)),
        ("e", "affine", all(p.affine for p in profiles)),
        ("f", "bijunctive", all(p.bijunctive for p in profiles)),
    ]
    for letter, name, holds in conditions:
        if holds:
            return ComplexityClass("poly_time", name, letter)
    return ComplexityClass("np_complete")


def classify_sat(S: Sequence[BoolRelation]) -> SatStrength:
    """Assignment construction is provable in the base system iff the set is
    all-0-valid, all-1-valid, or default-shaped up to a unit relation;
    otherwise it has full compactness strength."""
    profiles = _check_set(S)
    if all(p.zero_valid for p in profiles):
        return SatStrength("provable_rca0", "zero_valid", "a")
    if all(p.one_valid for p in profiles):
        return SatStrength("provable_rca0", "one_valid", "b")
    if all(p.zero_default or r == REL_TRUE_UNIT for p, r in zip(profiles, S)):
        return SatStrength("provable_rca0", "zero_default_or_positive_unit", "c")
    if all(p.one_default or r == REL_FALSE_UNIT for p, r in zip(profiles, S)):
        return SatStrength("provable_rca0", "one_default_or_negative_unit", "d")
    return SatStrength("equiv_wkl")


def classify_ramsey(S: Sequence[BoolRelation]) -> RamseyStrength:
    """Homogeneous-set strength by per-relation class tests: trivial cases
    first, then the two-coloring / affine / bijunctive / full levels."""
    profiles = _check_set(S)
    for name, flag in (
        ("zero_valid", all(p.zero_valid for p in profiles)),
        ("one_valid", all(p.one_valid for p in profiles)),
        ("horn", all(p.horn for p in profiles)),
        ("cohorn", all(p.cohorn for p in profiles)),
    ):
        if flag:
            return RamseyStrength("provable_rca0", name)
    bij = all(p.bijunctive for p in profiles)
    aff = all(p.affine for p in profiles)
    if bij and aff:
        return RamseyStrength("rcolor2")
    if bij:
        return RamseyStrength("bijunctive")
    if aff:
        return RamseyStrength("affine")
    return RamseyStrength("full_rwkl")


@dataclass(frozen=True)
class StrengthReport:
    complexity: ComplexityClass
    sat: SatStrength
    ramsey: RamseyStrength


def classify_all(S: Sequence[BoolRelation]) -> StrengthReport:
    return StrengthReport(classify_complexity(S), classify_sat(S), classify_ramsey(S))


@dataclass(frozen=True)
class UnitGadget:
    """A relation with all but one coordinate pinned to constants so that the
    remaining coordinate is forced to ``pinned_value``."""

    rel_index: int
    relation: BoolRelation
    pinned_coord: int
    pinned_value: int
    side: tuple[tuple[int, int], ...]  # (coordinate, constant), sorted

    def __post_init__(self) -> None:
        covered = {c for c, _ in self.side} | {self.pinned_coord}
        if covered != set(range(self.relation.arity)) or len(self.side) != self.relation.arity - 1:
            raise InputError("side constants must cover exactly the unpinned coordinates")
        match = [t for t in range(1 << self.relation.arity)
                 if all((t >> c) & 1 == v for c, v in self.side) and self.relation.has(t)]
        want = self.pinned_value << self.pinned_coord
        for c, v in self.side:
            want |= v << c
        if match != [want]:
            raise InputError("side constants do not pin the coordinate to a single value")

    def constraint_tuple(self, pinned_var: int, fresh: Sequence[int]) -> tuple[int, ...]:
        """Variable tuple placing ``pinned_var`` at the pinned coordinate and
        the fresh side variables elsewhere (in side order)."""
        out = [0] * self.relation.arity
        out[self.pinned_coord] = pinned_var
        for (c, _), w in zip(self.side, fresh):
            out[c] = w
        return tuple(out)


def _subset(a: int, b: int) -> bool:
    return a & ~b == 0


def _minimal_rows(rows: list[int]) -> list[int]:
    return [r for r in rows if not any(s != r and _subset(s, r) for s in rows)]


def _maximal_rows(rows: list[int]) -> list[int]:
    return [r for r in rows if not any(s != r and _subset(r, s) for s in rows)]


def find_unit_gadget(S: Sequence[BoolRelation], target: str) -> UnitGadget:
    """Search for a pinning gadget realizing a positive (``pos``) or negative
    (``neg``) unit on one coordinate.

    Follows the two proof cases: a relation that is not i-valid and differs
    from the unit relation contributes an extremal satisfying tuple; failing
    that, an i-valid relation that is not i-default contributes the extremal
    tuple above/below the defaultness violation. Tuples are searched in
    pointwise order with ties broken by lowest tuple index.
    """
    if target not in ("pos", "neg"):
        raise InputError("target must be 'pos' or 'neg'")
    for rel in S:
        if rel.is_empty:
            raise DegenerateRelationError("gadget search rejects empty relations")
    pos = target == "pos"
    unit = REL_TRUE_UNIT if pos else REL_FALSE_UNIT
    full = lambda rel: (1 << rel.arity) - 1

    # Case 1: some relation is not i-valid and is not the unit relation.
    for idx, rel in enumerate(S):
        valid = rel.has(full(rel)) if not pos else rel.has(0)
        if valid or rel == unit:
            continue
        rows = rel.rows()
        extremal = _minimal_rows(rows) if pos else _maximal_rows(rows)
        r = min(extremal)  # lowest tuple index among extremal rows
        return _gadget_from_row(idx, rel, r, pinned_bit=1 if pos else 0, forbidden=frozenset())

    # Case 2: some i-valid relation is not i-default.
    for idx, rel in enumerate(S):
        if not (rel.has(0) if pos else rel.has(full(rel))):
            continue
        rows = rel.rows()
        witness = None
        for r in rows:
            for j in range(rel.arity):
                bit = (r >> j) & 1
                if pos and bit == 1 and not rel.has(r & ~(1 << j)):
                    witness = (r, j)
                    break
                if not pos and bit == 0 and not rel.has(r | (1 << j)):
                    witness = (r, j)
                    break
            if witness:
                break
        if witness is None:
            continue
        r0, j0 = witness
        if pos:
            anchor = r0 & ~(1 << j0)  # coordinates that must stay pinned true
            above = [r for r in rows if _subset(anchor, r)]
            r = min(_minimal_rows(above))
            forbidden = frozenset(c for c in range(rel.arity) if (anchor >> c) & 1)
        else:
            anchor = (~r0 & full(rel)) & ~(1 << j0)  # coordinates pinned false
            below = [r for r in rows if r & anchor == 0]
            r = min(_maximal_rows(below))
            forbidden = frozenset(c for c in range(rel.arity) if (anchor >> c) & 1)
        return _gadget_from_row(idx, rel, r, pinned_bit=1 if pos else 0, forbidden=forbidden)

    raise NoGadgetError(f"no relation admits a {target} unit gadget")


def _gadget_from_row(idx: int, rel: BoolRelation, r: int, pinned_bit: int,
                     forbidden: frozenset[int]) -> UnitGadget:
    pinned = None
    for j in range(rel.arity):
        if j in forbidden:
            continue
        if (r >> j) & 1 == pinned_bit:
            pinned = j
            break
    if pinned is None:
        raise LemmaFalsifiedError("extremal tuple lost its pinnable coordinate")
    side = tuple((c, (r >> c) & 1) for c in range(rel.arity) if c != pinned)
    return UnitGadget(idx, rel, pinned, pinned_bit, side)

"""Boolean relations, Boolean functions, and the closure (polymorphism) machinery.

Encoding convention, used bit-exactly everywhere in the package including
the DIMACS export: a tuple (a_1, ..., a_n) is stored at index
sum(a_j << (j-1)), i.e. little-endian with coordinate j at bit j-1.
A relation of arity n is a bitset over the 2**n tuple indices; a function
of arity m is a bitstring over the 2**m argument points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .errors import ArityCapError, DegenerateRelationError, InputError, ResourceBudgetError

FUNCTION_ARITY_CAP = 4
RELATION_ARITY_CAP = 16
POLYMORPHISM_BUDGET = 10**6


def tuple_to_index(bits: Sequence[int]) -> int:
    """Pack a coordinate tuple into its little-endian index."""
    idx = 0
    for j, b in enumerate(bits):
        if b not in (0, 1):
            raise InputError(f"coordinate value {b!r} is not Boolean")
        idx |= b << j
    return idx


def index_to_tuple(idx: int, n: int) -> tuple[int, ...]:
    """Unpack a little-endian index into its coordinate tuple."""
    return tuple((idx >> j) & 1 for j in range(n))


@dataclass(frozen=True)
class TruthTable:
    """A Boolean function of arity m as a 2**m bitstring.

    Bit k of ``bits`` is f(a_1, ..., a_m) where a_j is bit j-1 of k.
    """

    arity: int
    bits: int

    def __post_init__(self) -> None:
        if not 0 <= self.arity <= FUNCTION_ARITY_CAP:
            raise ArityCapError(f"function arity {self.arity} outside [0, {FUNCTION_ARITY_CAP}]")
        if not 0 <= self.bits < (1 << (1 << self.arity)):
            raise InputError(f"truth table bits out of range for arity {self.arity}")

    def value(self, point: int) -> int:
        """Evaluate at a packed argument point."""
        if not 0 <= point < (1 << self.arity):
            raise InputError(f"argument point {point} out of range for arity {self.arity}")
        return (self.bits >> point) & 1

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise InputError(f"expected {self.arity} arguments, got {len(args)}")
        return (self.bits >> tuple_to_index(args)) & 1

    def table_string(self) -> str:
        """The bitstring with point 0 leftmost."""
        return "".join(str((self.bits >> k) & 1) for k in range(1 << self.arity))


def table_from_callable(arity: int, fn) -> TruthTable:
    bits = 0
    for k in range(1 << arity):
        if fn(*index_to_tuple(k, arity)):
            bits |= 1 << k
    return TruthTable(arity, bits)


def projection(arity: int, coord: int) -> TruthTable:
    """The projection onto argument ``coord`` (0-based)."""
    if not 0 <= coord < arity:
        raise InputError(f"projection coordinate {coord} out of range for arity {arity}")
    bits = 0
    for k in range(1 << arity):
        if (k >> coord) & 1:
            bits |= 1 << k
    return TruthTable(arity, bits)


# The named generator catalogue: conj/disj are the binary lattice
# operations, aff is the ternary XOR, maj the ternary majority.
CONJ = table_from_callable(2, lambda a, b: a & b)
DISJ = table_from_callable(2, lambda a, b: a | b)
AFF = table_from_callable(3, lambda a, b, c: a ^ b ^ c)
MAJ = table_from_callable(3, lambda a, b, c: (a & b) | (a & c) | (b & c))
NEG = table_from_callable(1, lambda a: 1 - a)
ID = table_from_callable(1, lambda a: a)
CONST0 = TruthTable(0, 0)
CONST1 = TruthTable(0, 1)


def threshold_function(n: int) -> TruthTable:
    """The (n+1)-ary function true iff at least n of its inputs are true.

    For n = 2 this coincides with the ternary majority.
    """
    if n < 1 or n + 1 > FUNCTION_ARITY_CAP:
        raise ArityCapError(f"threshold parameter {n} needs arity {n + 1} > cap {FUNCTION_ARITY_CAP}")
    return table_from_callable(n + 1, lambda *a: sum(a) >= n)


def dual_function(f: TruthTable) -> TruthTable:
    """dual(f)(a) = not f(not a); an involution."""
    full = (1 << f.arity) - 1
    bits = 0
    for k in range(1 << f.arity):
        if not f.value(k ^ full):
            bits |= 1 << k
    return TruthTable(f.arity, bits)


_NAMED = {
    "conj": CONJ,
    "disj": DISJ,
    "maj": MAJ,
    "aff": AFF,
    "neg": NEG,
    "id": ID,
    "const0": CONST0,
    "const1": CONST1,
}


def named_function(name: str, n: int | None = None) -> TruthTable:
    """Look up a catalogue function; ``t_n`` takes the threshold parameter."""
    if name == "t_n":
        if n is None:
            raise InputError("t_n requires the parameter n")
        return threshold_function(n)
    if name.startswith("t_") and name[2:].isdigit():
        return threshold_function(int(name[2:]))
    try:
        return _NAMED[name]
    except KeyError:
        raise InputError(f"unknown function name {name!r}") from None


@dataclass(frozen=True)
class BoolRelation:
    """An arity-n relation as a bitset over the 2**n tuple indices."""

    arity: int
    tuples: int
    name: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not 1 <= self.arity <= RELATION_ARITY_CAP:
            raise ArityCapError(f"relation arity {self.arity} outside [1, {RELATION_ARITY_CAP}]")
        if not 0 <= self.tuples < (1 << (1 << self.arity)):
            raise InputError(f"relation bitset out of range for arity {self.arity}")

    @classmethod
    def from_indices(cls, arity: int, indices: Iterable[int], name: str | None = None) -> BoolRelation:
        bits = 0
        for k in indices:
            if not 0 <= k < (1 << arity):
                raise InputError(f"tuple index {k} out of range for arity {arity}")
            bits |= 1 << k
        return cls(arity, bits, name)

    @classmethod
    def from_strings(cls, rows: Iterable[str], name: str | None = None) -> BoolRelation:
        """Rows as bitstrings with coordinate 1 leftmost, e.g. NEQ = {"01", "10"}."""
        rows = list(rows)
        if not rows:
            raise InputError("from_strings needs at least one row to fix the arity")
        arity = len(rows[0])
        indices = []
        for row in rows:
            if len(row) != arity or any(ch not in "01" for ch in row):
                raise InputError(f"bad tuple string {row!r}")
            indices.append(tuple_to_index([int(ch) for ch in row]))
        return cls.from_indices(arity, indices, name)

    @property
    def is_empty(self) -> bool:
        return self.tuples == 0

    @property
    def size(self) -> int:
        return bin(self.tuples).count("1")

    def has(self, idx: int) -> bool:
        return bool((self.tuples >> idx) & 1)

    def rows(self) -> list[int]:
        """Member tuple indices, ascending."""
        out = []
        t = self.tuples
        while t:
            low = t & -t
            out.append(low.bit_length() - 1)
            t ^= low
        return out

    def row_strings(self) -> list[str]:
        return ["".join(str(b) for b in index_to_tuple(k, self.arity)) for k in self.rows()]

    def complement_image(self) -> BoolRelation:
        """The relation {not r : r in R} (pointwise negation of every tuple)."""
        full = (1 << self.arity) - 1
        bits = 0
        for k in self.rows():
            bits |= 1 << (k ^ full)
        return BoolRelation(self.arity, bits)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        label = self.name or "R"
        return f"{label}[{self.arity}]{{{','.join(self.row_strings())}}}"


# Canonical relations used throughout tests and constructions.
REL_TRUE_UNIT = BoolRelation.from_strings(["1"], "UNIT1")     # [x]
REL_FALSE_UNIT = BoolRelation.from_strings(["0"], "UNIT0")    # [not x]
REL_NEQ = BoolRelation.from_strings(["01", "10"], "NEQ")
REL_EQ = BoolRelation.from_strings(["00", "11"], "EQ")
REL_IMPL = BoolRelation.from_strings(["00", "01", "11"], "IMPL")


@dataclass(frozen=True)
class PropertyProfile:
    """The property flags that drive every classifier."""

    zero_valid: bool
    one_valid: bool
    zero_default: bool
    one_default: bool
    horn: bool
    cohorn: bool
    affine: bool
    bijunctive: bool
    complementive: bool

    def as_dict(self) -> dict[str, bool]:
        return {
            "zero_valid": self.zero_valid,
            "one_valid": self.one_valid,
            "zero_default": self.zero_default,
            "one_default": self.one_default,
            "horn": self.horn,
            "cohorn": self.cohorn,
            "affine": self.affine,
            "bijunctive": self.bijunctive,
            "complementive": self.complementive,
        }


def apply_pointwise(f: TruthTable, rows: Sequence[int], n: int) -> int:
    """Coordinate-wise application of f to m tuple indices of arity n."""
    if len(rows) != f.arity:
        raise InputError(f"function arity {f.arity} but {len(rows)} rows given")
    for r in rows:
        if not 0 <= r < (1 << n):
            raise InputError(f"tuple index {r} out of range for arity {n}")
    img = 0
    fbits = f.bits
    for j in range(n):
        point = 0
        for i, r in enumerate(rows):
            point |= ((r >> j) & 1) << i
        img |= ((fbits >> point) & 1) << j
    return img


def _is_projection(f: TruthTable) -> bool:
    return any(f == projection(f.arity, i) for i in range(f.arity)) if f.arity else False


def _closed_under_maj(R: BoolRelation) -> bool:
    # Majority is a near-unanimity function, so closure is equivalent to the
    # relation being the join of its projections onto <=2 coordinates.
    n = R.arity
    rows = R.rows()
    if n == 1:
        return True
    pools = {}
    for i in range(n):
        for j in range(i + 1, n):
            pool = 0
            for r in rows:
                pool |= 1 << (((r >> i) & 1) | (((r >> j) & 1) << 1))
            pools[(i, j)] = pool
    for t in range(1 << n):
        if R.has(t):
            continue
        if all((pool >> (((t >> i) & 1) | (((t >> j) & 1) << 1))) & 1 for (i, j), pool in pools.items()):
            return False  # t is pairwise-consistent but missing
    return True


def is_polymorphism(f: TruthTable, R: BoolRelation, budget: int = POLYMORPHISM_BUDGET) -> bool:
    """True iff every coordinate-wise image of member tuples under f stays in R.

    The named generators take algebraic shortcuts (conj/disj/aff reduce to
    pairwise index arithmetic, maj to pairwise-projection consistency); any
    other table falls back to enumerating all |R|**m row combinations.
    """
    size = R.size
    if size == 0:
        return True
    if size**f.arity > budget:
        raise ResourceBudgetError(
            f"|R|**m = {size}**{f.arity} exceeds the polymorphism budget {budget}"
        )
    rows = R.rows()
    tup = R.tuples
    full = (1 << R.arity) - 1
    if f == CONJ:
        return all((tup >> (a & b)) & 1 for a in rows for b in rows)
    if f == DISJ:
        return all((tup >> (a | b)) & 1 for a in rows for b in rows)
    if f == AFF:
        p0 = rows[0]
        return all((tup >> ((a ^ b ^ p0) & full)) & 1 for a in rows for b in rows)
    if f == MAJ:
        return _closed_under_maj(R)
    if f == NEG:
        return all((tup >> (a ^ full)) & 1 for a in rows)
    if f.arity == 0 or f.bits == 0:
        # Constant functions: the image is a constant tuple.
        target = 0 if f.bits == 0 else full
        return bool((tup >> target) & 1)
    if f.bits == (1 << (1 << f.arity)) - 1:
        return bool((tup >> full) & 1)
    if _is_projection(f):
        return True
    for combo in product(rows, repeat=f.arity):
        if not (tup >> apply_pointwise(f, combo, R.arity)) & 1:
            return False
    return True


def _is_default(R: BoolRelation, value: int) -> bool:
    """Flipping any single coordinate of a member tuple to ``value`` stays in R."""
    tup = R.tuples
    for r in R.rows():
        for j in range(R.arity):
            s = (r & ~(1 << j)) | (value << j)
            if not (tup >> s) & 1:
                return False
    return True


def relation_properties(R: BoolRelation) -> PropertyProfile:
    """Compute the full property profile of a nonempty relation."""
    if R.is_empty:
        raise DegenerateRelationError("property profile of the empty relation is undefined")
    full = (1 << R.arity) - 1
    return PropertyProfile(
        zero_valid=R.has(0),
        one_valid=R.has(full),
        zero_default=_is_default(R, 0),
        one_default=_is_default(R, 1),
        horn=is_polymorphism(CONJ, R),
        cohorn=is_polymorphism(DISJ, R),
        affine=is_polymorphism(AFF, R),
        bijunctive=is_polymorphism(MAJ, R),
        complementive=is_polymorphism(NEG, R),
    )

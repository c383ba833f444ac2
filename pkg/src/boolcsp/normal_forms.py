"""Compile relations into solver-ready syntactic normal forms.

Each compiler pairs a closure gate with an exhaustive clause-cover search:
for every excluded tuple it picks, from the full clause pool of the target
shape, the first clause (shortest, then lowest literal tuple) that is true
on the whole relation and false on that tuple. The cover search therefore
produces canonical deterministic output suitable for golden files.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import ArityCapError, DegenerateRelationError, LemmaFalsifiedError
from .instances import Instance
from .relations import BoolRelation, CONJ, DISJ, MAJ, is_polymorphism

COMPILE_ARITY_CAP = 8


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals; a literal is (variable, sign), sign 1 positive."""

    lits: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        vs = [v for v, _ in self.lits]
        if len(vs) != len(set(vs)):
            raise LemmaFalsifiedError("duplicate variable in a clause")

    @property
    def is_horn(self) -> bool:
        return sum(s for _, s in self.lits) <= 1

    @property
    def is_cohorn(self) -> bool:
        return sum(1 - s for _, s in self.lits) <= 1

    @property
    def is_bijunctive(self) -> bool:
        return len(self.lits) <= 2

    def flip(self) -> "Clause":
        return Clause(tuple((v, 1 - s) for v, s in self.lits))

    def satisfying_mask(self, n: int) -> int:
        """Bitset over 2**n tuple indices where the clause holds."""
        full = (1 << (1 << n)) - 1
        falsified = 0
        fixed = 0
        base = 0
        for v, s in self.lits:
            fixed |= 1 << v
            base |= (1 - s) << v
        free = ((1 << n) - 1) & ~fixed
        # enumerate the subcube where every literal is false
        sub = free
        while True:
            falsified |= 1 << (base | sub)
            if sub == 0:
                break
            sub = (sub - 1) & free
        return full & ~falsified

    def text(self) -> str:
        if not self.lits:
            return "()"
        return " ".join(("x%d" % (v + 1)) if s else ("!x%d" % (v + 1)) for v, s in self.lits)


@dataclass(frozen=True)
class XorEquation:
    """x_{i1} + ... + x_{ik} = parity over GF(2)."""

    vars: frozenset[int]
    parity: int

    @property
    def is_degenerate(self) -> bool:
        # the constant equation 0 = 1
        return not self.vars and self.parity == 1

    def text(self) -> str:
        if not self.vars:
            return f"0 = {self.parity}"
        return " + ".join("x%d" % (v + 1) for v in sorted(self.vars)) + f" = {self.parity}"


def _clause_key(c: Clause) -> tuple:
    return (len(c.lits), c.lits)


@lru_cache(maxsize=None)
def _horn_pool(n: int) -> tuple[tuple[Clause, int], ...]:
    pool = []
    for var_mask in range(1 << n):
        vs = [v for v in range(n) if (var_mask >> v) & 1]
        # at most one positive literal: none, or any single chosen variable
        choices = [None] + vs
        for pos in choices:
            lits = tuple((v, 1 if v == pos else 0) for v in vs)
            pool.append(Clause(lits))
    pool.sort(key=_clause_key)
    return tuple((c, c.satisfying_mask(n)) for c in pool)


@lru_cache(maxsize=None)
def _bijunctive_pool(n: int) -> tuple[tuple[Clause, int], ...]:
    pool = [Clause(())]
    for v in range(n):
        for s in (0, 1):
            pool.append(Clause(((v, s),)))
    for v in range(n):
        for w in range(v + 1, n):
            for sv in (0, 1):
                for sw in (0, 1):
                    pool.append(Clause(((v, sv), (w, sw))))
    pool.sort(key=_clause_key)
    return tuple((c, c.satisfying_mask(n)) for c in pool)


def _cover_search(R: BoolRelation, pool: tuple[tuple[Clause, int], ...]) -> list[Clause]:
    out: list[Clause] = []
    seen: set[Clause] = set()
    rbits = R.tuples
    for t in range(1 << R.arity):
        if (rbits >> t) & 1:
            continue
        for clause, mask in pool:
            if not (mask >> t) & 1 and rbits & ~mask == 0:
                if clause not in seen:
                    seen.add(clause)
                    out.append(clause)
                break
        else:
            raise LemmaFalsifiedError(
                f"closure test passed but no covering clause excludes tuple {t}"
            )
    return out


def compile_horn_cnf(R: BoolRelation) -> list[Clause] | None:
    """Horn clauses over x_1..x_n defining exactly R, or None if R is not horn."""
    if R.arity > COMPILE_ARITY_CAP:
        raise ArityCapError(f"clause compilation capped at arity {COMPILE_ARITY_CAP}")
    if not is_polymorphism(CONJ, R):
        return None
    return _cover_search(R, _horn_pool(R.arity))


def compile_cohorn_cnf(R: BoolRelation) -> list[Clause] | None:
    """Co-horn compilation by duality: horn-compile the pointwise negation, flip literals."""
    if R.arity > COMPILE_ARITY_CAP:
        raise ArityCapError(f"clause compilation capped at arity {COMPILE_ARITY_CAP}")
    if not is_polymorphism(DISJ, R):
        return None
    clauses = compile_horn_cnf(R.complement_image())
    assert clauses is not None  # disj-closure of R is conj-closure of the negation image
    return [c.flip() for c in clauses]


def compile_two_cnf(R: BoolRelation) -> list[Clause] | None:
    """Clauses of at most two literals defining exactly R, or None if not bijunctive."""
    if R.arity > COMPILE_ARITY_CAP:
        raise ArityCapError(f"clause compilation capped at arity {COMPILE_ARITY_CAP}")
    if not is_polymorphism(MAJ, R):
        return None
    return _cover_search(R, _bijunctive_pool(R.arity))


def compile_xor_system(R: BoolRelation) -> list[XorEquation] | None:
    """Parity equations whose solution set is exactly R, or None if not affine.

    Takes the lowest-index member as base point, spans the differences over
    GF(2) with lowest-variable pivots, and emits one parity check per free
    column (ascending).
    """
    if R.is_empty:
        raise DegenerateRelationError("cannot compile the empty relation to equations")
    rows = R.rows()
    p = rows[0]
    basis: dict[int, int] = {}  # pivot bit -> reduced row vector
    for r in rows[1:]:
        vec = r ^ p
        for piv in sorted(basis):
            if (vec >> piv) & 1:
                vec ^= basis[piv]
        if vec:
            piv = (vec & -vec).bit_length() - 1
            for q in list(basis):
                if (basis[q] >> piv) & 1:
                    basis[q] ^= vec
            basis[piv] = vec
    rank = len(basis)
    if R.size != 1 << rank:
        return None
    if not all((basis[q] >> q) & 1 for q in basis):
        raise LemmaFalsifiedError("pivot lost during reduction")
    free = [j for j in range(R.arity) if j not in basis]
    equations = []
    for f in free:
        a = 1 << f
        for piv, vec in basis.items():
            if (vec >> f) & 1:
                a |= 1 << piv
        parity = bin(a & p).count("1") & 1
        equations.append(XorEquation(frozenset(i for i in range(R.arity) if (a >> i) & 1), parity))
    return equations


def clauses_define(clauses: list[Clause], n: int) -> BoolRelation:
    """The relation defined by the conjunction of the clauses (test/round-trip aid)."""
    mask = (1 << (1 << n)) - 1
    for c in clauses:
        mask &= c.satisfying_mask(n)
    return BoolRelation(n, mask)


def xor_system_defines(equations: list[XorEquation], n: int) -> BoolRelation:
    bits = 0
    for t in range(1 << n):
        ok = True
        for eq in equations:
            s = 0
            for v in eq.vars:
                s ^= (t >> v) & 1
            if s != eq.parity:
                ok = False
                break
        if ok:
            bits |= 1 << t
    return BoolRelation(n, bits)


def export_dimacs(instance: Instance) -> str:
    """Standard CNF: one clause per falsifying tuple of each constraint.

    Variable id k maps to DIMACS variable k+1; constraints are emitted in
    order with falsifying tuples ascending.
    """
    lines = []
    n_clauses = 0
    for c in instance.constraints:
        rel = instance.catalogue[c.rel]
        for t in range(1 << rel.arity):
            if rel.has(t):
                continue
            lits = []
            for j, v in enumerate(c.vars):
                lits.append(-(v + 1) if (t >> j) & 1 else (v + 1))
            lines.append(" ".join(str(x) for x in lits) + " 0")
            n_clauses += 1
    header = f"p cnf {instance.num_vars} {n_clauses}"
    return "\n".join([header] + lines)

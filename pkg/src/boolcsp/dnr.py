"""Diagonalization against a mock halting table through parity constraints.

Each halting report (e, j) contributes the parity constraint "the j-th
canonical set of size t(e) does not take a constant color": its even width
makes both constant colorings fail. Any homogeneous set for the built
instance therefore avoids containing any reported set, and reading the
least elements of the homogeneous set back through the canonical numbering
yields a function that disagrees with the table everywhere it halts.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import InputError, ResourceBudgetError
from .instances import Constraint, Instance
from .relations import BoolRelation, REL_NEQ

VAR_BUDGET = 100_000

# a + b + c = 0 over GF(2); chain link for wide parities
REL_XOR3_EVEN = BoolRelation.from_strings(["000", "011", "101", "110"], "XOR3_EVEN")


def t_sequence(count: int) -> list[int]:
    """t(0) = 2 and t(e+1) = 2 + sum of all earlier values; always even."""
    out: list[int] = []
    for _ in range(count):
        out.append(2 + sum(out))
    return out


def colex_index(elements) -> int:
    """Position of a finite set in the colexicographic enumeration of all
    sets of its size."""
    xs = sorted(elements)
    if len(set(xs)) != len(xs):
        raise InputError("set elements must be distinct")
    return sum(comb(x, i + 1) for i, x in enumerate(xs))


def colex_subset(index: int, size: int) -> tuple[int, ...]:
    """The index-th size-element set in colexicographic order."""
    if index < 0 or size < 0:
        raise InputError("index and size must be nonnegative")
    out = []
    j = index
    for i in range(size, 0, -1):
        a = i - 1
        while comb(a + 1, i) <= j:
            a += 1
        out.append(a)
        j -= comb(a, i)
    return tuple(sorted(out))


@dataclass(frozen=True)
class MockOracle:
    """Halting table: entry e -> (value, halting stage); at most one entry
    per index and at most one index halting per stage."""

    entries: dict[int, tuple[int, int]]

    def __post_init__(self) -> None:
        stages = [s for _, s in self.entries.values()]
        if len(stages) != len(set(stages)):
            raise InputError("at most one index may halt per stage")
        for e, (value, stage) in self.entries.items():
            if e < 0 or value < 0 or stage < 0:
                raise InputError("oracle entries must be nonnegative")

    @classmethod
    def from_entries(cls, triples) -> "MockOracle":
        entries = {}
        for e, value, stage in triples:
            if e in entries:
                raise InputError(f"duplicate oracle entry for index {e}")
            entries[e] = (value, stage)
        return cls(entries)

    def lookup(self, e: int, stage: int) -> int | None:
        hit = self.entries.get(e)
        if hit is None or hit[1] > stage:
            return None
        return hit[0]

    def halting(self) -> list[int]:
        return sorted(self.entries)


@dataclass(frozen=True)
class DnrBuild:
    instance: Instance
    main_var_count: int
    used: tuple[tuple[int, int, tuple[int, ...]], ...]  # (e, value, target set)


def dnr_build(oracle: MockOracle, stages: int, var_budget: int = VAR_BUDGET) -> DnrBuild:
    """One parity constraint per oracle entry observed within the stage
    budget: the reported size-t(e) set must sum to 1 over GF(2).

    Widths above 2 are chained through auxiliary variables with ternary
    even-parity links and a final disequality link; the chain is equivalent
    to the wide parity on the original variables.
    """
    events = []
    for e, (value, stage) in oracle.entries.items():
        observed = max(stage, e + 1)  # an index is examined only after stage e
        if observed <= stages:
            events.append((observed, e, value))
    events.sort()

    used = []
    targets = []
    for _, e, value in events:
        width = t_sequence(e + 1)[e]
        target = colex_subset(value, width)
        if target[-1] >= var_budget:
            raise ResourceBudgetError(
                f"target set for index {e} reaches variable {target[-1]} beyond budget {var_budget}"
            )
        used.append((e, value, target))
        targets.append(target)

    main = 1 + max((t[-1] for t in targets), default=-1)
    next_var = main
    constraints: list[Constraint] = []
    for target in targets:
        m = len(target)
        if m == 2:
            constraints.append(Constraint(0, (target[0], target[1])))
            continue
        carry = next_var
        next_var += 1
        constraints.append(Constraint(1, (target[0], target[1], carry)))
        for i in range(2, m - 1):
            nxt = next_var
            next_var += 1
            constraints.append(Constraint(1, (carry, target[i], nxt)))
            carry = nxt
        constraints.append(Constraint(0, (carry, target[m - 1])))

    instance = Instance((REL_NEQ, REL_XOR3_EVEN), next_var, tuple(constraints))
    return DnrBuild(instance, main, tuple(used))


@dataclass(frozen=True)
class DnrExtract:
    g: dict[int, int]
    verdict: bool
    clashes: tuple[int, ...]


def dnr_extract(H, oracle: MockOracle) -> DnrExtract:
    """g(e) = canonical index of the least t(e) elements of H, for every
    index up to the largest halting one; the verdict asserts g differs from
    the table at every halting index."""
    hs = sorted(set(H))
    halting = oracle.halting()
    if not halting:
        return DnrExtract({}, True, ())
    e_max = halting[-1]
    widths = t_sequence(e_max + 1)
    if len(hs) < widths[e_max]:
        raise InputError(
            f"homogeneous set of size {len(hs)} is too small; need {widths[e_max]} elements"
        )
    g = {e: colex_index(hs[: widths[e]]) for e in range(e_max + 1)}
    clashes = tuple(e for e in halting if g[e] == oracle.entries[e][0])
    return DnrExtract(g, not clashes, clashes)

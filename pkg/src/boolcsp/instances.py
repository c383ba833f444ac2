"""Constraint instances over a relation catalogue, assignments, solve results."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InputError
from .relations import BoolRelation


class Constraint(NamedTuple):
    """A relation (by catalogue index) applied to a tuple of variable ids."""

    rel: int
    vars: tuple[int, ...]


@dataclass(frozen=True)
class Instance:
    """Variable universe + constraints; optionally a localized variable set L."""

    catalogue: tuple[BoolRelation, ...]
    num_vars: int
    constraints: tuple[Constraint, ...]
    localized: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        n_rel = len(self.catalogue)
        for i, c in enumerate(self.constraints):
            if not 0 <= c.rel < n_rel:
                raise InputError(f"constraint {i} references relation {c.rel} outside the catalogue")
            if len(c.vars) != self.catalogue[c.rel].arity:
                raise InputError(
                    f"constraint {i}: {len(c.vars)} variables for arity "
                    f"{self.catalogue[c.rel].arity} relation"
                )
            for v in c.vars:
                if not 0 <= v < self.num_vars:
                    raise InputError(f"constraint {i} uses variable {v} outside universe of {self.num_vars}")
        if self.localized is not None:
            if list(self.localized) != sorted(set(self.localized)):
                raise InputError("localized set must be strictly sorted")
            if self.localized and not 0 <= self.localized[-1] < self.num_vars:
                raise InputError("localized set exceeds the variable universe")

    @classmethod
    def build(
        cls,
        catalogue: Sequence[BoolRelation],
        num_vars: int,
        constraints: Iterable[tuple[int, Sequence[int]]],
        localized: Iterable[int] | None = None,
    ) -> "Instance":
        cons = tuple(Constraint(r, tuple(vs)) for r, vs in constraints)
        loc = tuple(sorted(set(localized))) if localized is not None else None
        return cls(tuple(catalogue), num_vars, cons, loc)

    def grouped(self) -> dict[int, np.ndarray]:
        """Constraint variable tuples as one int array per relation index.

        Cached; this columnar view is the hot-path representation for the
        large-instance engines and the vectorized model check.
        """
        cache = getattr(self, "_grouped_cache", None)
        if cache is None:
            by_rel: dict[int, list[tuple[int, ...]]] = {}
            for c in self.constraints:
                by_rel.setdefault(c.rel, []).append(c.vars)
            cache = {
                r: np.array(rows, dtype=np.int64).reshape(len(rows), -1)
                for r, rows in by_rel.items()
            }
            object.__setattr__(self, "_grouped_cache", cache)
        return cache


@dataclass(frozen=True)
class Assignment:
    """A (possibly partial) map from variable ids to Booleans."""

    values: dict[int, int]

    def __post_init__(self) -> None:
        for v, b in self.values.items():
            if b not in (0, 1):
                raise InputError(f"assignment value for variable {v} is not Boolean")

    def is_total_for(self, num_vars: int) -> bool:
        return all(v in self.values for v in range(num_vars))

    def get(self, var: int) -> int:
        return self.values[var]

    @classmethod
    def total(cls, bits: Sequence[int]) -> "Assignment":
        return cls({i: int(b) for i, b in enumerate(bits)})


@dataclass(frozen=True)
class SolveResult:
    """Sat with a model, or Unsat with the first failing constraint index."""

    status: str  # "sat" | "unsat"
    assignment: Assignment | None = None
    failed_constraint: int | None = None
    engine: str | None = None
    forced: frozenset[int] | None = field(default=None, compare=False)

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"

    @classmethod
    def sat(cls, assignment: Assignment, engine: str | None = None,
            forced: frozenset[int] | None = None) -> "SolveResult":
        return cls("sat", assignment, None, engine, forced)

    @classmethod
    def unsat(cls, failed_constraint: int | None = None, engine: str | None = None) -> "SolveResult":
        return cls("unsat", None, failed_constraint, engine)


def constraint_holds(instance: Instance, c: Constraint, nu: Assignment) -> bool:
    idx = 0
    for j, v in enumerate(c.vars):
        idx |= nu.values[v] << j
    return instance.catalogue[c.rel].has(idx)


def verify_model(instance: Instance, nu: Assignment) -> bool:
    """True iff the total assignment maps every constraint into its relation."""
    if not nu.is_total_for(instance.num_vars):
        raise InputError("verify_model requires a total assignment")
    if len(instance.constraints) > 20000:
        return _verify_model_vectorized(instance, nu)
    return all(constraint_holds(instance, c, nu) for c in instance.constraints)


def _verify_model_vectorized(instance: Instance, nu: Assignment) -> bool:
    model = np.zeros(instance.num_vars, dtype=np.int64)
    for v, b in nu.values.items():
        model[v] = b
    for rel_idx, varmat in instance.grouped().items():
        rel = instance.catalogue[rel_idx]
        idx = np.zeros(len(varmat), dtype=np.int64)
        for j in range(varmat.shape[1]):
            idx |= model[varmat[:, j]] << j
        table = np.zeros(1 << rel.arity, dtype=bool)
        for k in rel.rows():
            table[k] = True
        if not table[idx].all():
            return False
    return True


def first_failing_constraint(instance: Instance, nu: Assignment) -> int | None:
    for i, c in enumerate(instance.constraints):
        if not constraint_holds(instance, c, nu):
            return i
    return None

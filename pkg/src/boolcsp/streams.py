"""Stage-indexed constraint streams: the finite-prefix realization of
infinite constraint sets.

A stream hands out a finite batch of constraints per stage. The batch at
stage s may only mention variables below the stream's bound at s, and the
bound never decreases, so prefixes are honest approximations of the whole.
"""

from __future__ import annotations

from typing import Callable, Sequence

from .errors import InputError
from .instances import Constraint, Instance
from .relations import BoolRelation


class ConstraintStream:
    """Deterministic generator of constraint batches over a relation catalogue."""

    def __init__(
        self,
        catalogue: Sequence[BoolRelation],
        batch_fn: Callable[[int], Sequence[Constraint]],
        var_bound: Callable[[int], int],
        max_stage: int | None = None,
    ):
        self.catalogue = tuple(catalogue)
        self._batch_fn = batch_fn
        self._var_bound = var_bound
        self.max_stage = max_stage
        self._cache: dict[int, tuple[Constraint, ...]] = {}

    def var_bound(self, stage: int) -> int:
        return self._var_bound(stage)

    def batch(self, stage: int) -> tuple[Constraint, ...]:
        if stage < 0:
            raise InputError("stages are numbered from 0")
        if self.max_stage is not None and stage > self.max_stage:
            return ()
        if stage not in self._cache:
            batch = tuple(self._batch_fn(stage))
            bound = self._var_bound(stage)
            for c in batch:
                if any(v >= bound for v in c.vars):
                    raise InputError(
                        f"stage {stage} batch mentions a variable beyond its bound {bound}"
                    )
            self._cache[stage] = batch
        return self._cache[stage]

    def constraints_through(self, stage: int) -> list[Constraint]:
        out: list[Constraint] = []
        for s in range(stage + 1):
            out.extend(self.batch(s))
        return out

    def prefix_instance(self, n_constraints: int, min_vars: int = 0) -> Instance:
        """The instance of the first ``n_constraints`` streamed constraints.

        The variable universe is padded to ``min_vars`` so that callers can
        pin variables the prefix has not mentioned yet.
        """
        out: list[Constraint] = []
        stage = 0
        while len(out) < n_constraints:
            if self.max_stage is not None and stage > self.max_stage:
                break
            out.extend(self.batch(stage))
            stage += 1
            if self.max_stage is None and stage > 10**6:
                raise InputError("unbounded stream never produced the requested prefix")
        out = out[:n_constraints]
        top = max((max(c.vars) + 1 for c in out), default=0)
        return Instance(self.catalogue, max(top, min_vars), tuple(out))

    @classmethod
    def from_instance(cls, instance: Instance) -> "ConstraintStream":
        """View a finite instance as a stream: a constraint enters at the
        stage its highest variable is introduced."""
        by_stage: dict[int, list[Constraint]] = {}
        for c in instance.constraints:
            by_stage.setdefault(max(c.vars) + 1, []).append(c)
        top = instance.num_vars
        return cls(
            instance.catalogue,
            lambda s: tuple(by_stage.get(s, ())),
            lambda s: min(s, top),
            max_stage=top,
        )

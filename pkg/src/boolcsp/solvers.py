"""Satisfiability engines, one per tractable relation class, plus an oracle
brute-force scan, a DPLL fallback, and the classification-driven dispatcher.

Deterministic conventions, fixed package-wide: assignments are enumerated
lexicographically with variable 0 most significant; propagation is FIFO;
branching picks the lowest unassigned variable, value 0 first; elimination
pivots on the lowest variable index; free variables default to 0.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .errors import InputError, LemmaFalsifiedError, WrongClassError
from .instances import (
    Assignment,
    Constraint,
    Instance,
    SolveResult,
    first_failing_constraint,
    verify_model,
)
from .normal_forms import compile_horn_cnf, compile_two_cnf, compile_xor_system
from .relations import BoolRelation, REL_FALSE_UNIT, REL_TRUE_UNIT, relation_properties

BRUTE_FORCE_VAR_CAP = 25
_CHUNK = 1 << 18


def brute_force_sat(instance: Instance) -> SolveResult:
    """Exhaustive scan in lexicographic assignment order; first model wins."""
    n = instance.num_vars
    if n > BRUTE_FORCE_VAR_CAP:
        raise InputError(f"brute force capped at {BRUTE_FORCE_VAR_CAP} variables, got {n}")
    tables = {}
    for r, rel in enumerate(instance.catalogue):
        table = np.zeros(1 << rel.arity, dtype=bool)
        for k in rel.rows():
            table[k] = True
        tables[r] = table
    total = 1 << n
    for lo in range(0, total, _CHUNK):
        hi = min(lo + _CHUNK, total)
        arr = np.arange(lo, hi, dtype=np.int64)
        ok = np.ones(hi - lo, dtype=bool)
        for c in instance.constraints:
            idx = np.zeros(hi - lo, dtype=np.int64)
            for j, v in enumerate(c.vars):
                idx |= ((arr >> (n - 1 - v)) & 1) << j
            ok &= tables[c.rel][idx]
            if not ok.any():
                break
        hits = np.nonzero(ok)[0]
        if len(hits):
            a = lo + int(hits[0])
            model = Assignment({v: (a >> (n - 1 - v)) & 1 for v in range(n)})
            return SolveResult.sat(model, engine="brute_force")
    zero = Assignment({v: 0 for v in range(n)})
    return SolveResult.unsat(first_failing_constraint(instance, zero), engine="brute_force")


def solve_default(instance: Instance, i: int) -> SolveResult:
    """The default-value strategy: every variable gets i unless a unit
    constraint forces it the other way; sound whenever every catalogue
    relation is i-default or is that unit relation."""
    if i not in (0, 1):
        raise InputError("default value must be 0 or 1")
    unit = REL_TRUE_UNIT if i == 0 else REL_FALSE_UNIT
    for rel in instance.catalogue:
        if rel.is_empty or rel == unit:
            continue
        props = relation_properties(rel)
        if not (props.zero_default if i == 0 else props.one_default):
            raise WrongClassError(
                f"relation {rel.name or repr(rel)} is neither {i}-default nor the unit relation"
            )
    values = {v: i for v in range(instance.num_vars)}
    for c in instance.constraints:
        if instance.catalogue[c.rel] == unit:
            values[c.vars[0]] = 1 - i
    nu = Assignment(values)
    bad = first_failing_constraint(instance, nu)
    if bad is None:
        return SolveResult.sat(nu, engine=f"default{i}")
    return SolveResult.unsat(bad, engine=f"default{i}")


# ---------------------------------------------------------------------------
# Horn engine: FIFO unit propagation to the minimal model.
# ---------------------------------------------------------------------------


def _horn_templates(instance: Instance) -> list[list[tuple[tuple[int, ...], int]]]:
    """Per catalogue relation: compiled clauses as (body positions, head position).

    Head position is -1 for goal clauses (no positive literal).
    """
    templates = []
    for rel in instance.catalogue:
        clauses = compile_horn_cnf(rel)
        if clauses is None:
            raise WrongClassError(f"relation {rel.name or repr(rel)} is not horn")
        shaped = []
        for cl in clauses:
            body = tuple(v for v, s in cl.lits if s == 0)
            heads = [v for v, s in cl.lits if s == 1]
            shaped.append((body, heads[0] if heads else -1))
        templates.append(shaped)
    return templates


def solve_horn(instance: Instance) -> SolveResult:
    """Unit propagation over the compiled horn clauses.

    Sat returns the minimal model, true exactly on the forced set (carried
    in ``forced``); Unsat is reported when propagation completes a clause
    with no positive literal.
    """
    templates = _horn_templates(instance)
    n = instance.num_vars

    heads_parts: list[np.ndarray] = []
    body_var_parts: list[np.ndarray] = []
    body_len_parts: list[np.ndarray] = []
    origin_parts: list[np.ndarray] = []

    # Constraint ids per relation group, in the same order as grouped() rows.
    group_origin: dict[int, np.ndarray] = {}
    counters_by_rel: dict[int, int] = {}
    for ci, c in enumerate(instance.constraints):
        counters_by_rel.setdefault(c.rel, 0)
    pos_by_rel = {r: [] for r in counters_by_rel}
    for ci, c in enumerate(instance.constraints):
        pos_by_rel[c.rel].append(ci)
    for r, ids in pos_by_rel.items():
        group_origin[r] = np.array(ids, dtype=np.int64)

    slow_rows: list[tuple[tuple[int, ...], int, int]] = []  # (body vars, head var, origin)

    for rel_idx, varmat in instance.grouped().items():
        shaped = templates[rel_idx]
        if not shaped:
            continue
        origins = group_origin[rel_idx]
        if varmat.shape[1] > 1:
            srt = np.sort(varmat, axis=1)
            repeat = (np.diff(srt, axis=1) == 0).any(axis=1)
        else:
            repeat = np.zeros(len(varmat), dtype=bool)
        clean = ~repeat
        sub = varmat[clean]
        sub_origin = origins[clean]
        for body, head in shaped:
            if len(sub):
                heads_parts.append(sub[:, head] if head >= 0 else np.full(len(sub), -1, dtype=np.int64))
                if body:
                    body_var_parts.append(sub[:, list(body)].reshape(-1))
                body_len_parts.append(np.full(len(sub), len(body), dtype=np.int64))
                origin_parts.append(sub_origin)
        if repeat.any():
            for row, origin in zip(varmat[repeat], origins[repeat]):
                for body, head in shaped:
                    lits = {}
                    taut = False
                    for p in body:
                        v = int(row[p])
                        if lits.get(v, 0) == 1:
                            taut = True
                            break
                        lits[v] = 0
                    if taut:
                        continue
                    hv = -1
                    if head >= 0:
                        hv = int(row[head])
                        if lits.get(hv) == 0:
                            continue  # v and not v in one clause
                    slow_rows.append((tuple(lits), hv, int(origin)))

    if heads_parts:
        heads = np.concatenate(heads_parts)
        body_lens = np.concatenate(body_len_parts)
        origins_all = np.concatenate(origin_parts)
        body_vars = np.concatenate(body_var_parts) if body_var_parts else np.zeros(0, dtype=np.int64)
    else:
        heads = np.zeros(0, dtype=np.int64)
        body_lens = np.zeros(0, dtype=np.int64)
        origins_all = np.zeros(0, dtype=np.int64)
        body_vars = np.zeros(0, dtype=np.int64)
    if slow_rows:
        heads = np.concatenate([heads, np.array([h for _, h, _ in slow_rows], dtype=np.int64)])
        body_lens = np.concatenate([body_lens, np.array([len(b) for b, _, _ in slow_rows], dtype=np.int64)])
        origins_all = np.concatenate([origins_all, np.array([o for _, _, o in slow_rows], dtype=np.int64)])
        extra = [v for b, _, _ in slow_rows for v in b]
        body_vars = np.concatenate([body_vars, np.array(extra, dtype=np.int64)])

    n_clauses = len(heads)
    counters = body_lens.copy()
    clause_of_body = np.repeat(np.arange(n_clauses, dtype=np.int64), body_lens)

    # occurrence CSR: for each variable, the clauses whose body mentions it
    order = np.argsort(body_vars, kind="stable")
    sorted_vars = body_vars[order]
    sorted_clauses = clause_of_body[order]
    indptr = np.searchsorted(sorted_vars, np.arange(n + 1, dtype=np.int64))

    true = np.zeros(n, dtype=bool)
    queue: deque[int] = deque()
    ready = np.nonzero(counters == 0)[0]
    for cid in ready:
        h = heads[cid]
        if h < 0:
            return SolveResult.unsat(int(origins_all[cid]), engine="horn")
        if not true[h]:
            true[h] = True
            queue.append(int(h))
    while queue:
        v = queue.popleft()
        ids = sorted_clauses[indptr[v]:indptr[v + 1]]
        if not len(ids):
            continue
        counters[ids] -= 1
        done = ids[counters[ids] == 0]
        for cid in done:
            h = heads[cid]
            if h < 0:
                return SolveResult.unsat(int(origins_all[cid]), engine="horn")
            if not true[h]:
                true[h] = True
                queue.append(int(h))

    forced = frozenset(int(v) for v in np.nonzero(true)[0])
    model = Assignment({v: (1 if true[v] else 0) for v in range(n)})
    return SolveResult.sat(model, engine="horn", forced=forced)


# ---------------------------------------------------------------------------
# 2-SAT engine: implication graph + strongly connected components.
# ---------------------------------------------------------------------------


def _two_sat_templates(instance: Instance) -> list[list[tuple[tuple[int, int], ...]]]:
    templates = []
    for rel in instance.catalogue:
        clauses = compile_two_cnf(rel)
        if clauses is None:
            raise WrongClassError(f"relation {rel.name or repr(rel)} is not bijunctive")
        templates.append([cl.lits for cl in clauses])
    return templates


def solve_two_sat(instance: Instance) -> SolveResult:
    """Implication-graph decision: variable true iff its literal's component
    is topologically later than its negation's."""
    templates = _two_sat_templates(instance)
    n = instance.num_vars
    if n == 0:
        return SolveResult.sat(Assignment({}), engine="two_sat")

    # literal node ids: positive literal of v -> 2v, negative -> 2v + 1
    src_parts: list[np.ndarray] = []
    dst_parts: list[np.ndarray] = []
    group_ids = {r: np.array(ids, dtype=np.int64) for r, ids in _positions_by_rel(instance).items()}

    for rel_idx, varmat in instance.grouped().items():
        lits_list = templates[rel_idx]
        origins = group_ids[rel_idx]
        if any(len(lits) == 0 for lits in lits_list):
            return SolveResult.unsat(int(origins[0]), engine="two_sat")
        if varmat.shape[1] > 1:
            srt = np.sort(varmat, axis=1)
            repeat = (np.diff(srt, axis=1) == 0).any(axis=1)
        else:
            repeat = np.zeros(len(varmat), dtype=bool)
        sub = varmat[~repeat]
        for lits in lits_list:
            if len(sub):
                if len(lits) == 1:
                    (p, s), = lits
                    node = 2 * sub[:, p] + (1 - s)
                    src_parts.append(node ^ 1)
                    dst_parts.append(node)
                else:
                    (p1, s1), (p2, s2) = lits
                    n1 = 2 * sub[:, p1] + (1 - s1)
                    n2 = 2 * sub[:, p2] + (1 - s2)
                    src_parts.append(n1 ^ 1)
                    dst_parts.append(n2)
                    src_parts.append(n2 ^ 1)
                    dst_parts.append(n1)
        if repeat.any():
            for row in varmat[repeat]:
                for lits in lits_list:
                    inst = [(int(row[p]), s) for p, s in lits]
                    if len(inst) == 2 and inst[0][0] == inst[1][0]:
                        if inst[0][1] != inst[1][1]:
                            continue  # tautology
                        inst = inst[:1]
                    nodes = [2 * v + (1 - s) for v, s in inst]
                    if len(nodes) == 1:
                        src_parts.append(np.array([nodes[0] ^ 1]))
                        dst_parts.append(np.array([nodes[0]]))
                    else:
                        src_parts.append(np.array([nodes[0] ^ 1, nodes[1] ^ 1]))
                        dst_parts.append(np.array([nodes[1], nodes[0]]))

    if src_parts:
        src = np.concatenate(src_parts)
        dst = np.concatenate(dst_parts)
    else:
        src = np.zeros(0, dtype=np.int64)
        dst = np.zeros(0, dtype=np.int64)

    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    graph = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(2 * n, 2 * n))
    _, labels = connected_components(graph, directed=True, connection="strong")

    pos = labels[0::2]
    neg = labels[1::2]
    conflict = np.nonzero(pos == neg)[0]
    if len(conflict):
        v = int(conflict[0])
        return SolveResult.unsat(_first_constraint_with_var(instance, v), engine="two_sat")

    ls, ld = labels[src], labels[dst]
    cross = ls != ld
    if np.all(ls[cross] >= ld[cross]):
        truth = pos < neg  # smaller label = topologically later
    elif np.all(ls[cross] <= ld[cross]):
        truth = pos > neg
    else:
        order = _condensation_order(labels, src, dst)
        truth = order[pos] > order[neg]
    model = Assignment({v: (1 if truth[v] else 0) for v in range(n)})
    return SolveResult.sat(model, engine="two_sat")


def _positions_by_rel(instance: Instance) -> dict[int, list[int]]:
    pos: dict[int, list[int]] = {}
    for i, c in enumerate(instance.constraints):
        pos.setdefault(c.rel, []).append(i)
    return pos


def _first_constraint_with_var(instance: Instance, v: int) -> int | None:
    for i, c in enumerate(instance.constraints):
        if v in c.vars:
            return i
    return None


def _condensation_order(labels: np.ndarray, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Topological index per component (0 = source side), Kahn fallback."""
    ncomp = int(labels.max()) + 1 if len(labels) else 0
    edges = {(int(a), int(b)) for a, b in zip(labels[src], labels[dst]) if a != b}
    succ: dict[int, list[int]] = {}
    indeg = np.zeros(ncomp, dtype=np.int64)
    for a, b in edges:
        succ.setdefault(a, []).append(b)
        indeg[b] += 1
    queue = deque(int(c) for c in range(ncomp) if indeg[c] == 0)
    order = np.zeros(ncomp, dtype=np.int64)
    k = 0
    while queue:
        c = queue.popleft()
        order[c] = k
        k += 1
        for b in succ.get(c, ()):
            indeg[b] -= 1
            if indeg[b] == 0:
                queue.append(b)
    if k != ncomp:
        raise LemmaFalsifiedError("component condensation is not acyclic")
    return order


# ---------------------------------------------------------------------------
# XOR engine: GF(2) elimination with lowest-index pivots.
# ---------------------------------------------------------------------------


def solve_xor(instance: Instance) -> SolveResult:
    """Gaussian elimination over GF(2); free variables are set to 0."""
    templates: list[list[tuple[tuple[int, ...], int]] | None] = []
    for rel in instance.catalogue:
        if rel.is_empty:
            templates.append(None)
            continue
        eqs = compile_xor_system(rel)
        if eqs is None:
            raise WrongClassError(f"relation {rel.name or repr(rel)} is not affine")
        templates.append([(tuple(sorted(eq.vars)), eq.parity) for eq in eqs])

    basis: dict[int, tuple[int, int]] = {}  # pivot -> (row bits, parity)
    for ci, c in enumerate(instance.constraints):
        tpl = templates[c.rel]
        if tpl is None:
            return SolveResult.unsat(ci, engine="xor")
        for positions, parity in tpl:
            row = 0
            for p in positions:
                row ^= 1 << c.vars[p]  # repeated variables cancel
            par = parity
            while row:
                piv = (row & -row).bit_length() - 1
                if piv in basis:
                    brow, bpar = basis[piv]
                    row ^= brow
                    par ^= bpar
                else:
                    basis[piv] = (row, par)
                    row = 0
                    par = 0
                    break
            if par:
                return SolveResult.unsat(ci, engine="xor")

    values = {v: 0 for v in range(instance.num_vars)}
    for piv in sorted(basis, reverse=True):
        row, par = basis[piv]
        val = par
        rest = row ^ (1 << piv)
        while rest:
            j = (rest & -rest).bit_length() - 1
            val ^= values[j]
            rest ^= 1 << j
        values[piv] = val
    return SolveResult.sat(Assignment(values), engine="xor")


# ---------------------------------------------------------------------------
# Generic engine: DPLL on the falsifying-tuple CNF.
# ---------------------------------------------------------------------------


def _instance_cnf(instance: Instance) -> tuple[list[tuple[int, ...]], list[int]]:
    """Clauses as literal tuples (literal = 2v for x_v, 2v+1 for its negation)."""
    clauses: list[tuple[int, ...]] = []
    origins: list[int] = []
    for ci, c in enumerate(instance.constraints):
        rel = instance.catalogue[c.rel]
        for t in range(1 << rel.arity):
            if rel.has(t):
                continue
            lits: dict[int, int] = {}
            taut = False
            for j, v in enumerate(c.vars):
                s = 1 - ((t >> j) & 1)  # literal opposite to the tuple bit
                prev = lits.get(v)
                if prev is not None and prev != s:
                    taut = True
                    break
                lits[v] = s
            if taut:
                continue
            clauses.append(tuple(2 * v + (1 - s) for v, s in sorted(lits.items())))
            origins.append(ci)
    return clauses, origins


def solve_generic(instance: Instance) -> SolveResult:
    """Complete DPLL: FIFO unit propagation, branch on the lowest unassigned
    variable with value 0 first, chronological backtracking."""
    clauses, origins = _instance_cnf(instance)
    n = instance.num_vars
    for cid, cl in enumerate(clauses):
        if not cl:
            return SolveResult.unsat(origins[cid], engine="generic")

    watch: dict[int, list[int]] = {}
    w1 = [0] * len(clauses)
    w2 = [0] * len(clauses)
    values: list[int] = [-1] * n
    trail: list[int] = []
    units: deque[tuple[int, int]] = deque()

    for cid, cl in enumerate(clauses):
        if len(cl) == 1:
            units.append((cl[0], cid))
            w1[cid] = w2[cid] = cl[0]
        else:
            w1[cid], w2[cid] = cl[0], cl[1]
            watch.setdefault(cl[0], []).append(cid)
            watch.setdefault(cl[1], []).append(cid)

    def lit_value(lit: int) -> int:
        v = values[lit >> 1]
        if v < 0:
            return -1
        return v ^ (lit & 1)

    def assign(lit: int) -> int | None:
        """Make lit true; propagate; return conflicting clause id or None."""
        pending = deque([lit])
        while pending:
            cur = pending.popleft()
            var = cur >> 1
            val = 1 - (cur & 1)
            if values[var] >= 0:
                if values[var] != val:
                    return -2  # conflict without clause (assumption clash)
                continue
            values[var] = val
            trail.append(var)
            falsified = cur ^ 1
            lst = watch.get(falsified, [])
            i = 0
            while i < len(lst):
                cid = lst[i]
                other = w2[cid] if w1[cid] == falsified else w1[cid]
                if lit_value(other) == 1:
                    i += 1
                    continue
                moved = False
                for cand in clauses[cid]:
                    if cand == falsified or cand == other:
                        continue
                    if lit_value(cand) != 0:
                        if w1[cid] == falsified:
                            w1[cid] = cand
                        else:
                            w2[cid] = cand
                        watch.setdefault(cand, []).append(cid)
                        lst[i] = lst[-1]
                        lst.pop()
                        moved = True
                        break
                if moved:
                    continue
                ov = lit_value(other)
                if ov == 0:
                    return cid
                if ov == -1:
                    pending.append(other)
                i += 1
        return None

    # initial units
    while units:
        lit, cid = units.popleft()
        if lit_value(lit) == 0:
            return SolveResult.unsat(origins[cid], engine="generic")
        conflict = assign(lit)
        if conflict is not None:
            failed = origins[conflict] if conflict >= 0 else None
            return SolveResult.unsat(failed, engine="generic")

    decisions: list[tuple[int, int, int]] = []  # (var, tried value, trail mark)

    def backtrack() -> bool:
        while decisions:
            var, tried, mark = decisions.pop()
            while len(trail) > mark:
                values[trail.pop()] = -1
            if tried == 0:
                decisions.append((var, 1, mark))
                if assign(2 * var) is None:  # flip to value 1
                    return True
            # tried == 1 falls through to pop the next decision
        return False

    while True:
        v = 0
        while v < n and values[v] >= 0:
            v += 1
        if v >= n:
            break
        decisions.append((v, 0, len(trail)))
        conflict = assign(2 * v + 1)  # value 0 first
        if conflict is not None and not backtrack():
            return SolveResult.unsat(None, engine="generic")

    model = Assignment({v: values[v] for v in range(n)})
    return SolveResult.sat(model, engine="generic")


# ---------------------------------------------------------------------------
# Dispatcher.
# ---------------------------------------------------------------------------


def solve_dispatch(instance: Instance) -> SolveResult:
    """Route to the first engine whose class condition the catalogue meets,
    in the fixed order: constant-0, constant-1, default shapes, horn,
    co-horn, bijunctive, affine, generic. Sat models are verified."""
    for ci, c in enumerate(instance.constraints):
        if instance.catalogue[c.rel].is_empty:
            return SolveResult.unsat(ci, engine="degenerate")
    live = [r for r in instance.catalogue if not r.is_empty]
    profiles = [relation_properties(r) for r in live]

    def finish(result: SolveResult) -> SolveResult:
        if result.is_sat:
            if not verify_model(instance, result.assignment):
                raise LemmaFalsifiedError(
                    f"engine {result.engine} returned a non-model"
                )
        return result

    n = instance.num_vars
    if all(p.zero_valid for p in profiles):
        nu = Assignment({v: 0 for v in range(n)})
        return finish(SolveResult.sat(nu, engine="const0"))
    if all(p.one_valid for p in profiles):
        nu = Assignment({v: 1 for v in range(n)})
        return finish(SolveResult.sat(nu, engine="const1"))
    if all(p.zero_default or r == REL_TRUE_UNIT for p, r in zip(profiles, live)):
        return finish(solve_default(instance, 0))
    if all(p.one_default or r == REL_FALSE_UNIT for p, r in zip(profiles, live)):
        return finish(solve_default(instance, 1))
    if all(p.horn for p in profiles):
        return finish(solve_horn(instance))
    if all(p.cohorn for p in profiles):
        return finish(_solve_cohorn(instance))
    if all(p.bijunctive for p in profiles):
        return finish(solve_two_sat(instance))
    if all(p.affine for p in profiles):
        return finish(solve_xor(instance))
    return finish(solve_generic(instance))


def _solve_cohorn(instance: Instance) -> SolveResult:
    """Dual horn: negate every relation pointwise, solve, flip the model."""
    flipped = Instance(
        tuple(r.complement_image() for r in instance.catalogue),
        instance.num_vars,
        instance.constraints,
        instance.localized,
    )
    res = solve_horn(flipped)
    if not res.is_sat:
        return SolveResult.unsat(res.failed_constraint, engine="cohorn")
    nu = Assignment({v: 1 - b for v, b in res.assignment.values.items()})
    return SolveResult.sat(nu, engine="cohorn")


ENGINES = {
    "auto": solve_dispatch,
    "brute": brute_force_sat,
    "horn": solve_horn,
    "two_sat": solve_two_sat,
    "xor": solve_xor,
    "generic": solve_generic,
}


def solve_with_assumptions(instance: Instance, partial: Assignment) -> SolveResult:
    """Satisfiability of the instance extended with unit pins for each
    assumed variable, routed through the dispatcher."""
    for v in partial.values:
        if not 0 <= v < instance.num_vars:
            raise InputError(f"assumption on variable {v} outside the universe")
    catalogue = list(instance.catalogue)
    pin_idx = {}
    for unit in (REL_FALSE_UNIT, REL_TRUE_UNIT):
        try:
            pin_idx[unit] = catalogue.index(unit)
        except ValueError:
            pin_idx[unit] = len(catalogue)
            catalogue.append(unit)
    extra = [
        Constraint(pin_idx[REL_TRUE_UNIT if b else REL_FALSE_UNIT], (v,))
        for v, b in sorted(partial.values.items())
    ]
    extended = Instance(
        tuple(catalogue),
        instance.num_vars,
        instance.constraints + tuple(extra),
        instance.localized,
    )
    return solve_dispatch(extended)

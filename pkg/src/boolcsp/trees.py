"""Finite binary trees and the tree/instance encodings in both directions:
level-relation instances, leftmost compactness search, and the stagewise
gadget-pinned instance whose models trace members of the tree."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .classify import UnitGadget
from .errors import ArityCapError, EncodingViolationError, InputError
from .instances import Assignment, Constraint, Instance
from .relations import BoolRelation, REL_FALSE_UNIT, REL_TRUE_UNIT
from .streams import ConstraintStream

TREE_ENCODE_DEPTH_CAP = 16
COMPACTNESS_DEPTH_CAP = 24


@dataclass(frozen=True)
class BinaryTree:
    """A downward-closed set of binary strings with an explicit depth bound."""

    strings: frozenset[str]
    depth: int

    def __post_init__(self) -> None:
        for s in self.strings:
            if any(ch not in "01" for ch in s):
                raise InputError(f"non-binary string {s!r} in tree")
            if len(s) > self.depth:
                raise InputError(f"string {s!r} exceeds the depth bound {self.depth}")
            if s and s[:-1] not in self.strings:
                raise InputError(f"tree is not downward closed at {s!r}")
        if self.strings and "" not in self.strings:
            raise InputError("nonempty tree must contain the empty string")

    @classmethod
    def from_strings(cls, strings: Iterable[str], depth: int | None = None) -> "BinaryTree":
        ss = set(strings)
        if ss:
            ss.add("")
        d = depth if depth is not None else max((len(s) for s in ss), default=0)
        return cls(frozenset(ss), d)

    def has(self, s: str) -> bool:
        return s in self.strings

    def level(self, n: int) -> list[str]:
        return sorted(s for s in self.strings if len(s) == n)

    def alive_prefixes(self, stage: int) -> set[str]:
        """All strings with an extension of length ``stage`` in the tree."""
        out: set[str] = set()
        for s in self.level(stage):
            for k in range(len(s) + 1):
                out.add(s[:k])
        return out


def tree_to_sat(tree: BinaryTree) -> Instance:
    """One constraint per level n: the arity-n relation whose tuples are
    exactly the level-n strings, applied to x_0..x_{n-1}."""
    if tree.depth > TREE_ENCODE_DEPTH_CAP:
        raise ArityCapError(f"level relations capped at arity {TREE_ENCODE_DEPTH_CAP}")
    catalogue = []
    constraints = []
    for n in range(1, tree.depth + 1):
        indices = [_string_index(s) for s in tree.level(n)]
        rel = BoolRelation.from_indices(n, indices, name=f"LEVEL{n}")
        catalogue.append(rel)
        constraints.append(Constraint(len(catalogue) - 1, tuple(range(n))))
    return Instance(tuple(catalogue), tree.depth, tuple(constraints))


def _string_index(s: str) -> int:
    idx = 0
    for i, ch in enumerate(s):
        idx |= (ch == "1") << i
    return idx


def path_from_model(nu: Assignment, tree: BinaryTree) -> str:
    """Read the depth-length string off the model; it must lie in the tree."""
    d = tree.depth
    if not nu.is_total_for(d):
        raise InputError(f"model must cover x_0..x_{d - 1}")
    s = "".join("1" if nu.values[i] else "0" for i in range(d))
    if not tree.has(s):
        raise EncodingViolationError(f"decoded string {s!r} is not in the tree")
    return s


def compactness_path(stream: ConstraintStream, depth: int) -> Assignment | None:
    """Leftmost depth-length survivor of the constraint-filtered string tree.

    A string survives if the partial assignment it encodes falsifies no
    streamed constraint that is fully instantiated at its length. Returns
    the survivor's assignment on x_0..x_{depth-1}, or None if the filtered
    tree dies out before the requested depth.
    """
    if depth > COMPACTNESS_DEPTH_CAP:
        raise ArityCapError(f"compactness search capped at depth {COMPACTNESS_DEPTH_CAP}")
    constraints = stream.constraints_through(depth)
    new_at: dict[int, list[Constraint]] = {}
    for c in constraints:
        lvl = max(c.vars) + 1
        if lvl <= depth:
            new_at.setdefault(lvl, []).append(c)
    catalogue = stream.catalogue

    def ok(level: int, bits: int) -> bool:
        for c in new_at.get(level, ()):  # constraints first fully instantiated here
            idx = 0
            for j, v in enumerate(c.vars):
                idx |= ((bits >> v) & 1) << j
            if not catalogue[c.rel].has(idx):
                return False
        return True

    stack: list[tuple[int, int]] = [(0, 0)]
    while stack:
        level, bits = stack.pop()
        if not ok(level, bits):
            continue
        if level == depth:
            return Assignment({i: (bits >> i) & 1 for i in range(depth)})
        stack.append((level + 1, bits | (1 << level)))  # right child under left child
        stack.append((level + 1, bits))
    return None


@dataclass(frozen=True)
class GadgetEncoding:
    """The pinned instance for a tree plus the decoding map back to strings."""

    instance: Instance
    tree: BinaryTree
    depth: int
    node_var: dict[str, int] = field(compare=False)
    pins: dict[str, int] = field(compare=False)

    def extract(self, nu: Assignment) -> str:
        """Follow the model one bit per level; the result must lie in the tree."""
        s = ""
        for _ in range(self.depth):
            s += "1" if nu.values[self.node_var[s]] else "0"
        if not self.tree.has(s):
            raise EncodingViolationError(f"extracted string {s!r} is not in the tree")
        return s


def tree_to_gadget_instance(
    tree: BinaryTree,
    pos_gadget: UnitGadget,
    neg_gadget: UnitGadget,
    depth: int,
) -> GadgetEncoding:
    """Stagewise pinning: whenever exactly one child of a node still has
    length-s extensions, pin the node's variable toward the surviving side
    with the matching unit gadget (side coordinates pinned by fresh
    variables under unit constraints)."""
    if depth > TREE_ENCODE_DEPTH_CAP:
        raise ArityCapError(f"gadget encoding capped at depth {TREE_ENCODE_DEPTH_CAP}")
    if pos_gadget.pinned_value != 1 or neg_gadget.pinned_value != 0:
        raise InputError("gadgets must pin toward 1 (pos) and 0 (neg)")

    node_var: dict[str, int] = {}
    for level in range(depth):
        for value in range(1 << level):
            s = format(value, f"0{level}b") if level else ""
            node_var[s] = (1 << level) - 1 + value

    catalogue: list[BoolRelation] = []

    def rel_index(rel: BoolRelation) -> int:
        for i, existing in enumerate(catalogue):
            if existing == rel:
                return i
        catalogue.append(rel)
        return len(catalogue) - 1

    pos_idx = rel_index(pos_gadget.relation)
    neg_idx = rel_index(neg_gadget.relation)
    unit1_idx = rel_index(REL_TRUE_UNIT)
    unit0_idx = rel_index(REL_FALSE_UNIT)

    next_var = (1 << depth) - 1
    constraints: list[Constraint] = []
    pins: dict[str, int] = {}

    for stage in range(1, depth + 1):
        alive = tree.alive_prefixes(stage)
        for s in sorted(node_var, key=lambda t: (len(t), t)):
            if s in pins or len(s) >= stage:
                continue
            left = (s + "0") in alive
            right = (s + "1") in alive
            if left == right:
                continue
            direction = 1 if right else 0
            gadget = pos_gadget if direction else neg_gadget
            gadget_idx = pos_idx if direction else neg_idx
            fresh = list(range(next_var, next_var + len(gadget.side)))
            next_var += len(gadget.side)
            constraints.append(
                Constraint(gadget_idx, gadget.constraint_tuple(node_var[s], fresh))
            )
            for (_, value), w in zip(gadget.side, fresh):
                constraints.append(Constraint(unit1_idx if value else unit0_idx, (w,)))
            pins[s] = direction

    instance = Instance(tuple(catalogue), next_var, tuple(constraints))
    return GadgetEncoding(instance, tree, depth, node_var, pins)

"""Addresses, finite complete subtrees and clopen sets of the boundary of T_{d,k}.

A vertex of T_{d,k} is addressed by its digit sequence from the root: the first
digit is in ``[0, k)``, every later digit in ``[0, d)``.  The empty tuple is the
root.  Addresses are plain tuples so they hash, compare and slice cheaply; the
fixed plane order is the shortlex order on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

Address = tuple[int, ...]

ROOT: Address = ()
DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"
MAX_ARITY = len(DIGITS)


class FormatError(ValueError):
    """Malformed textual or structural input."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class ParamsMismatch(ValueError):
    pass


@dataclass(frozen=True)
class TreeParams:
    """Arity ``d`` of non-root vertices and ``k`` of the root."""

    d: int
    k: int

    def __post_init__(self):
        if not 2 <= self.d <= MAX_ARITY:
            raise FormatError(f"d must lie in [2, {MAX_ARITY}], got {self.d}")
        if not 1 <= self.k <= MAX_ARITY:
            raise FormatError(f"k must lie in [1, {MAX_ARITY}], got {self.k}")

    def arity(self, v: Address) -> int:
        return self.k if not v else self.d

    def children(self, v: Address) -> list[Address]:
        return [v + (i,) for i in range(self.arity(v))]

    def check_address(self, a: Address) -> None:
        for pos, digit in enumerate(a):
            bound = self.k if pos == 0 else self.d
            if not 0 <= digit < bound:
                raise FormatError(f"digit out of range: {digit} at position {pos} (bound {bound})")

    def leaf_count_ok(self, n: int) -> bool:
        return n >= self.k and (n - self.k) % (self.d - 1) == 0


def shortlex(a: Address) -> tuple[int, Address]:
    return (len(a), a)


def format_address(a: Address) -> str:
    return "".join(DIGITS[i] for i in a)


def parse_address(text: str, params: TreeParams | None = None) -> Address:
    digits = []
    for pos, ch in enumerate(text):
        value = DIGITS.find(ch.lower())
        if value < 0:
            raise FormatError(f"invalid digit character {ch!r}", column=pos + 1)
        digits.append(value)
    a = tuple(digits)
    if params is not None:
        params.check_address(a)
    return a


def is_prefix(a: Address, b: Address) -> bool:
    """True when ``a`` is an ancestor of ``b`` or equal to it."""
    return len(a) <= len(b) and b[: len(a)] == a


def is_strict_prefix(a: Address, b: Address) -> bool:
    return len(a) < len(b) and b[: len(a)] == a


def proper_prefixes(a: Address) -> Iterator[Address]:
    for i in range(len(a)):
        yield a[:i]


@dataclass(frozen=True)
class CompleteTree:
    """A finite complete subtree, stored as its shortlex-sorted leaf antichain."""

    params: TreeParams
    leaves: tuple[Address, ...]
    _checked: bool = field(default=False, repr=False, compare=False)

    @classmethod
    def from_leaves(cls, params: TreeParams, leaves: Iterable[Address]) -> "CompleteTree":
        leaves = list(leaves)
        problem = _completeness_problem(leaves, params)
        if problem:
            raise FormatError(problem)
        return cls(params, tuple(sorted(leaves, key=shortlex)), True)

    @classmethod
    def from_internal(cls, params: TreeParams, internal: Iterable[Address]) -> "CompleteTree":
        """Tree whose carets sit exactly at the given prefix-closed vertex set."""
        internal = set(internal)
        internal.add(ROOT)
        leaves = [c for v in internal for c in params.children(v) if c not in internal]
        return cls(params, tuple(sorted(leaves, key=shortlex)), True)

    @classmethod
    def root_caret(cls, params: TreeParams) -> "CompleteTree":
        return cls.from_internal(params, ())

    @cached_property
    def internal(self) -> frozenset[Address]:
        out = {ROOT}
        for leaf in self.leaves:
            out.update(proper_prefixes(leaf))
        return frozenset(out)

    @cached_property
    def leaf_set(self) -> frozenset[Address]:
        return frozenset(self.leaves)

    @property
    def n_carets(self) -> int:
        return len(self.internal)

    def __len__(self) -> int:
        return len(self.leaves)

    def __contains__(self, v: Address) -> bool:
        return v in self.internal or v in self.leaf_set

    def leaf_above(self, w: Address) -> Address | None:
        """The leaf that is a prefix of ``w``, if any."""
        for i in range(1, len(w) + 1):
            if w[:i] in self.leaf_set:
                return w[:i]
        return None

    def expand(self, v: Address) -> "CompleteTree":
        """Add the caret at leaf ``v``."""
        if v not in self.leaf_set:
            raise ValueError(f"{format_address(v)!r} is not a leaf")
        return CompleteTree.from_internal(self.params, self.internal | {v})

    def to_text(self) -> str:
        return " ".join(format_address(a) for a in self.leaves)

    def __str__(self) -> str:
        return "{" + ",".join(format_address(a) for a in self.leaves) + "}"


def _completeness_problem(leaves: list[Address], params: TreeParams) -> str | None:
    for a in leaves:
        params.check_address(a)
        if not a:
            return "the root cannot be a leaf"
    leaf_set = set(leaves)
    if len(leaf_set) != len(leaves):
        return "not an antichain (duplicate leaf)"
    internal = {ROOT}
    for a in leaves:
        internal.update(proper_prefixes(a))
    if leaf_set & internal:
        return "not an antichain (a leaf lies above another leaf)"
    for v in internal:
        for c in params.children(v):
            if c not in internal and c not in leaf_set:
                return f"incomplete tree: vertex {format_address(v)!r} is missing child {format_address(c)!r}"
    return None


def is_complete(leaves: Iterable[Address], params: TreeParams) -> bool:
    """Whether the antichain is the leaf set of a complete subtree containing the root caret.

    Raises FormatError for digits out of range.
    """
    leaves = list(leaves)
    for a in leaves:
        params.check_address(a)
    return _completeness_problem(leaves, params) is None


def _same_params(a, b) -> None:
    if a.params != b.params:
        raise ParamsMismatch(f"parameter mismatch: {a.params} vs {b.params}")


def union(a: CompleteTree, b: CompleteTree) -> CompleteTree:
    """Smallest complete tree containing both."""
    _same_params(a, b)
    return CompleteTree.from_internal(a.params, a.internal | b.internal)


@dataclass(frozen=True)
class Component:
    """A maximal subtree of a caret difference: its root and its leaves."""

    root: Address
    leaves: tuple[Address, ...]

    @property
    def n_carets(self) -> int:
        inner = {self.root}
        for leaf in self.leaves:
            inner.update(leaf[:i] for i in range(len(self.root), len(leaf)))
        return len(inner)

    def suffixes(self) -> tuple[Address, ...]:
        n = len(self.root)
        return tuple(leaf[n:] for leaf in self.leaves)

    def moved_to(self, root: Address) -> "Component":
        return Component(root, tuple(root + s for s in self.suffixes()))


def subtract(a: CompleteTree, b: CompleteTree) -> list[Component]:
    """Caret difference ``a \\ b`` split into its maximal subtrees, shortlex by root."""
    _same_params(a, b)
    extra = a.internal - b.internal
    roots = sorted((v for v in extra if v[:-1] not in extra), key=shortlex)
    return [
        Component(r, tuple(leaf for leaf in a.leaves if is_strict_prefix(r, leaf)))
        for r in roots
    ]


@dataclass(frozen=True)
class ClopenSet:
    """Finite disjoint union of boundary balls, normalized to a unique antichain."""

    params: TreeParams
    balls: tuple[Address, ...]

    @classmethod
    def from_balls(cls, params: TreeParams, balls: Iterable[Address]) -> "ClopenSet":
        return cls(params, _normalize_balls(params, balls))

    @classmethod
    def empty(cls, params: TreeParams) -> "ClopenSet":
        return cls(params, ())

    @classmethod
    def full(cls, params: TreeParams) -> "ClopenSet":
        return cls(params, tuple(params.children(ROOT)))

    @property
    def is_empty(self) -> bool:
        return not self.balls

    @property
    def is_full(self) -> bool:
        return self.balls == tuple(self.params.children(ROOT))

    def complement(self) -> "ClopenSet":
        internal = {ROOT}
        for b in self.balls:
            internal.update(proper_prefixes(b))
        present = set(self.balls)
        rest = [c for v in internal for c in self.params.children(v)
                if c not in internal and c not in present]
        return ClopenSet.from_balls(self.params, rest)

    def contains_ball(self, v: Address) -> bool:
        return any(is_prefix(b, v) for b in self.balls)

    def ball_count_residue(self) -> int:
        return ball_count_residue(self)

    def to_text(self) -> str:
        return " ".join(format_address(b) for b in self.balls)


def _normalize_balls(params: TreeParams, balls: Iterable[Address]) -> tuple[Address, ...]:
    current = set()
    for b in balls:
        params.check_address(b)
        if not b:
            raise FormatError("the root is not a ball")
        current.add(b)
    # drop balls contained in others
    current = {b for b in current if not any(b[:i] in current for i in range(1, len(b)))}
    changed = True
    while changed:
        changed = False
        parents = {b[:-1] for b in current if len(b) >= 2}
        for p in sorted(parents, key=shortlex, reverse=True):
            kids = params.children(p)
            if all(c in current for c in kids):
                current.difference_update(kids)
                current.add(p)
                changed = True
    return tuple(sorted(current, key=shortlex))


def ball_count_residue(s: ClopenSet) -> int:
    """Number of balls in any partition of ``s``, reduced mod d-1 (always 0 when d=2)."""
    return len(s.balls) % (s.params.d - 1)

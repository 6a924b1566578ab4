"""Core value types: nodes, elementary trees, tree sets, and grammars.

A grammar here is a named collection of elementary sets. Singleton sets of
substitution-only trees give finite-state and context-free grammars, singleton
sets with auxiliary trees give TAG, and multi-member sets give MC-TAG, so one
object family covers every formalism the workbench experiments on.

Everything in this module is immutable; all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator


class NodeKind(Enum):
    INTERNAL = "internal"
    SUBSTITUTION = "substitution-slot"
    FOOT = "foot"
    TERMINAL = "terminal-leaf"
    EPSILON = "epsilon-leaf"


class Constraint(Enum):
    """Adjunction constraint on an internal node."""

    ALLOWED = "allowed"
    NA = "na"  # null adjunction: nothing may adjoin here
    OA = "oa"  # obligatory adjunction: incomplete until something adjoins


class TreeClass(Enum):
    INITIAL = "initial"
    AUXILIARY = "auxiliary"


#: Gorn address: 1-based child indices from the root; `()` is the root itself.
Gorn = tuple[int, ...]

ROOT_ADDRESS: Gorn = ()

#: Characters that may not occur in tokens or node labels. `#` is claimed by
#: line comments in the grammar file format.
RESERVED_CHARS = frozenset("()!*@'#")

EPSILON_LABEL = "eps"


def format_gorn(address: Gorn) -> str:
    """Render an address as `e` for the root, else dot-joined indices."""
    return "e" if not address else ".".join(str(i) for i in address)


def parse_gorn(text: str) -> Gorn:
    if text == "e":
        return ()
    try:
        parts = tuple(int(p) for p in text.split("."))
    except ValueError:
        raise ValueError(f"bad Gorn address {text!r}") from None
    if any(i < 1 for i in parts):
        raise ValueError(f"Gorn address indices are 1-based: {text!r}")
    return parts


def check_symbol(text: str, what: str = "symbol") -> str:
    """Validate a token or node label; returns it unchanged."""
    if not text:
        raise ValueError(f"{what} must be a nonempty string")
    bad = sorted({c for c in text if c in RESERVED_CHARS or c.isspace()})
    if bad:
        raise ValueError(f"{what} {text!r} contains reserved characters: {bad}")
    return text


@dataclass(frozen=True)
class TreeNode:
    """One node of an elementary tree.

    Terminal leaves carry a token; every other kind carries a node label.
    Adjunction constraints attach only to internal nodes.
    """

    label: str
    kind: NodeKind
    constraint: Constraint = Constraint.ALLOWED
    children: tuple["TreeNode", ...] = ()

    def __post_init__(self) -> None:
        if self.kind is NodeKind.EPSILON:
            object.__setattr__(self, "label", EPSILON_LABEL)
        else:
            check_symbol(self.label, "token" if self.kind is NodeKind.TERMINAL else "label")
            if self.label == EPSILON_LABEL:
                raise ValueError(f"label {EPSILON_LABEL!r} is reserved for epsilon leaves")
        if self.kind is NodeKind.INTERNAL:
            if not self.children:
                raise ValueError(f"internal node {self.label!r} needs at least one child")
        elif self.children:
            raise ValueError(f"{self.kind.value} node {self.label!r} cannot have children")
        if self.constraint is not Constraint.ALLOWED and self.kind is not NodeKind.INTERNAL:
            raise ValueError("adjunction constraints attach only to internal nodes")

    def child(self, index: int) -> "TreeNode":
        """1-based child access (Gorn convention)."""
        if not 1 <= index <= len(self.children):
            raise KeyError(index)
        return self.children[index - 1]


def internal(
    label: str, *children: TreeNode, constraint: Constraint = Constraint.ALLOWED
) -> TreeNode:
    return TreeNode(label, NodeKind.INTERNAL, constraint, tuple(children))


def slot(label: str) -> TreeNode:
    return TreeNode(label, NodeKind.SUBSTITUTION)


def foot(label: str) -> TreeNode:
    return TreeNode(label, NodeKind.FOOT)


def terminal(token: str) -> TreeNode:
    return TreeNode(token, NodeKind.TERMINAL)


def epsilon() -> TreeNode:
    return TreeNode(EPSILON_LABEL, NodeKind.EPSILON)


@dataclass(frozen=True)
class ElementaryTree:
    """A named initial or auxiliary tree."""

    name: str
    tree_class: TreeClass
    root: TreeNode

    def __post_init__(self) -> None:
        check_symbol(self.name, "tree name")

    @property
    def is_auxiliary(self) -> bool:
        return self.tree_class is TreeClass.AUXILIARY

    def walk(self) -> Iterator[tuple[Gorn, TreeNode]]:
        """Preorder traversal as (address, node) pairs."""
        return _walk(self.root, ())

    def foot_address(self) -> Gorn | None:
        for address, node in self.walk():
            if node.kind is NodeKind.FOOT:
                return address
        return None


def _walk(node, address: Gorn) -> Iterator[tuple[Gorn, "TreeNode"]]:
    yield address, node
    for i, child in enumerate(node.children, start=1):
        yield from _walk(child, address + (i,))


@dataclass(frozen=True)
class ElementarySet:
    """An ordered set of elementary trees that compose in one derivation step.

    The optional anchor names the terminal the set is lexically built around;
    it must occur as a terminal leaf in at least one component.
    """

    name: str
    components: tuple[ElementaryTree, ...]
    anchor: str | None = None

    def __post_init__(self) -> None:
        check_symbol(self.name, "set name")
        if not self.components:
            raise ValueError(f"set {self.name!r} must have at least one component")
        if self.anchor is not None:
            check_symbol(self.anchor, "anchor token")

    @property
    def is_singleton(self) -> bool:
        return len(self.components) == 1

    def component_named(self, name: str) -> ElementaryTree:
        for component in self.components:
            if component.name == name:
                return component
        raise KeyError(f"set {self.name!r} has no component {name!r}")

    def terminal_tokens(self) -> list[str]:
        return [
            node.label
            for component in self.components
            for _, node in component.walk()
            if node.kind is NodeKind.TERMINAL
        ]


@dataclass(frozen=True)
class Grammar:
    name: str
    start: str
    sets: tuple[ElementarySet, ...]
    _by_name: dict = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self) -> None:
        check_symbol(self.name, "grammar name")
        check_symbol(self.start, "start symbol")
        object.__setattr__(self, "_by_name", {s.name: s for s in self.sets})

    def set_named(self, name: str) -> ElementarySet:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"grammar {self.name!r} has no set {name!r}") from None

    @property
    def substitution_only(self) -> bool:
        """True when no component anywhere is an auxiliary tree."""
        return all(not c.is_auxiliary for s in self.sets for c in s.components)

    @property
    def lexicalized(self) -> bool:
        """True when every set contains at least one terminal leaf."""
        return all(s.terminal_tokens() for s in self.sets)


# ---------------------------------------------------------------------------
# Addressing and yields. These accept anything tree-shaped: an ElementaryTree,
# a DerivedTree, or a bare node.


def _root_of(t):
    return t.root if hasattr(t, "root") else t


def node_at(t, address: Gorn):
    """The node of `t` at `address`; the empty address is the root."""
    node = _root_of(t)
    for depth, index in enumerate(address):
        if not 1 <= index <= len(node.children):
            raise KeyError(
                f"address {format_gorn(address)} out of range at {format_gorn(address[:depth])}"
            )
        node = node.children[index - 1]
    return node


def addresses_of(t) -> list[tuple[Gorn, NodeKind]]:
    """Preorder list of (address, kind) covering every node exactly once."""
    return [(address, node.kind) for address, node in _walk(_root_of(t), ())]


def yield_of(t) -> tuple[str, ...]:
    """Left-to-right terminal tokens of the frontier.

    Epsilon leaves, unfilled substitution slots, and foot nodes contribute
    nothing, so incomplete trees have partial yields.
    """
    out: list[str] = []
    _collect_yield(_root_of(t), out)
    return tuple(out)


def _collect_yield(node, out: list[str]) -> None:
    if node.kind is NodeKind.TERMINAL:
        out.append(node.label)
    elif node.kind is NodeKind.INTERNAL:
        for child in node.children:
            _collect_yield(child, out)


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    """One invariant violation, located as precisely as the check allows."""

    set_name: str | None
    component: str | None
    address: Gorn | None
    message: str

    def __str__(self) -> str:
        where = []
        if self.set_name is not None:
            where.append(f"set {self.set_name}")
        if self.component is not None:
            where.append(f"component {self.component}")
        if self.address is not None:
            where.append(f"at {format_gorn(self.address)}")
        prefix = ", ".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message


def tree_violations(tree: ElementaryTree) -> list[tuple[Gorn | None, str]]:
    """Invariant checks for a single elementary tree."""
    problems: list[tuple[Gorn | None, str]] = []
    if tree.root.kind is not NodeKind.INTERNAL:
        problems.append((ROOT_ADDRESS, "root node must be internal"))
        return problems
    feet = [a for a, n in tree.walk() if n.kind is NodeKind.FOOT]
    if tree.tree_class is TreeClass.INITIAL:
        for a in feet:
            problems.append((a, "foot node in initial tree"))
    else:
        if not feet:
            problems.append((None, "auxiliary tree has no foot node"))
        elif len(feet) > 1:
            problems.append((feet[1], "auxiliary tree has multiple foot nodes"))
        else:
            foot_node = node_at(tree, feet[0])
            if foot_node.label != tree.root.label:
                problems.append(
                    (feet[0], f"foot label {foot_node.label!r} differs from root label {tree.root.label!r}")
                )
    return problems


def validate_grammar(grammar: Grammar) -> list[Violation]:
    """All invariant violations of `grammar`; empty iff the grammar is valid.

    Violations are data, not errors: callers that require validity (such as
    the grammar file parser) raise on a nonempty result.
    """
    violations: list[Violation] = []
    seen_sets: set[str] = set()
    for es in grammar.sets:
        if es.name in seen_sets:
            violations.append(Violation(es.name, None, None, "duplicate set name"))
        seen_sets.add(es.name)
        seen_components: set[str] = set()
        for component in es.components:
            if component.name in seen_components:
                violations.append(
                    Violation(es.name, component.name, None, "duplicate component name")
                )
            seen_components.add(component.name)
            for address, message in tree_violations(component):
                violations.append(Violation(es.name, component.name, address, message))
        if es.anchor is not None and es.anchor not in es.terminal_tokens():
            violations.append(
                Violation(es.name, None, None, f"anchor {es.anchor!r} absent from components")
            )
    if not any(
        es.is_singleton
        and es.components[0].tree_class is TreeClass.INITIAL
        and es.components[0].root.label == grammar.start
        for es in grammar.sets
    ):
        violations.append(
            Violation(
                None, None, None,
                f"no singleton initial set rooted in start symbol {grammar.start!r}",
            )
        )
    return violations

"""Substitution, adjunction, and tree-local multi-component attachment.

Derivations are recorded as trees over *set occurrences*: the record says
which elementary set attached into which occurrence, component by component.
Tree-locality is strict: every component of an attaching set targets an
address of ONE component tree of ONE parent occurrence, and adjunction
targets are always addresses of the parent's elementary tree, even when the
derived tree has since grown there. Within an atomic attachment step the
components are applied in increasing address order, which fixes replay
determinism.

Because an occurrence names a single component instance, "all targets share
one parent occurrence" is exactly the tree-local condition; attaching two
components of one set into two different components of the same parent set
(set-locality) is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping

from .trees import (
    Constraint,
    ElementaryTree,
    Gorn,
    Grammar,
    NodeKind,
    TreeClass,
    format_gorn,
    node_at,
)


class CompositionError(ValueError):
    """A substitution, adjunction, or set attachment violated a precondition."""


class Operation(Enum):
    SUBSTITUTION = "sub"
    ADJUNCTION = "adj"


@dataclass(frozen=True)
class Occurrence:
    """One instance of one elementary tree (a component) within a derivation."""

    id: int
    set_name: str
    component_name: str


@dataclass(frozen=True)
class DNode:
    """Derived-tree node, tagged with the occurrence and elementary address it
    came from. `adjoined` records that an adjunction happened at this node."""

    label: str
    kind: NodeKind
    constraint: Constraint
    children: tuple["DNode", ...]
    origin: int
    address: Gorn
    adjoined: bool = False


@dataclass(frozen=True)
class DerivedTree:
    """A phrase-structure tree built by composition, with per-node provenance."""

    root: DNode
    occurrences: tuple[Occurrence, ...]

    def occurrence(self, occurrence_id: int) -> Occurrence:
        for occ in self.occurrences:
            if occ.id == occurrence_id:
                return occ
        raise KeyError(occurrence_id)

    @property
    def provenance(self) -> dict[DNode, Occurrence]:
        by_id = {occ.id: occ for occ in self.occurrences}
        return {node: by_id[node.origin] for _, node in _walk_derived(self.root, ())}

    @property
    def pending(self) -> tuple[tuple[Gorn, str], ...]:
        """Unfilled substitution slots and unsatisfied OA nodes, by derived address."""
        out = []
        for address, node in _walk_derived(self.root, ()):
            if node.kind is NodeKind.SUBSTITUTION:
                out.append((address, "slot"))
            elif (
                node.kind is NodeKind.INTERNAL
                and node.constraint is Constraint.OA
                and not node.adjoined
            ):
                out.append((address, "oa"))
        return tuple(out)

    @property
    def complete(self) -> bool:
        if self.pending:
            return False
        return all(n.kind is not NodeKind.FOOT for _, n in _walk_derived(self.root, ()))


def _walk_derived(node: DNode, address: Gorn) -> Iterator[tuple[Gorn, DNode]]:
    yield address, node
    for i, child in enumerate(node.children, start=1):
        yield from _walk_derived(child, address + (i,))


def is_complete(tree: DerivedTree) -> bool:
    """True iff nothing is pending and no foot node remains reachable."""
    return tree.complete


def instantiate(tree: ElementaryTree, occurrence: Occurrence) -> DerivedTree:
    """A derived tree consisting of one elementary tree instance."""

    def build(node, address: Gorn) -> DNode:
        children = tuple(
            build(child, address + (i,)) for i, child in enumerate(node.children, start=1)
        )
        return DNode(node.label, node.kind, node.constraint, children, occurrence.id, address)

    return DerivedTree(build(tree.root, ()), (occurrence,))


def _replace_at(node: DNode, address: Gorn, replacement: DNode) -> DNode:
    if not address:
        return replacement
    index = address[0]
    if not 1 <= index <= len(node.children):
        raise CompositionError(f"address {format_gorn(address)} out of range")
    children = list(node.children)
    children[index - 1] = _replace_at(children[index - 1], address[1:], replacement)
    return DNode(
        node.label, node.kind, node.constraint, tuple(children),
        node.origin, node.address, node.adjoined,
    )


def _fresh_check(host: DerivedTree, occurrence: Occurrence) -> None:
    if any(occ.id == occurrence.id for occ in host.occurrences):
        raise CompositionError(f"occurrence id {occurrence.id} already used in this derivation")


def substitute(
    host: DerivedTree, at: Gorn, tree: ElementaryTree, occurrence: Occurrence
) -> DerivedTree:
    """Replace the unfilled substitution slot at `at` with an initial tree."""
    _fresh_check(host, occurrence)
    try:
        target = node_at(host, at)
    except KeyError as exc:
        raise CompositionError(str(exc)) from None
    if target.kind is not NodeKind.SUBSTITUTION:
        raise CompositionError(
            f"substitution target at {format_gorn(at)} is {target.kind.value}, not an unfilled slot"
        )
    if tree.tree_class is not TreeClass.INITIAL:
        raise CompositionError(f"auxiliary tree {tree.name!r} cannot substitute")
    if tree.root.label != target.label:
        raise CompositionError(
            f"label mismatch: slot {target.label!r} vs tree root {tree.root.label!r}"
        )
    incoming = instantiate(tree, occurrence)
    return DerivedTree(
        _replace_at(host.root, at, incoming.root), host.occurrences + (occurrence,)
    )


def adjoin(
    host: DerivedTree, at: Gorn, aux: ElementaryTree, occurrence: Occurrence
) -> DerivedTree:
    """Splice the auxiliary tree `aux` in at the internal node at `at`.

    The subtree rooted there is excised and replanted under the incoming
    foot; the excised root keeps its identity but is marked adjoined, which
    both satisfies an OA constraint and blocks a second adjunction.
    """
    _fresh_check(host, occurrence)
    try:
        target = node_at(host, at)
    except KeyError as exc:
        raise CompositionError(str(exc)) from None
    if target.kind is not NodeKind.INTERNAL:
        raise CompositionError(
            f"adjunction target at {format_gorn(at)} is {target.kind.value}, not internal"
        )
    if target.constraint is Constraint.NA:
        raise CompositionError(f"null-adjunction violation at {format_gorn(at)}")
    if target.adjoined:
        raise CompositionError(f"double adjunction at {format_gorn(at)}")
    if aux.tree_class is not TreeClass.AUXILIARY:
        raise CompositionError(f"initial tree {aux.name!r} cannot adjoin")
    if aux.root.label != target.label:
        raise CompositionError(
            f"label mismatch: node {target.label!r} vs auxiliary root {aux.root.label!r}"
        )
    foot = aux.foot_address()
    if foot is None:
        raise CompositionError(f"auxiliary tree {aux.name!r} has no foot node")
    excised = DNode(
        target.label, target.kind, target.constraint, target.children,
        target.origin, target.address, adjoined=True,
    )
    incoming = instantiate(aux, occurrence)
    spliced = _replace_at(incoming.root, foot, excised)
    return DerivedTree(
        _replace_at(host.root, at, spliced), host.occurrences + (occurrence,)
    )


# ---------------------------------------------------------------------------
# Derivation records


@dataclass(frozen=True)
class ComponentAttachment:
    """Where one component of an attaching set went: into the elementary tree
    of parent occurrence `parent`, at elementary address `address`."""

    component: str
    occurrence: int
    parent: int
    address: Gorn
    operation: Operation


@dataclass(frozen=True)
class AttachmentEdge:
    set_name: str
    attachments: tuple[ComponentAttachment, ...]

    @property
    def parent(self) -> int:
        return self.attachments[0].parent

    @property
    def child_ids(self) -> tuple[int, ...]:
        return tuple(a.occurrence for a in self.attachments)

    @property
    def occurrence_key(self) -> int:
        """Canonical id of the set occurrence this edge introduces."""
        return min(self.child_ids)

    def sort_key(self) -> tuple[int, Gorn]:
        return (self.parent, min(a.address for a in self.attachments))

    def canonical(self) -> "AttachmentEdge":
        return AttachmentEdge(
            self.set_name, tuple(sorted(self.attachments, key=lambda a: a.address))
        )


@dataclass(frozen=True)
class DerivationTree:
    """The record of which set occurrences attached where.

    The root is a singleton initial set instance with occurrence id 0; every
    other set occurrence is introduced by exactly one edge.
    """

    root: Occurrence
    edges: tuple[AttachmentEdge, ...]

    @property
    def size(self) -> int:
        """Number of set occurrences."""
        return 1 + len(self.edges)

    def canonical(self) -> "DerivationTree":
        return DerivationTree(
            self.root,
            tuple(sorted((e.canonical() for e in self.edges), key=AttachmentEdge.sort_key)),
        )

    def occurrences(self) -> dict[int, Occurrence]:
        out = {self.root.id: self.root}
        for edge in self.edges:
            for a in edge.attachments:
                out[a.occurrence] = Occurrence(a.occurrence, edge.set_name, a.component)
        return out

    def set_occurrence_of(self, occurrence_id: int) -> tuple[int, str]:
        """(canonical id, set name) of the set occurrence containing a component."""
        if occurrence_id == self.root.id:
            return (self.root.id, self.root.set_name)
        for edge in self.edges:
            if occurrence_id in edge.child_ids:
                return (edge.occurrence_key, edge.set_name)
        raise KeyError(f"no occurrence {occurrence_id} in this derivation")

    def parent_set_occurrence(self, occurrence_key: int) -> tuple[int, str] | None:
        """Set occurrence into which the given set occurrence attached."""
        for edge in self.edges:
            if edge.occurrence_key == occurrence_key:
                return self.set_occurrence_of(edge.parent)
        return None


# ---------------------------------------------------------------------------
# Derivation state and atomic set attachment


@dataclass(frozen=True)
class DerivationState:
    """Immutable snapshot of a growing derivation."""

    grammar: Grammar
    derived: DerivedTree
    record: DerivationTree
    next_id: int
    filled_slots: frozenset[tuple[int, Gorn]] = frozenset()
    adjoined_sites: frozenset[tuple[int, Gorn]] = frozenset()


def init_state(grammar: Grammar, set_name: str) -> DerivationState:
    """Start a derivation at a singleton initial set rooted in the start symbol."""
    es = grammar.set_named(set_name)
    if not es.is_singleton:
        raise CompositionError(f"derivation root {set_name!r} must be a singleton set")
    component = es.components[0]
    if component.tree_class is not TreeClass.INITIAL:
        raise CompositionError(f"derivation root {set_name!r} must be an initial tree")
    if component.root.label != grammar.start:
        raise CompositionError(
            f"derivation root {set_name!r} is rooted in {component.root.label!r}, "
            f"not the start symbol {grammar.start!r}"
        )
    occurrence = Occurrence(0, set_name, component.name)
    return DerivationState(
        grammar=grammar,
        derived=instantiate(component, occurrence),
        record=DerivationTree(occurrence, ()),
        next_id=1,
    )


def _elementary_tree_of(grammar: Grammar, occurrence: Occurrence) -> ElementaryTree:
    return grammar.set_named(occurrence.set_name).component_named(occurrence.component_name)


def _locate(derived: DerivedTree, origin: int, address: Gorn) -> Gorn:
    """Derived address of the node instantiated from (occurrence, elementary address)."""
    for derived_address, node in _walk_derived(derived.root, ()):
        if node.origin == origin and node.address == address:
            return derived_address
    raise CompositionError(
        f"no node from occurrence {origin} at {format_gorn(address)} in the derived tree"
    )


def make_edge(
    state: DerivationState,
    set_name: str,
    parent: int,
    assignment: Mapping[str, Gorn],
) -> AttachmentEdge:
    """Build an edge with fresh occurrence ids; operations follow tree class."""
    es = state.grammar.set_named(set_name)
    attachments = []
    for offset, component in enumerate(es.components):
        if component.name not in assignment:
            raise CompositionError(
                f"attachment of set {set_name!r} must place component {component.name!r}"
            )
        attachments.append(
            ComponentAttachment(
                component=component.name,
                occurrence=state.next_id + offset,
                parent=parent,
                address=assignment[component.name],
                operation=(
                    Operation.ADJUNCTION if component.is_auxiliary else Operation.SUBSTITUTION
                ),
            )
        )
    if len(assignment) != len(es.components):
        unknown = set(assignment) - {c.name for c in es.components}
        raise CompositionError(f"set {set_name!r} has no components {sorted(unknown)}")
    return AttachmentEdge(set_name, tuple(attachments))


def attach_set(state: DerivationState, edge: AttachmentEdge) -> DerivationState:
    """Compose all components of one set in a single atomic derivation step.

    Raises CompositionError (leaving `state` untouched) on any violation:
    non-local targets, occupied or mismatched sites, or operation/class
    mismatches.
    """
    grammar = state.grammar
    es = grammar.set_named(edge.set_name)

    expected = sorted(c.name for c in es.components)
    got = sorted(a.component for a in edge.attachments)
    if expected != got:
        raise CompositionError(
            f"edge must attach every component of {edge.set_name!r} exactly once "
            f"(expected {expected}, got {got})"
        )

    parents = {a.parent for a in edge.attachments}
    if len(parents) != 1:
        raise CompositionError(
            f"locality violation: components target occurrences {sorted(parents)}"
        )
    parent_id = edge.parent
    known = {occ.id for occ in state.derived.occurrences}
    if parent_id not in known:
        raise CompositionError(f"unknown parent occurrence {parent_id}")

    addresses = [a.address for a in edge.attachments]
    if len(set(addresses)) != len(addresses):
        raise CompositionError("components of one set must target pairwise distinct addresses")

    child_ids = edge.child_ids
    if len(set(child_ids)) != len(child_ids) or any(i in known for i in child_ids):
        raise CompositionError("child occurrence ids must be fresh and distinct")

    parent_tree = _elementary_tree_of(grammar, state.derived.occurrence(parent_id))

    # Validate every target against the parent's *elementary* tree first, so a
    # failing edge is rejected before any component composes (atomicity).
    for a in edge.attachments:
        component = es.component_named(a.component)
        try:
            target = node_at(parent_tree, a.address)
        except KeyError:
            raise CompositionError(
                f"no node at {format_gorn(a.address)} in elementary tree of occurrence {parent_id}"
            ) from None
        if component.is_auxiliary:
            if a.operation is not Operation.ADJUNCTION:
                raise CompositionError(f"auxiliary component {a.component!r} must adjoin")
            if target.kind is not NodeKind.INTERNAL:
                raise CompositionError(
                    f"adjunction target at {format_gorn(a.address)} is {target.kind.value}"
                )
            if target.constraint is Constraint.NA:
                raise CompositionError(f"null-adjunction violation at {format_gorn(a.address)}")
            if (parent_id, a.address) in state.adjoined_sites:
                raise CompositionError(f"double adjunction at {format_gorn(a.address)}")
        else:
            if a.operation is not Operation.SUBSTITUTION:
                raise CompositionError(f"initial component {a.component!r} must substitute")
            if target.kind is not NodeKind.SUBSTITUTION:
                raise CompositionError(
                    f"substitution target at {format_gorn(a.address)} is {target.kind.value}"
                )
            if (parent_id, a.address) in state.filled_slots:
                raise CompositionError(f"slot at {format_gorn(a.address)} already filled")
        if component.root.label != target.label:
            raise CompositionError(
                f"label mismatch at {format_gorn(a.address)}: "
                f"{target.label!r} vs component root {component.root.label!r}"
            )

    derived = state.derived
    filled = set(state.filled_slots)
    adjoined_at = set(state.adjoined_sites)
    for a in sorted(edge.attachments, key=lambda a: a.address):
        component = es.component_named(a.component)
        occurrence = Occurrence(a.occurrence, edge.set_name, a.component)
        where = _locate(derived, parent_id, a.address)
        if a.operation is Operation.SUBSTITUTION:
            derived = substitute(derived, where, component, occurrence)
            filled.add((parent_id, a.address))
        else:
            derived = adjoin(derived, where, component, occurrence)
            adjoined_at.add((parent_id, a.address))

    return DerivationState(
        grammar=grammar,
        derived=derived,
        record=DerivationTree(state.record.root, state.record.edges + (edge,)),
        next_id=max(state.next_id, max(child_ids) + 1),
        filled_slots=frozenset(filled),
        adjoined_sites=frozenset(adjoined_at),
    )


def replay(grammar: Grammar, record: DerivationTree) -> DerivedTree:
    """Rebuild the derived tree a derivation record describes.

    Deterministic and independent of edge list order: edges apply in
    canonical (parent, address) order, deferring edges whose parent has not
    composed yet. Raises CompositionError on dangling set names, corrupt
    records, or records that do not replay to a complete tree.
    """
    state = init_state(grammar, record.root.set_name)
    if record.root.id != 0:
        raise CompositionError("derivation root must have occurrence id 0")
    remaining = sorted((e.canonical() for e in record.edges), key=AttachmentEdge.sort_key)
    while remaining:
        known = {occ.id for occ in state.derived.occurrences}
        index = next((i for i, e in enumerate(remaining) if e.parent in known), None)
        if index is None:
            raise CompositionError("record corrupt: edges reference unreachable parents")
        state = attach_set(state, remaining.pop(index))
    if not state.derived.complete:
        raise CompositionError("record does not replay to a complete derived tree")
    return state.derived


# ---------------------------------------------------------------------------
# Export


def derivation_to_dot(record: DerivationTree) -> str:
    """Graphviz DOT for a derivation tree.

    Nodes are set occurrences named `<set-name>#<occurrence-id>`; each
    component contributes one edge labelled `<component-name>@<gorn>:<sub|adj>`.
    """
    record = record.canonical()

    def name(key: int, set_name: str) -> str:
        return f'"{set_name}#{key}"'

    lines = ["digraph derivation {", "  node [shape=box];"]
    lines.append(f"  {name(record.root.id, record.root.set_name)};")
    for edge in record.edges:
        lines.append(f"  {name(edge.occurrence_key, edge.set_name)};")
    for edge in record.edges:
        parent_key, parent_set = record.set_occurrence_of(edge.parent)
        for a in edge.attachments:
            label = f"{a.component}@{format_gorn(a.address)}:{a.operation.value}"
            lines.append(
                f"  {name(parent_key, parent_set)} -> "
                f"{name(edge.occurrence_key, edge.set_name)} [label=\"{label}\"];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def derivation_to_text(record: DerivationTree) -> str:
    """Compact one-line-per-edge rendering, for CLI output."""
    record = record.canonical()
    lines = [f"root {record.root.set_name}#{record.root.id}"]
    for edge in record.edges:
        parent_key, parent_set = record.set_occurrence_of(edge.parent)
        targets = ", ".join(
            f"{a.component}@{format_gorn(a.address)}:{a.operation.value}"
            for a in edge.attachments
        )
        lines.append(
            f"{edge.set_name}#{edge.occurrence_key} -> {parent_set}#{parent_key} ({targets})"
        )
    return "\n".join(lines)

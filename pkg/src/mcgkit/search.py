"""Bounded exhaustive enumeration of derivations.

The enumerator explores derivation trees, not operation sequences: attachment
sites are processed in a fixed global order (occurrence id, then elementary
address), and every multi-component attachment is created exactly once, at the
earliest site one of its components occupies. That makes the enumeration
duplicate-free by construction, so "exactly one derivation" questions are
well defined.

Budgets make the search a decision procedure. For a lexicalized grammar every
set occurrence contributes at least one terminal, so `max_sets = |s|` covers
every derivation of `s`. The bounded-depth toy grammars of interest that are
not lexicalized (the textbook CFGs, whose clause trees carry no terminal) are
still safely enumerable when they are substitution-only, epsilon-free, and
every tree has a terminal or at least two slots: a complete derivation with
yield length L then has at most 2L-1 occurrences (terminal-bearing trees are
at most L, and the others are branching, of which a tree with at most L
leaves has at most L-1).

Whenever a branch is cut by a budget even though a completion might have fit
inside `max_yield`, the result is flagged `exhausted=False`; the reports
downstream refuse to present such runs as decisions.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import inf
from typing import Callable, Iterator, NamedTuple, Sequence

from . import compose
from .compose import AttachmentEdge, ComponentAttachment, DerivationTree, Occurrence, Operation
from .trees import (
    Constraint,
    ElementaryTree,
    Gorn,
    Grammar,
    NodeKind,
    TreeClass,
    yield_of,
)


class UnsupportedGrammarError(ValueError):
    """The grammar admits no provably complete search budget."""


@dataclass(frozen=True)
class SearchBudget:
    """Bounds on one search: set occurrences per derivation, frontier length,
    and optionally the number of explored states."""

    max_sets: int
    max_yield: int
    node_budget: int | None = None

    def __post_init__(self) -> None:
        if self.max_sets < 1:
            raise ValueError("max_sets must be at least 1")
        if self.max_yield < 0:
            raise ValueError("max_yield must be nonnegative")


@dataclass(frozen=True)
class SearchResult:
    derivations: tuple[DerivationTree, ...]
    exhausted: bool


class _Site(NamedTuple):
    occ: int
    addr: Gorn
    slot: bool      # substitution slot (mandatory) vs adjoinable internal node
    label: str
    oa: bool


class _CompInfo(NamedTuple):
    name: str
    tree: ElementaryTree
    auxiliary: bool
    root_label: str
    ntokens: int
    slots: tuple[tuple[Gorn, str], ...]
    adj_sites: tuple[tuple[Gorn, str, bool], ...]


class _Tables:
    """Per-grammar precomputation shared by all searches."""

    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        self.sets = grammar.sets
        self.comp: dict[tuple[int, int], _CompInfo] = {}
        self.initial_by_label: dict[str, list[tuple[int, int]]] = {}
        self.aux_by_label: dict[str, list[tuple[int, int]]] = {}
        self.set_tokens: list[Counter] = []
        self.set_token_total: list[int] = []
        for si, es in enumerate(self.sets):
            tokens: Counter = Counter()
            for ci, component in enumerate(es.components):
                info = self._component_info(component)
                self.comp[(si, ci)] = info
                tokens.update(
                    node.label
                    for _, node in component.walk()
                    if node.kind is NodeKind.TERMINAL
                )
                key = self.aux_by_label if info.auxiliary else self.initial_by_label
                key.setdefault(info.root_label, []).append((si, ci))
            self.set_tokens.append(tokens)
            self.set_token_total.append(sum(tokens.values()))
        self._fixpoint_minimums()

    @staticmethod
    def _component_info(component: ElementaryTree) -> _CompInfo:
        slots = []
        adj = []
        ntokens = 0
        for address, node in component.walk():
            if node.kind is NodeKind.SUBSTITUTION:
                slots.append((address, node.label))
            elif node.kind is NodeKind.TERMINAL:
                ntokens += 1
            elif node.kind is NodeKind.INTERNAL and node.constraint is not Constraint.NA:
                adj.append((address, node.label, node.constraint is Constraint.OA))
        return _CompInfo(
            name=component.name,
            tree=component,
            auxiliary=component.is_auxiliary,
            root_label=component.root.label,
            ntokens=ntokens,
            slots=tuple(slots),
            adj_sites=tuple(adj),
        )

    def _fixpoint_minimums(self) -> None:
        # Least token counts needed to complete a slot / an obligatory
        # adjunction of a given label. Component-local: siblings of the
        # completing component serve other sites, so leaving them out keeps
        # the bound sound.
        self.min_slot: dict[str, float] = {}
        self.min_adj: dict[str, float] = {}

        def cost(info: _CompInfo) -> float:
            total: float = info.ntokens
            for _, label in info.slots:
                total += self.min_slot.get(label, inf)
            for _, label, oa in info.adj_sites:
                if oa:
                    total += self.min_adj.get(label, inf)
            return total

        changed = True
        while changed:
            changed = False
            for (si, ci), info in self.comp.items():
                table = self.min_adj if info.auxiliary else self.min_slot
                value = cost(info)
                if value < table.get(info.root_label, inf):
                    table[info.root_label] = value
                    changed = True

        self.attach_cost: list[float] = [
            sum(cost(self.comp[(si, ci)]) for ci in range(len(es.components)))
            for si, es in enumerate(self.sets)
        ]

    def sites_for(self, si: int, ci: int, occurrence_id: int) -> list[_Site]:
        info = self.comp[(si, ci)]
        sites = [_Site(occurrence_id, a, True, label, False) for a, label in info.slots]
        for a, label, oa in info.adj_sites:
            if oa or label in self.aux_by_label:
                sites.append(_Site(occurrence_id, a, False, label, oa))
        sites.sort(key=lambda s: s.addr)
        return sites

    def mandatory_minimum(self, sites) -> float:
        total = 0.0
        for site in sites:
            if site.slot:
                total += self.min_slot.get(site.label, inf)
            elif site.oa:
                total += self.min_adj.get(site.label, inf)
        return total


class _State(NamedTuple):
    derived: compose.DerivedTree
    edges: tuple[AttachmentEdge, ...]
    agenda: tuple[_Site, ...]
    used: int
    next_id: int
    committed: tuple[str, ...]


class _Frontier(NamedTuple):
    committed: tuple[str, ...]
    inserts: tuple[int, ...]  # token positions where future material can appear


class _Enumerator:
    def __init__(self, grammar: Grammar, budget: SearchBudget, target: Sequence[str] | None):
        self.tables = _Tables(grammar)
        self.grammar = grammar
        self.budget = budget
        self.target = tuple(target) if target is not None else None
        self.target_counts = Counter(self.target) if self.target is not None else None
        self.covered = True
        self.explored = 0

    # -- frontier analysis ---------------------------------------------------

    def _frontier(self, state_derived, agenda, used) -> _Frontier:
        open_sites = {(s.occ, s.addr) for s in agenda if not s.slot}
        budget_open = used < self.budget.max_sets
        open_labels: dict[str, bool] = {}

        def label_open(label: str) -> bool:
            if not budget_open:
                return False
            cached = open_labels.get(label)
            if cached is not None:
                return cached
            result = False
            for si, _ in self.tables.aux_by_label.get(label, ()):
                if self.remaining is None or self.tables.set_tokens[si] <= self.remaining:
                    result = True
                    break
            open_labels[label] = result
            return result

        committed: list[str] = []
        inserts: list[int] = []

        def walk(node) -> None:
            if node.kind is NodeKind.TERMINAL:
                committed.append(node.label)
            elif node.kind is NodeKind.SUBSTITUTION:
                inserts.append(len(committed))
            elif node.kind is NodeKind.INTERNAL:
                openable = (
                    not node.adjoined
                    and node.constraint is not Constraint.NA
                    and (node.origin, node.address) in open_sites
                    and label_open(node.label)
                )
                if openable:
                    inserts.append(len(committed))
                for child in node.children:
                    walk(child)
                if openable:
                    inserts.append(len(committed))
            elif node.kind is NodeKind.FOOT:
                # Feet only occur transiently while a component instance is
                # being spliced; treat as opaque.
                inserts.append(len(committed))

        walk(state_derived.root)
        return _Frontier(tuple(committed), tuple(inserts))

    def _admissible(self, state: _State) -> bool:
        """Sound pruning: returns False only for states none of whose
        completions can satisfy the query."""
        committed = state.committed
        minimum = self.tables.mandatory_minimum(state.agenda)
        if len(committed) + minimum > self.budget.max_yield:
            return False
        if self.target is None:
            return True
        target = self.target
        if len(committed) + minimum > len(target):
            return False
        self.remaining = self.target_counts - Counter(committed)
        if sum(self.remaining.values()) != len(target) - len(committed):
            return False  # some committed token is not available in the target
        frontier = self._frontier(state.derived, state.agenda, state.used)
        inserts = frontier.inserts
        first = min(inserts, default=len(committed))
        if committed[:first] != target[:first]:
            return False
        last = max(inserts, default=0)
        tail = len(committed) - last
        if tail > len(target) or (tail and committed[last:] != target[len(target) - tail:]):
            return False
        # committed tokens must embed into the target in order
        pos = 0
        for token in committed:
            pos = _find(target, token, pos)
            if pos < 0:
                return False
            pos += 1
        return True

    # -- enumeration -----------------------------------------------------------

    def run(self) -> Iterator[DerivationTree]:
        self.remaining = self.target_counts
        for si, es in enumerate(self.tables.sets):
            if not es.is_singleton:
                continue
            component = es.components[0]
            if component.tree_class is not TreeClass.INITIAL:
                continue
            if component.root.label != self.grammar.start:
                continue
            if self.target_counts is not None and not (
                self.tables.set_tokens[si] <= self.target_counts
            ):
                continue
            occurrence = Occurrence(0, es.name, component.name)
            derived = compose.instantiate(component, occurrence)
            state = _State(
                derived=derived,
                edges=(),
                agenda=tuple(self.tables.sites_for(si, 0, 0)),
                used=1,
                next_id=1,
                committed=yield_of(derived),
            )
            if self._admissible(state):
                yield from self._expand(state, DerivationTree(occurrence, ()))

    def _expand(self, state: _State, root_record: DerivationTree) -> Iterator[DerivationTree]:
        if self.budget.node_budget is not None:
            self.explored += 1
            if self.explored > self.budget.node_budget:
                self.covered = False
                return
        if not state.agenda:
            if self.target is None or state.committed == self.target:
                yield DerivationTree(root_record.root, state.edges)
            return

        site = state.agenda[0]
        rest = state.agenda[1:]

        if not site.slot and not site.oa:
            yield from self._expand(state._replace(agenda=rest), root_record)

        by_label = self.tables.initial_by_label if site.slot else self.tables.aux_by_label
        remaining = (
            self.target_counts - Counter(state.committed)
            if self.target_counts is not None
            else None
        )
        for si, ci in by_label.get(site.label, ()):
            if remaining is not None and not (self.tables.set_tokens[si] <= remaining):
                continue
            if state.used >= self.budget.max_sets:
                self._note_denied(state, rest, si)
                continue
            es = self.tables.sets[si]
            others = [cj for cj in range(len(es.components)) if cj != ci]
            for assignment in self._assignments(others, rest, site, si):
                new_state = self._apply(state, site, rest, si, ci, assignment)
                if new_state is not None and self._admissible(new_state):
                    yield from self._expand(new_state, root_record)

    def _note_denied(self, state: _State, rest: tuple[_Site, ...], si: int) -> None:
        # A set budget denial only threatens exhaustiveness if the denied
        # attachment could have led to a completion within max_yield.
        lower = len(state.committed) + max(
            self.tables.attach_cost[si], self.tables.mandatory_minimum(rest)
        )
        if lower <= self.budget.max_yield:
            self.covered = False

    def _assignments(
        self, others: list[int], rest: tuple[_Site, ...], site: _Site, si: int
    ) -> Iterator[dict[int, _Site]]:
        """All ways to place the remaining components of set `si` on free
        sites of the same parent occurrence, strictly after `site`."""
        if not others:
            yield {}
            return
        candidates: dict[int, list[_Site]] = {}
        for cj in others:
            info = self.tables.comp[(si, cj)]
            options = [
                s
                for s in rest
                if s.occ == site.occ
                and s.slot is (not info.auxiliary)
                and s.label == info.root_label
            ]
            if not options:
                return
            candidates[cj] = options

        def rec(index: int, taken: dict[int, _Site]) -> Iterator[dict[int, _Site]]:
            if index == len(others):
                yield dict(taken)
                return
            cj = others[index]
            for option in candidates[cj]:
                if option in taken.values():
                    continue
                taken[cj] = option
                yield from rec(index + 1, taken)
                del taken[cj]

        yield from rec(0, {})

    def _apply(
        self,
        state: _State,
        site: _Site,
        rest: tuple[_Site, ...],
        si: int,
        ci: int,
        assignment: dict[int, _Site],
    ) -> _State | None:
        es = self.tables.sets[si]
        placement: dict[int, _Site] = {ci: site, **assignment}
        attachments = []
        for cj, component in enumerate(es.components):
            where = placement[cj]
            attachments.append(
                ComponentAttachment(
                    component=component.name,
                    occurrence=state.next_id + cj,
                    parent=site.occ,
                    address=where.addr,
                    operation=(
                        Operation.ADJUNCTION if component.is_auxiliary else Operation.SUBSTITUTION
                    ),
                )
            )
        edge = AttachmentEdge(es.name, tuple(attachments))

        derived = state.derived
        try:
            for a in sorted(attachments, key=lambda a: a.address):
                cj = next(
                    j for j, c in enumerate(es.components) if c.name == a.component
                )
                component = es.components[cj]
                occurrence = Occurrence(a.occurrence, es.name, a.component)
                where = compose._locate(derived, a.parent, a.address)
                if a.operation is Operation.SUBSTITUTION:
                    derived = compose.substitute(derived, where, component, occurrence)
                else:
                    derived = compose.adjoin(derived, where, component, occurrence)
        except compose.CompositionError:
            return None

        consumed = set(assignment.values())
        agenda = [s for s in rest if s not in consumed]
        for cj in range(len(es.components)):
            agenda.extend(self.tables.sites_for(si, cj, state.next_id + cj))
        return _State(
            derived=derived,
            edges=state.edges + (edge,),
            agenda=tuple(agenda),
            used=state.used + 1,
            next_id=state.next_id + len(es.components),
            committed=yield_of(derived),
        )


def _find(haystack: tuple[str, ...], needle: str, start: int) -> int:
    for i in range(start, len(haystack)):
        if haystack[i] == needle:
            return i
    return -1


# ---------------------------------------------------------------------------
# Public operations


def iter_derivations(
    grammar: Grammar, budget: SearchBudget, target: Sequence[str] | None = None
) -> tuple[Iterator[DerivationTree], Callable[[], bool]]:
    """Lazy enumeration plus a thunk reporting coverage once drained."""
    enumerator = _Enumerator(grammar, budget, target)
    return enumerator.run(), lambda: enumerator.covered


def enumerate_derivations(
    grammar: Grammar, budget: SearchBudget, target: Sequence[str] | None = None
) -> SearchResult:
    """Every complete derivation within `budget` (whose yield is `target`,
    when given). `exhausted` is True iff the budget provably covered the
    whole space for this query."""
    iterator, covered = iter_derivations(grammar, budget, target)
    derivations = tuple(iterator)
    return SearchResult(derivations, covered())


def _is_safe_cfg(grammar: Grammar) -> bool:
    if not grammar.substitution_only:
        return False
    for es in grammar.sets:
        for component in es.components:
            slots = 0
            tokens = 0
            for _, node in component.walk():
                if node.kind is NodeKind.EPSILON:
                    return False
                if node.kind is NodeKind.SUBSTITUTION:
                    slots += 1
                elif node.kind is NodeKind.TERMINAL:
                    tokens += 1
            if tokens == 0 and slots < 2:
                return False
    return True


def _tokenless_sets_are_root_only(grammar: Grammar) -> bool:
    """True when every terminal-free set is a singleton initial tree whose
    root label is never a substitution-slot label, so it can only occur as
    the derivation root. At most one tokenless occurrence then exists per
    derivation, and max_sets = max_yield + 1 is complete."""
    slot_labels = {
        node.label
        for es in grammar.sets
        for component in es.components
        for _, node in component.walk()
        if node.kind is NodeKind.SUBSTITUTION
    }
    for es in grammar.sets:
        if es.terminal_tokens():
            continue
        if not es.is_singleton:
            return False
        component = es.components[0]
        if component.tree_class is not TreeClass.INITIAL:
            return False
        if component.root.label in slot_labels:
            return False
    return True


def complete_budget(grammar: Grammar, length: int) -> SearchBudget:
    """A budget guaranteed to cover every derivation with yield length at most
    `length`, or UnsupportedGrammarError when no such bound is known."""
    if grammar.lexicalized:
        return SearchBudget(max_sets=max(length, 1), max_yield=length)
    if _is_safe_cfg(grammar):
        return SearchBudget(max_sets=max(2 * length - 1, 1), max_yield=length)
    if _tokenless_sets_are_root_only(grammar):
        return SearchBudget(max_sets=length + 1, max_yield=length)
    raise UnsupportedGrammarError(
        f"grammar {grammar.name!r} admits no known complete search bound: it is "
        "not lexicalized, not a branching epsilon-free substitution-only "
        "grammar, and has terminal-free sets that could recur; bounded search "
        "would not be a decision procedure"
    )


def recognize(grammar: Grammar, tokens: Sequence[str]) -> tuple[bool, DerivationTree | None]:
    """Exact membership decision with a witness derivation when positive."""
    budget = complete_budget(grammar, len(tokens))
    iterator, covered = iter_derivations(grammar, budget, tokens)
    witness = next(iterator, None)
    if witness is not None:
        return True, witness
    if not covered():  # pragma: no cover - complete budgets never trip this
        raise RuntimeError("search was not exhaustive despite a complete budget")
    return False, None


def find_witness(
    grammar: Grammar,
    tokens: Sequence[str],
    predicate: Callable[[DerivationTree], bool],
) -> DerivationTree | None:
    """Some derivation of `tokens` satisfying `predicate`, or None after
    exhaustively checking every derivation of the string."""
    budget = complete_budget(grammar, len(tokens))
    iterator, covered = iter_derivations(grammar, budget, tokens)
    for derivation in iterator:
        if predicate(derivation):
            return derivation
    if not covered():  # pragma: no cover
        raise RuntimeError("search was not exhaustive despite a complete budget")
    return None


def generate_language(grammar: Grammar, max_len: int) -> list[tuple[str, ...]]:
    """All yields of complete derivations up to length `max_len`,
    deduplicated, ordered by length then lexicographically."""
    budget = complete_budget(grammar, max_len)
    iterator, covered = iter_derivations(grammar, budget, None)
    strings = {yield_of(compose.replay(grammar, d)) for d in iterator}
    if not covered():  # pragma: no cover
        raise RuntimeError("search was not exhaustive despite a complete budget")
    return sorted(strings, key=lambda s: (len(s), s))

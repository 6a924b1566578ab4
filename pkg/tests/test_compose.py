import random

import pytest

from mcgkit.compose import (
    AttachmentEdge,
    ComponentAttachment,
    CompositionError,
    DerivationTree,
    Occurrence,
    Operation,
    adjoin,
    attach_set,
    derivation_to_dot,
    derivation_to_text,
    init_state,
    instantiate,
    is_complete,
    make_edge,
    replay,
    substitute,
)
from mcgkit.grammar_io import parse_grammar
from mcgkit.search import complete_budget, enumerate_derivations
from mcgkit.trees import (
    Constraint,
    NodeKind,
    ElementaryTree,
    TreeClass,
    epsilon,
    foot,
    internal,
    slot,
    terminal,
    yield_of,
)


def _tree(name, cls, root):
    return ElementaryTree(name, cls, root)


def _instance(root, occurrence_id=0, name="host"):
    tree = _tree(name, TreeClass.INITIAL, root)
    return instantiate(tree, Occurrence(occurrence_id, name, name))


def test_substitute_basic():
    host = _instance(internal("S", slot("NP"), internal("VP", terminal("sleeps"))))
    john = _tree("john", TreeClass.INITIAL, internal("NP", terminal("John")))
    result = substitute(host, (1,), john, Occurrence(1, "john", "john"))
    assert yield_of(result) == ("John", "sleeps")
    assert is_complete(result)


def test_substitute_target_not_a_slot():
    host = _instance(internal("S", slot("NP"), internal("VP", terminal("sleeps"))))
    john = _tree("john", TreeClass.INITIAL, internal("NP", terminal("John")))
    with pytest.raises(CompositionError, match="not an unfilled slot"):
        substitute(host, (2,), john, Occurrence(1, "john", "john"))


def test_substitute_label_mismatch():
    host = _instance(internal("S", slot("NP"), internal("VP", terminal("sleeps"))))
    runs = _tree("runs", TreeClass.INITIAL, internal("VP", terminal("runs")))
    with pytest.raises(CompositionError, match="label mismatch"):
        substitute(host, (1,), runs, Occurrence(1, "runs", "runs"))


def test_substitute_rejects_auxiliary():
    host = _instance(internal("S", slot("NP"), internal("VP", terminal("sleeps"))))
    aux = _tree("aux", TreeClass.AUXILIARY, internal("NP", terminal("x"), foot("NP")))
    with pytest.raises(CompositionError, match="cannot substitute"):
        substitute(host, (1,), aux, Occurrence(1, "aux", "aux"))


def test_adjoin_basic():
    host = _instance(internal("S", terminal("a")))
    beta = _tree("beta", TreeClass.AUXILIARY, internal("S", terminal("b"), foot("S")))
    result = adjoin(host, (), beta, Occurrence(1, "beta", "beta"))
    assert yield_of(result) == ("b", "a")
    assert is_complete(result)


def test_adjoin_na_violation():
    host = _instance(internal("S", internal("S", terminal("a"), constraint=Constraint.NA)))
    beta = _tree("beta", TreeClass.AUXILIARY, internal("S", terminal("b"), foot("S")))
    with pytest.raises(CompositionError, match="null-adjunction"):
        adjoin(host, (1,), beta, Occurrence(1, "beta", "beta"))


def test_adjoin_double_adjunction():
    host = _instance(internal("S", terminal("a")))
    beta = _tree("beta", TreeClass.AUXILIARY, internal("S", terminal("b"), foot("S")))
    once = adjoin(host, (), beta, Occurrence(1, "beta", "beta"))
    # the original root now sits under the foot at derived address (2,)
    with pytest.raises(CompositionError, match="double adjunction"):
        adjoin(once, (2,), beta, Occurrence(2, "beta", "beta"))


def test_adjoin_rejects_initial():
    host = _instance(internal("S", terminal("a")))
    ini = _tree("ini", TreeClass.INITIAL, internal("S", terminal("b")))
    with pytest.raises(CompositionError, match="cannot adjoin"):
        adjoin(host, (), ini, Occurrence(1, "ini", "ini"))


def test_adjoin_satisfies_oa(anbn_oa):
    alpha = anbn_oa.set_named("alpha").components[0]
    beta = anbn_oa.set_named("beta").components[0]
    host = instantiate(alpha, Occurrence(0, "alpha", "alpha"))
    assert not is_complete(host)  # OA pending
    result = adjoin(host, (), beta, Occurrence(1, "beta", "beta"))
    assert yield_of(result) == ("a", "b")
    assert is_complete(result)


def test_is_complete_cases():
    assert is_complete(_instance(internal("S", terminal("a"))))
    assert not is_complete(_instance(internal("S", slot("NP"), terminal("v"))))
    oa = internal("S", epsilon(), constraint=Constraint.OA)
    assert not is_complete(_instance(oa))
    with_foot = instantiate(
        _tree("b", TreeClass.AUXILIARY, internal("S", terminal("b"), foot("S"))),
        Occurrence(0, "b", "b"),
    )
    assert not is_complete(with_foot)


def test_yield_splicing_substitution():
    host = _instance(internal("S", terminal("x"), slot("NP"), terminal("y")))
    np = _tree("np", TreeClass.INITIAL, internal("NP", terminal("m"), terminal("n")))
    result = substitute(host, (2,), np, Occurrence(1, "np", "np"))
    assert yield_of(result) == ("x", "m", "n", "y")


def test_yield_splicing_adjunction():
    inner = internal("S", terminal("c"), terminal("d"))
    host = _instance(internal("S", terminal("x"), inner, terminal("y")))
    beta = _tree(
        "beta", TreeClass.AUXILIARY, internal("S", terminal("L"), foot("S"), terminal("R"))
    )
    result = adjoin(host, (2,), beta, Occurrence(1, "beta", "beta"))
    # L and R wrap exactly the target subtree's span
    assert yield_of(result) == ("x", "L", "c", "d", "R", "y")


def test_provenance_partition(fig2):
    recognized = enumerate_derivations(
        fig2, complete_budget(fig2, 4), "the dog likes icecream".split()
    )
    derived = replay(fig2, recognized.derivations[0])
    provenance = derived.provenance
    # every node has exactly one provenance entry; in a complete derivation an
    # occurrence owns its elementary nodes minus its filled slots (and minus
    # the foot, which the excised host subtree replaced)
    by_occ = {}
    for node, occ in provenance.items():
        by_occ.setdefault(occ.id, 0)
        by_occ[occ.id] += 1
    assert sum(by_occ.values()) == len(provenance)
    for occ in derived.occurrences:
        component = fig2.set_named(occ.set_name).component_named(occ.component_name)
        nodes = list(component.walk())
        slots = sum(1 for _, n in nodes if n.kind is NodeKind.SUBSTITUTION)
        feet = sum(1 for _, n in nodes if n.kind is NodeKind.FOOT)
        assert by_occ[occ.id] == len(nodes) - slots - feet


# -- attach_set ---------------------------------------------------------------


def test_attach_set_singleton_equals_substitute(fig2):
    state = init_state(fig2, "s")
    edge = make_edge(state, "np1", 0, {"np1": (1,)})
    new = attach_set(state, edge)
    assert yield_of(new.derived) == ()
    assert new.record.edges == (edge,)
    # the original state is untouched
    assert state.record.edges == ()


def test_attach_set_multi_component(scrambling4):
    state = init_state(scrambling4, "m_v1")
    edge = make_edge(state, "front_v2", 0, {"arg": (), "vrb": (1, 2)})
    new = attach_set(state, edge)
    assert yield_of(new.derived) == ("v2", "v1")
    assert len(new.record.edges) == 1
    assert new.record.edges[0].child_ids == (1, 2)


def test_attach_set_locality_violation(scrambling4):
    state = init_state(scrambling4, "m_v1")
    state = attach_set(state, make_edge(state, "wrap_v2", 0, {"wrap_v2": (1, 2)}))
    bad = AttachmentEdge(
        "front_v3",
        (
            ComponentAttachment("arg", 2, 0, (), Operation.ADJUNCTION),
            ComponentAttachment("vrb", 3, 1, (2,), Operation.ADJUNCTION),
        ),
    )
    with pytest.raises(CompositionError, match="locality violation"):
        attach_set(state, bad)


def test_attach_set_duplicate_addresses(scrambling4):
    state = init_state(scrambling4, "m_v1")
    bad = AttachmentEdge(
        "front_v2",
        (
            ComponentAttachment("arg", 1, 0, (), Operation.ADJUNCTION),
            ComponentAttachment("vrb", 2, 0, (), Operation.ADJUNCTION),
        ),
    )
    with pytest.raises(CompositionError, match="pairwise distinct"):
        attach_set(state, bad)


def test_attach_set_is_atomic(scrambling4):
    state = init_state(scrambling4, "m_v1")
    # arg targets a valid periphery node, vrb targets the slot: invalid
    bad = AttachmentEdge(
        "front_v2",
        (
            ComponentAttachment("arg", 1, 0, (), Operation.ADJUNCTION),
            ComponentAttachment("vrb", 2, 0, (1, 1), Operation.ADJUNCTION),
        ),
    )
    before = state.derived
    with pytest.raises(CompositionError):
        attach_set(state, bad)
    assert state.derived is before and state.record.edges == ()


def test_attach_set_must_place_every_component(scrambling4):
    state = init_state(scrambling4, "m_v1")
    bad = AttachmentEdge(
        "front_v2", (ComponentAttachment("arg", 1, 0, (), Operation.ADJUNCTION),)
    )
    with pytest.raises(CompositionError, match="every component"):
        attach_set(state, bad)
    with pytest.raises(CompositionError, match="no components"):
        make_edge(state, "front_v2", 0, {"arg": (), "vrb": (1, 2), "zzz": (1,)})


def test_attach_set_slot_already_filled(fig2):
    state = init_state(fig2, "s")
    state = attach_set(state, make_edge(state, "np2", 0, {"np2": (1,)}))
    with pytest.raises(CompositionError, match="already filled"):
        attach_set(state, make_edge(state, "np1", 0, {"np1": (1,)}))


def test_init_state_validations(fig2, scrambling4):
    with pytest.raises(CompositionError, match="rooted in"):
        init_state(fig2, "np1")
    with pytest.raises(KeyError):
        init_state(fig2, "zzz")
    with pytest.raises(CompositionError, match="singleton"):
        init_state(scrambling4, "front_v2")


# -- replay ---------------------------------------------------------------------


def _fig2_record(fig2):
    result = enumerate_derivations(fig2, complete_budget(fig2, 4), "the dog likes icecream".split())
    assert len(result.derivations) == 1
    return result.derivations[0]


def test_replay_fig2(fig2):
    record = _fig2_record(fig2)
    derived = replay(fig2, record)
    assert yield_of(derived) == ("the", "dog", "likes", "icecream")
    assert is_complete(derived)


def test_replay_empty_record():
    grammar = parse_grammar("grammar g\nstart S\ntree t initial (S 'a)")
    record = DerivationTree(Occurrence(0, "t", "t"), ())
    assert yield_of(replay(grammar, record)) == ("a",)


def test_replay_is_order_independent(fig2):
    record = _fig2_record(fig2)
    reference = replay(fig2, record)
    rng = random.Random(7)
    for _ in range(5):
        edges = list(record.edges)
        rng.shuffle(edges)
        shuffled = DerivationTree(record.root, tuple(edges))
        assert replay(fig2, shuffled) == reference


def test_replay_determinism(scrambling4):
    tokens = "n2 n1 v2 v1".split()
    result = enumerate_derivations(scrambling4, complete_budget(scrambling4, 4), tokens)
    for record in result.derivations:
        assert replay(scrambling4, record) == replay(scrambling4, record)


def test_replay_dangling_set(fig2):
    record = DerivationTree(Occurrence(0, "nope", "nope"), ())
    with pytest.raises(KeyError):
        replay(fig2, record)


def test_replay_rejects_incomplete(fig2):
    record = DerivationTree(Occurrence(0, "s", "s"), ())
    with pytest.raises(CompositionError, match="complete"):
        replay(fig2, record)


def test_replay_rejects_corrupt_parent(fig2):
    edge = AttachmentEdge(
        "np1", (ComponentAttachment("np1", 5, 99, (1,), Operation.SUBSTITUTION),)
    )
    record = DerivationTree(Occurrence(0, "s", "s"), (edge,))
    with pytest.raises(CompositionError, match="unreachable parents"):
        replay(fig2, record)


# -- export ---------------------------------------------------------------------


def test_derivation_dot_format(fig2):
    record = _fig2_record(fig2)
    dot = derivation_to_dot(record)
    assert dot.startswith("digraph derivation {")
    assert '"s#0";' in dot
    assert '"s#0" -> "np1#1" [label="np1@1:sub"];' in dot


def test_derivation_dot_multicomponent(scrambling4):
    tokens = "n2 n1 v2 v1".split()
    result = enumerate_derivations(scrambling4, complete_budget(scrambling4, 4), tokens)
    record = next(d for d in result.derivations if any(e.set_name == "front_v2" for e in d.edges))
    dot = derivation_to_dot(record)
    assert '[label="arg@' in dot and '[label="vrb@' in dot
    assert ":adj" in dot


def test_derivation_text(scrambling4):
    state = init_state(scrambling4, "m_v1")
    state = attach_set(state, make_edge(state, "wrap_v2", 0, {"wrap_v2": (1, 2)}))
    text = derivation_to_text(state.record)
    assert "root m_v1#0" in text
    assert "wrap_v2#1 -> m_v1#0 (wrap_v2@1.2:adj)" in text

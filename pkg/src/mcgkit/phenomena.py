"""Builders for the grammar fragments and sentence schemata under study.

Two families of experiments are supported. Center embedding of object
relatives ("the rat the cat chased ate the cheese") contrasts a depth-bounded
finite-state grammar against a recursive context-free one. Scrambling uses the
indexed abstraction of verb-final embedded clauses: depth d has n = d+1 verbs,
arguments `n1..nn` appear in some permutation, and the verbs follow innermost
first (`... vn .. v2 v1`), with `n<i>` the argument of `v<i>`.

The multi-component scrambling fragment is a reconstruction: the claim it
exists to test is asserted without an exhibited grammar, so the tree shapes
here were iterated against the derivability matrix (see the shipped
`grammars/scrambling_n4.mcg`, which must stay in sync with the builder).
Each verb contributes one argument slot; scrambled variants carry that slot
in a separate auxiliary component that attaches higher in the same host tree,
which is exactly what strict tree-locality permits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from importlib import resources

from .trees import (
    ElementarySet,
    ElementaryTree,
    Grammar,
    TreeClass,
    epsilon,
    foot,
    internal,
    slot,
    terminal,
)

ANIMALS = ("rat", "cat", "dog", "mouse", "bird", "fox", "owl")
RELATIVE_VERBS = ("chased", "saw", "feared", "bit", "heard", "smelled")

MAX_CENTER_DEPTH = 6
MAX_SCRAMBLE_VERBS = 4


def _initial(name: str, root) -> ElementarySet:
    return ElementarySet(name, (ElementaryTree(name, TreeClass.INITIAL, root),))


def _auxiliary(name: str, root) -> ElementarySet:
    return ElementarySet(name, (ElementaryTree(name, TreeClass.AUXILIARY, root),))


def build_fsg_fig1() -> Grammar:
    """The right-linear chain grammar that accepts only one sentence.

    Its derived tree is a chain of category-per-position nonterminals, which
    is the point: it recognizes the sentence but offers no constituent that
    spans `the dog`.
    """
    return Grammar(
        "fig1_fsg",
        "S",
        (
            _initial("s", internal("S", terminal("the"), slot("XP"))),
            _initial("xp", internal("XP", terminal("dog"), slot("YP"))),
            _initial("yp", internal("YP", terminal("likes"), slot("ZP"))),
            _initial("zp", internal("ZP", terminal("icecream"))),
        ),
    )


def build_cfg_fig2() -> Grammar:
    """The seven-tree context-free grammar for the same sentence, with real
    NP/VP constituents."""
    return Grammar(
        "fig2_cfg",
        "S",
        (
            _initial("s", internal("S", slot("NP"), slot("VP"))),
            _initial("vp", internal("VP", slot("V"), slot("NP"))),
            _initial("np1", internal("NP", slot("DET"), slot("N"))),
            _initial("np2", internal("NP", terminal("icecream"))),
            _initial("det", internal("DET", terminal("the"))),
            _initial("n", internal("N", terminal("dog"))),
            _initial("v", internal("V", terminal("likes"))),
        ),
    )


def center_sentence(k: int) -> tuple[str, ...]:
    """The center-embedding test sentence with k stacked object relatives.

    k=0 is `the rat ate the cheese`; each further level inserts `the <animal>`
    after the subject block and the matching relative verb before the verb
    block, giving 5 + 3k tokens.
    """
    if not 0 <= k <= MAX_CENTER_DEPTH:
        raise ValueError(f"embedding depth must be between 0 and {MAX_CENTER_DEPTH}, got {k}")
    tokens: list[str] = []
    for i in range(k + 1):
        tokens += ["the", ANIMALS[i]]
    for j in range(k, 0, -1):
        tokens.append(RELATIVE_VERBS[j - 1])
    tokens += ["ate", "the", "cheese"]
    return tuple(tokens)


def build_fsg_center_embedding(m: int) -> Grammar:
    """A finite-state grammar accepting center_sentence(k) exactly for k <= m.

    Strictly right-linear: every tree carries one terminal and at most one
    slot, and the depth bound is hardwired as distinct state nonterminals,
    which is precisely the arbitrariness the experiment is about.
    """
    if not 0 <= m <= MAX_CENTER_DEPTH:
        raise ValueError(f"m must be between 0 and {MAX_CENTER_DEPTH}, got {m}")
    sets = [_initial("start_the", internal("S", terminal("the"), slot("R1")))]
    for i in range(1, m + 2):
        sets.append(
            _initial(f"animal_{i}", internal(f"R{i}", terminal(ANIMALS[i - 1]), slot(f"D{i}")))
        )
    for i in range(1, m + 1):
        sets.append(
            _initial(f"deeper_{i}", internal(f"D{i}", terminal("the"), slot(f"R{i + 1}")))
        )
    sets.append(_initial("finish_1", internal("D1", terminal("ate"), slot("FA"))))
    for i in range(2, m + 2):
        sets.append(
            _initial(
                f"verb_{i}",
                internal(f"D{i}", terminal(RELATIVE_VERBS[i - 2]), slot(f"E{i - 2}")),
            )
        )
    for j in range(1, m):
        sets.append(
            _initial(
                f"unwind_{j}",
                internal(f"E{j}", terminal(RELATIVE_VERBS[j - 1]), slot(f"E{j - 1}")),
            )
        )
    if m >= 1:
        sets.append(_initial("unwind_0", internal("E0", terminal("ate"), slot("FA"))))
    sets.append(_initial("final_the", internal("FA", terminal("the"), slot("FB"))))
    sets.append(_initial("final_cheese", internal("FB", terminal("cheese"))))
    return Grammar(f"fsg_center_m{m}", "S", tuple(sets))


def build_cfg_center_embedding() -> Grammar:
    """The recursive CFG: one level of center embedding brings every level.

    Object relatives stack through NP -> NP RC; nothing in the grammar can
    say "stop at depth m" without adding state the formalism does not have.
    """
    sets = [
        _initial("s", internal("S", slot("NP"), slot("VP"))),
        _initial("vp", internal("VP", terminal("ate"), slot("NP"))),
        _initial("np_det", internal("NP", terminal("the"), slot("N"))),
        _initial("np_rel", internal("NP", slot("NP"), slot("RC"))),
        _initial("rc", internal("RC", slot("NP"), slot("V"))),
    ]
    for animal in ANIMALS:
        sets.append(_initial(f"n_{animal}", internal("N", terminal(animal))))
    sets.append(_initial("n_cheese", internal("N", terminal("cheese"))))
    for verb in RELATIVE_VERBS:
        sets.append(_initial(f"v_{verb}", internal("V", terminal(verb))))
    return Grammar("cfg_center", "S", tuple(sets))


# ---------------------------------------------------------------------------
# Scrambling


@dataclass(frozen=True)
class ScramblingInstance:
    """One scrambled word order: `depth` embedded clauses and a permutation of
    the n = depth+1 argument nouns."""

    depth: int
    permutation: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.depth + 1
        if self.depth < 0:
            raise ValueError("depth must be nonnegative")
        if sorted(self.permutation) != list(range(1, n + 1)):
            raise ValueError(
                f"permutation {self.permutation} is not a bijection on 1..{n}"
            )

    @property
    def tokens(self) -> tuple[str, ...]:
        return scrambling_string(self)


def scrambling_string(instance: ScramblingInstance) -> tuple[str, ...]:
    """`[n_perm(1) .. n_perm(n), v_n .. v_1]`: permuted arguments, then the
    verb cluster innermost-first."""
    n = instance.depth + 1
    nouns = [f"n{i}" for i in instance.permutation]
    verbs = [f"v{i}" for i in range(n, 0, -1)]
    return tuple(nouns + verbs)


def all_permutations(depth: int) -> list[tuple[int, ...]]:
    """Permutations of 1..depth+1 in lexicographic order."""
    return list(itertools.permutations(range(1, depth + 2)))


def build_scrambling_fragment(n_max: int) -> Grammar:
    """Tree-local MC-TAG fragment for scrambling with up to n_max verbs.

    The clause spine distinguishes two regions by category: `S` nodes form the
    left periphery above the matrix argument, `VC` nodes form the verb-cluster
    region to its right. Verbs only ever compose into the cluster; argument
    positions displaced to the left of the matrix argument can only come from
    periphery components. Sets per verb index i:

    * `m_v1` — the matrix clause, rooted in the start symbol: two periphery
      adjunction sites above its `N!` slot and two cluster sites right of it.
    * `wrap_v<i>` — in-situ embedding: argument slot, embedded material under
      the cluster foot, verb to the right.
    * `front_v<i>` — long scrambling: the argument slot sits in a periphery
      component adjoining above the matrix argument, while the verb component
      adjoins in the cluster of the *same* host tree (strict tree-locality).
    * `local_v<i>` — short scrambling within the cluster region: like front,
      but the argument component is a cluster auxiliary, so the argument
      lands right of the matrix argument, reordered against its clausemates.

    Nouns are label-homogeneous, so plain string derivability never hinges on
    which noun fills which slot; the co-occurrence constraint is what
    distinguishes the permutations. The periphery offers exactly two sites
    and only `front` components can use them, which is what makes the deeper
    scrambled orders collapse.
    """
    if not 1 <= n_max <= MAX_SCRAMBLE_VERBS:
        raise ValueError(f"n_max must be between 1 and {MAX_SCRAMBLE_VERBS}, got {n_max}")
    sets: list[ElementarySet] = []
    matrix = internal(
        "S",
        internal("S", slot("N"), internal("VC", internal("VC", epsilon()))),
        terminal("v1"),
    )
    sets.append(
        ElementarySet("m_v1", (ElementaryTree("m_v1", TreeClass.INITIAL, matrix),), anchor="v1")
    )
    for i in range(2, n_max + 1):
        verb = f"v{i}"
        wrap = internal("VC", slot("N"), internal("VC", foot("VC")), terminal(verb))
        sets.append(
            ElementarySet(
                f"wrap_{verb}",
                (ElementaryTree(f"wrap_{verb}", TreeClass.AUXILIARY, wrap),),
                anchor=verb,
            )
        )
        cluster_verb = internal("VC", foot("VC"), terminal(verb))
        front_arg = internal("S", slot("N"), foot("S"))
        sets.append(
            ElementarySet(
                f"front_{verb}",
                (
                    ElementaryTree("arg", TreeClass.AUXILIARY, front_arg),
                    ElementaryTree("vrb", TreeClass.AUXILIARY, cluster_verb),
                ),
                anchor=verb,
            )
        )
        local_arg = internal("VC", slot("N"), foot("VC"))
        sets.append(
            ElementarySet(
                f"local_{verb}",
                (
                    ElementaryTree("arg", TreeClass.AUXILIARY, local_arg),
                    ElementaryTree("vrb", TreeClass.AUXILIARY, cluster_verb),
                ),
                anchor=verb,
            )
        )
    for i in range(1, n_max + 1):
        noun = f"n{i}"
        sets.append(
            ElementarySet(
                f"alpha_{noun}",
                (ElementaryTree(f"alpha_{noun}", TreeClass.INITIAL, internal("N", terminal(noun))),),
                anchor=noun,
            )
        )
    return Grammar(f"scrambling_n{n_max}", "S", tuple(sets))


BUILTIN_BUILDERS = {
    "fig1_fsg": build_fsg_fig1,
    "fig2_cfg": build_cfg_fig2,
    "fsg_center_m1": lambda: build_fsg_center_embedding(1),
    "fsg_center_m2": lambda: build_fsg_center_embedding(2),
    "cfg_center": build_cfg_center_embedding,
    "scrambling_n4": lambda: build_scrambling_fragment(4),
}


def builtin_grammar(name: str) -> Grammar:
    try:
        builder = BUILTIN_BUILDERS[name]
    except KeyError:
        raise KeyError(
            f"unknown builtin grammar {name!r}; available: {sorted(BUILTIN_BUILDERS)}"
        ) from None
    return builder()


def shipped_grammar_text(name: str) -> str:
    """The `.mcg` file shipped for a builtin grammar (kept in sync with the
    builder by the acceptance suite)."""
    if name not in BUILTIN_BUILDERS:
        raise KeyError(
            f"unknown builtin grammar {name!r}; available: {sorted(BUILTIN_BUILDERS)}"
        )
    return resources.files("mcgkit").joinpath("grammars", f"{name}.mcg").read_text("utf-8")

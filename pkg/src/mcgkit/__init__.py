"""mcgkit: a workbench for TAG and tree-local multi-component TAG.

Parse and validate grammars, compose derived trees by substitution and
adjunction (including atomic tree-local set attachment), exhaustively
enumerate bounded derivations, and run the center-embedding and scrambling
experiments. Served over HTTP by `mcgkit.service`; `mcgkit.cli` is a thin
client.
"""

__version__ = "0.1.0"

from .compose import (
    AttachmentEdge,
    ComponentAttachment,
    CompositionError,
    DerivationState,
    DerivationTree,
    DerivedTree,
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
from .grammar_io import GrammarFormatError, parse_grammar, render_node, serialize_grammar
from .harness import (
    CooccurrenceError,
    CooccurrenceVerdict,
    DerivabilityMatrix,
    MatrixRow,
    PartialResultError,
    PropertyReport,
    center_embed_scan,
    check_cooccurrence,
    emit_report,
    scramble_matrix,
    scramble_property_report,
)
from .phenomena import (
    ScramblingInstance,
    build_cfg_center_embedding,
    build_cfg_fig2,
    build_fsg_center_embedding,
    build_fsg_fig1,
    build_scrambling_fragment,
    builtin_grammar,
    center_sentence,
    scrambling_string,
)
from .search import (
    SearchBudget,
    SearchResult,
    UnsupportedGrammarError,
    complete_budget,
    enumerate_derivations,
    find_witness,
    generate_language,
    recognize,
)
from .trees import (
    Constraint,
    ElementarySet,
    ElementaryTree,
    Grammar,
    NodeKind,
    TreeClass,
    TreeNode,
    Violation,
    addresses_of,
    format_gorn,
    node_at,
    parse_gorn,
    validate_grammar,
    yield_of,
)

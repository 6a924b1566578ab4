"""The two experiments: center embedding (property P) and scrambling
(property Q), plus the co-occurrence check and report writers.

The strong co-occurrence constraint is formalized on the derivation tree:
the set occurrence contributing argument `n<i>` must have, as its
derivation-tree parent, the set occurrence anchored by `v<i>`. That is the
standard reading of "the argument composed into its predicate's elementary
structure" and is checkable without inspecting derived phrase structure.
Index matching between `n<i>` and `v<i>` is by token-suffix convention.

Reports refuse non-exhaustive runs by default: a budget-truncated "no witness
found" must never be presented as a crash.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .compose import DerivationTree, derivation_to_dot, replay
from .phenomena import ScramblingInstance, all_permutations, center_sentence
from .search import complete_budget, enumerate_derivations, recognize
from .trees import Grammar, yield_of

MAX_MATRIX_DEPTH = 3
MAX_SCAN_DEPTH = 5

MATRIX_CSV_HEADER = (
    "depth,permutation,string,string_derivable,cooccurrence_derivable,witness_size,exhausted"
)
PROPERTY_CSV_HEADER = "grammar,property,depth,outcome,crash_depth"


class PartialResultError(RuntimeError):
    """A report over non-exhausted search results was requested without
    explicitly allowing partial data."""


class CooccurrenceError(ValueError):
    """The derivation cannot be checked against the instance at all."""


@dataclass(frozen=True)
class CooccurrenceVerdict:
    """Which verb's set each argument noun composed into.

    `parents` maps noun index i to the index j such that alpha_n<i>'s
    derivation-tree parent is the set anchored v<j> (None when the parent is
    not a verb set). ok iff j = i throughout.
    """

    parents: tuple[tuple[int, int | None], ...]

    @property
    def ok(self) -> bool:
        return all(j == i for i, j in self.parents)


def check_cooccurrence(
    grammar: Grammar, derivation: DerivationTree, instance: ScramblingInstance
) -> CooccurrenceVerdict:
    """Verdict for one complete derivation of one scrambling instance.

    Raises CooccurrenceError when the derivation's yield is not the
    instance's string or a noun occurrence is missing.
    """
    derived = replay(grammar, derivation)
    if yield_of(derived) != instance.tokens:
        raise CooccurrenceError(
            f"derivation yields {' '.join(yield_of(derived))!r}, "
            f"instance is {' '.join(instance.tokens)!r}"
        )
    occurrences = derivation.occurrences()
    parents: list[tuple[int, int | None]] = []
    for i in range(1, instance.depth + 2):
        noun = f"n{i}"
        keys = sorted(
            {
                derivation.set_occurrence_of(occurrence_id)[0]
                for occurrence_id, occ in occurrences.items()
                if grammar.set_named(occ.set_name).anchor == noun
            }
        )
        if not keys:
            raise CooccurrenceError(f"no occurrence of a set anchored {noun!r} in the derivation")
        parent = derivation.parent_set_occurrence(keys[0])
        j: int | None = None
        if parent is not None:
            anchor = grammar.set_named(parent[1]).anchor
            if anchor is not None and anchor.startswith("v") and anchor[1:].isdigit():
                j = int(anchor[1:])
        parents.append((i, j))
    return CooccurrenceVerdict(tuple(parents))


@dataclass(frozen=True)
class MatrixRow:
    permutation: tuple[int, ...]
    tokens: tuple[str, ...]
    string_derivable: bool
    cooccurrence_derivable: bool
    witness_size: int | None
    exhausted: bool
    witness: DerivationTree | None


@dataclass(frozen=True)
class DerivabilityMatrix:
    """Per-permutation derivability at one embedding depth: the headline
    experimental output for property Q."""

    grammar_name: str
    depth: int
    rows: tuple[MatrixRow, ...]

    @property
    def reportable(self) -> bool:
        return all(row.exhausted for row in self.rows)


def scramble_matrix(grammar: Grammar, depth: int) -> DerivabilityMatrix:
    """Exhaustively decide, for every permutation at `depth`, whether the
    scrambled string is derivable at all and whether some derivation also
    satisfies the co-occurrence constraint."""
    if not 0 <= depth <= MAX_MATRIX_DEPTH:
        raise ValueError(f"depth must be between 0 and {MAX_MATRIX_DEPTH}, got {depth}")
    rows = []
    for permutation in all_permutations(depth):
        instance = ScramblingInstance(depth, permutation)
        tokens = instance.tokens
        result = enumerate_derivations(grammar, complete_budget(grammar, len(tokens)), tokens)
        witness = None
        for derivation in result.derivations:
            if check_cooccurrence(grammar, derivation, instance).ok:
                witness = derivation
                break
        rows.append(
            MatrixRow(
                permutation=permutation,
                tokens=tokens,
                string_derivable=bool(result.derivations),
                cooccurrence_derivable=witness is not None,
                witness_size=witness.size if witness is not None else None,
                exhausted=result.exhausted,
                witness=witness,
            )
        )
    return DerivabilityMatrix(grammar.name, depth, tuple(rows))


@dataclass(frozen=True)
class PropertyReport:
    """Per-depth outcomes for one grammar against property P or Q, and the
    least depth at which the grammar fails (None while it keeps succeeding)."""

    grammar_name: str
    property_name: str  # "P" or "Q"
    outcomes: tuple[tuple[int, bool], ...]
    crash_depth: int | None


def _crash_depth(outcomes: list[tuple[int, bool]]) -> int | None:
    return next((depth for depth, ok in outcomes if not ok), None)


def center_embed_scan(grammar: Grammar, max_depth: int) -> PropertyReport:
    """Recognize center_sentence(k) for k = 0..max_depth (property P)."""
    if not 0 <= max_depth <= MAX_SCAN_DEPTH:
        raise ValueError(f"max_depth must be between 0 and {MAX_SCAN_DEPTH}, got {max_depth}")
    outcomes = [(k, recognize(grammar, center_sentence(k))[0]) for k in range(max_depth + 1)]
    return PropertyReport(grammar.name, "P", tuple(outcomes), _crash_depth(outcomes))


def scramble_property_report(matrices: list[DerivabilityMatrix]) -> PropertyReport:
    """Property Q outcomes from per-depth matrices: a depth succeeds when
    every permutation is co-occurrence-derivable."""
    if not matrices:
        raise ValueError("at least one matrix is required")
    names = {m.grammar_name for m in matrices}
    if len(names) > 1:
        raise ValueError(f"matrices come from different grammars: {sorted(names)}")
    outcomes = [
        (m.depth, all(r.cooccurrence_derivable for r in m.rows))
        for m in sorted(matrices, key=lambda m: m.depth)
    ]
    return PropertyReport(matrices[0].grammar_name, "Q", tuple(outcomes), _crash_depth(outcomes))


# ---------------------------------------------------------------------------
# Report emission


def _bool(value: bool) -> str:
    return "true" if value else "false"


def _perm(permutation: tuple[int, ...]) -> str:
    return "-".join(str(i) for i in permutation)


def _check_reportable(report, allow_partial: bool) -> None:
    if isinstance(report, DerivabilityMatrix) and not report.reportable and not allow_partial:
        raise PartialResultError(
            "matrix contains non-exhausted rows; pass allow_partial to report anyway"
        )


def matrix_csv(matrix: DerivabilityMatrix, allow_partial: bool = False) -> str:
    _check_reportable(matrix, allow_partial)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(MATRIX_CSV_HEADER.split(","))
    for row in matrix.rows:
        writer.writerow(
            [
                matrix.depth,
                _perm(row.permutation),
                " ".join(row.tokens),
                _bool(row.string_derivable),
                _bool(row.cooccurrence_derivable),
                "" if row.witness_size is None else row.witness_size,
                _bool(row.exhausted),
            ]
        )
    return buffer.getvalue()


def property_csv(report: PropertyReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(PROPERTY_CSV_HEADER.split(","))
    crash = "" if report.crash_depth is None else report.crash_depth
    for depth, ok in report.outcomes:
        writer.writerow([report.grammar_name, report.property_name, depth, _bool(ok), crash])
    return buffer.getvalue()


def matrix_text(matrix: DerivabilityMatrix, allow_partial: bool = False) -> str:
    _check_reportable(matrix, allow_partial)
    headers = ["perm", "string", "derivable", "cooccurrence", "witness", "exhausted"]
    body = [
        [
            _perm(row.permutation),
            " ".join(row.tokens),
            _bool(row.string_derivable),
            _bool(row.cooccurrence_derivable),
            "-" if row.witness_size is None else str(row.witness_size),
            _bool(row.exhausted),
        ]
        for row in matrix.rows
    ]
    lines = [f"{matrix.grammar_name}: scrambling from {matrix.depth} level(s) of embedding"]
    lines += _aligned(headers, body)
    return "\n".join(lines) + "\n"


def property_text(report: PropertyReport) -> str:
    headers = ["depth", "outcome"]
    body = [[str(depth), _bool(ok)] for depth, ok in report.outcomes]
    crash = "none" if report.crash_depth is None else str(report.crash_depth)
    lines = [f"{report.grammar_name}: property {report.property_name}, crash depth {crash}"]
    lines += _aligned(headers, body)
    return "\n".join(lines) + "\n"


def _aligned(headers: list[str], body: list[list[str]]) -> list[str]:
    table = [headers] + body
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    return ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table]


def witness_dots(matrix: DerivabilityMatrix, allow_partial: bool = False) -> dict[str, str]:
    """One DOT file per co-occurrence witness, keyed by a stable filename."""
    _check_reportable(matrix, allow_partial)
    return {
        f"witness_d{matrix.depth}_{_perm(row.permutation)}.dot": derivation_to_dot(row.witness)
        for row in matrix.rows
        if row.witness is not None
    }


def emit_report(report, format: str, allow_partial: bool = False):
    """Render a matrix or property report as `csv`, `text`, or (matrices
    only) `dot-witnesses`; returns file content, or a filename-to-content
    mapping for dot-witnesses."""
    if isinstance(report, DerivabilityMatrix):
        if format == "csv":
            return matrix_csv(report, allow_partial)
        if format == "text":
            return matrix_text(report, allow_partial)
        if format == "dot-witnesses":
            return witness_dots(report, allow_partial)
        raise ValueError(f"unknown format {format!r} for a derivability matrix")
    if isinstance(report, PropertyReport):
        if format == "csv":
            return property_csv(report)
        if format == "text":
            return property_text(report)
        raise ValueError(f"unknown format {format!r} for a property report")
    raise TypeError(f"cannot emit report for {type(report).__name__}")

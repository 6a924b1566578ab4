"""HTTP service exposing the workbench: stateless compute endpoints over the
core package. Grammars travel as `.mcg` text (or name a shipped builtin);
results come back as JSON, with CSV and DOT payloads embedded as strings so
clients own all file I/O.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, model_validator

from . import __version__
from .compose import DerivationTree, derivation_to_dot, derivation_to_text, replay
from .grammar_io import parse_grammar
from .harness import (
    MatrixRow,
    PartialResultError,
    center_embed_scan,
    matrix_csv,
    matrix_text,
    property_csv,
    property_text,
    scramble_matrix,
    witness_dots,
)
from .phenomena import BUILTIN_BUILDERS, builtin_grammar, shipped_grammar_text
from .search import complete_budget, enumerate_derivations, generate_language, recognize
from .trees import Grammar, format_gorn, validate_grammar, yield_of


class GrammarSource(BaseModel):
    """Either inline `.mcg` text or the name of a shipped builtin grammar."""

    text: str | None = None
    builtin: str | None = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "GrammarSource":
        if (self.text is None) == (self.builtin is None):
            raise ValueError("provide exactly one of 'text' or 'builtin'")
        return self

    def load(self) -> Grammar:
        if self.builtin is not None:
            try:
                return builtin_grammar(self.builtin)
            except KeyError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
        try:
            return parse_grammar(self.text)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=f"grammar error: {exc}") from None


class TokensMixin(BaseModel):
    tokens: list[str] | None = None
    string: str | None = None

    @model_validator(mode="after")
    def _exactly_one_form(self):
        if (self.tokens is None) == (self.string is None):
            raise ValueError("provide exactly one of 'tokens' or 'string'")
        return self

    @property
    def token_list(self) -> list[str]:
        return self.tokens if self.tokens is not None else self.string.split()


class AttachmentModel(BaseModel):
    component: str
    occurrence: int
    parent: int
    address: str
    operation: str


class EdgeModel(BaseModel):
    set_name: str
    attachments: list[AttachmentModel]


class DerivationModel(BaseModel):
    root_set: str
    root_occurrence: int
    size: int
    edges: list[EdgeModel]
    text: str
    dot: str | None = None
    derived_yield: list[str] | None = None


def _derivation_model(
    grammar: Grammar, derivation: DerivationTree, include_dot: bool = True
) -> DerivationModel:
    record = derivation.canonical()
    return DerivationModel(
        root_set=record.root.set_name,
        root_occurrence=record.root.id,
        size=record.size,
        edges=[
            EdgeModel(
                set_name=e.set_name,
                attachments=[
                    AttachmentModel(
                        component=a.component,
                        occurrence=a.occurrence,
                        parent=a.parent,
                        address=format_gorn(a.address),
                        operation=a.operation.value,
                    )
                    for a in e.attachments
                ],
            )
            for e in record.edges
        ],
        text=derivation_to_text(record),
        dot=derivation_to_dot(record) if include_dot else None,
        derived_yield=list(yield_of(replay(grammar, record))),
    )


class HealthResponse(BaseModel):
    status: str
    version: str


class GrammarListResponse(BaseModel):
    builtins: list[str]


class GrammarTextResponse(BaseModel):
    name: str
    text: str


class ValidateRequest(BaseModel):
    grammar: GrammarSource


class ValidateResponse(BaseModel):
    grammar_name: str
    violations: list[str]
    substitution_only: bool
    lexicalized: bool


class RecognizeRequest(TokensMixin):
    grammar: GrammarSource
    include_witness: bool = True


class RecognizeResponse(BaseModel):
    recognized: bool
    exhausted: bool
    witness: DerivationModel | None = None


class DeriveRequest(TokensMixin):
    grammar: GrammarSource
    include_dot: bool = True


class DeriveResponse(BaseModel):
    count: int
    exhausted: bool
    derivations: list[DerivationModel]


class GenerateRequest(BaseModel):
    grammar: GrammarSource
    max_len: int = Field(ge=0, le=20)


class GenerateResponse(BaseModel):
    strings: list[list[str]]


class MatrixRowModel(BaseModel):
    depth: int
    permutation: str
    string: str
    string_derivable: bool
    cooccurrence_derivable: bool
    witness_size: int | None
    exhausted: bool


class ScrambleMatrixRequest(BaseModel):
    grammar: GrammarSource = GrammarSource(builtin="scrambling_n4")
    depth: int = Field(ge=0, le=3)
    allow_partial: bool = False
    include_witness_dots: bool = False


class ScrambleMatrixResponse(BaseModel):
    grammar_name: str
    depth: int
    rows: list[MatrixRowModel]
    csv: str
    text: str
    witness_dots: dict[str, str] = {}


class CenterEmbedRequest(BaseModel):
    grammar: GrammarSource
    max_depth: int = Field(ge=0, le=5)


class CenterEmbedResponse(BaseModel):
    grammar_name: str
    property_name: str
    outcomes: dict[int, bool]
    crash_depth: int | None
    csv: str
    text: str


def create_app() -> FastAPI:
    app = FastAPI(
        title="mcgkit workbench",
        version=__version__,
        description="TAG / tree-local MC-TAG composition, exhaustive derivation "
        "search, and word-order experiments.",
    )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/grammars", response_model=GrammarListResponse)
    def grammars() -> GrammarListResponse:
        return GrammarListResponse(builtins=sorted(BUILTIN_BUILDERS))

    @app.get("/grammars/{name}", response_model=GrammarTextResponse)
    def grammar_text(name: str) -> GrammarTextResponse:
        try:
            text = shipped_grammar_text(name)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        return GrammarTextResponse(name=name, text=text)

    @app.post("/validate", response_model=ValidateResponse)
    def validate(request: ValidateRequest) -> ValidateResponse:
        grammar = request.grammar.load()
        return ValidateResponse(
            grammar_name=grammar.name,
            violations=[str(v) for v in validate_grammar(grammar)],
            substitution_only=grammar.substitution_only,
            lexicalized=grammar.lexicalized,
        )

    @app.post("/recognize", response_model=RecognizeResponse)
    def recognize_endpoint(request: RecognizeRequest) -> RecognizeResponse:
        grammar = request.grammar.load()
        tokens = request.token_list
        try:
            recognized, witness = recognize(grammar, tokens)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        model = None
        if recognized and request.include_witness:
            model = _derivation_model(grammar, witness)
        return RecognizeResponse(recognized=recognized, exhausted=True, witness=model)

    @app.post("/derive", response_model=DeriveResponse)
    def derive(request: DeriveRequest) -> DeriveResponse:
        grammar = request.grammar.load()
        tokens = request.token_list
        try:
            result = enumerate_derivations(grammar, complete_budget(grammar, len(tokens)), tokens)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return DeriveResponse(
            count=len(result.derivations),
            exhausted=result.exhausted,
            derivations=[
                _derivation_model(grammar, d, request.include_dot) for d in result.derivations
            ],
        )

    @app.post("/generate", response_model=GenerateResponse)
    def generate(request: GenerateRequest) -> GenerateResponse:
        grammar = request.grammar.load()
        try:
            strings = generate_language(grammar, request.max_len)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return GenerateResponse(strings=[list(s) for s in strings])

    @app.post("/scramble-matrix", response_model=ScrambleMatrixResponse)
    def scramble(request: ScrambleMatrixRequest) -> ScrambleMatrixResponse:
        grammar = request.grammar.load()
        try:
            matrix = scramble_matrix(grammar, request.depth)
            rows = [_row_model(matrix.depth, row) for row in matrix.rows]
            return ScrambleMatrixResponse(
                grammar_name=matrix.grammar_name,
                depth=matrix.depth,
                rows=rows,
                csv=matrix_csv(matrix, request.allow_partial),
                text=matrix_text(matrix, request.allow_partial),
                witness_dots=(
                    witness_dots(matrix, request.allow_partial)
                    if request.include_witness_dots
                    else {}
                ),
            )
        except PartialResultError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None

    @app.post("/center-embed", response_model=CenterEmbedResponse)
    def center_embed(request: CenterEmbedRequest) -> CenterEmbedResponse:
        grammar = request.grammar.load()
        try:
            report = center_embed_scan(grammar, request.max_depth)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return CenterEmbedResponse(
            grammar_name=report.grammar_name,
            property_name=report.property_name,
            outcomes=dict(report.outcomes),
            crash_depth=report.crash_depth,
            csv=property_csv(report),
            text=property_text(report),
        )

    return app


def _row_model(depth: int, row: MatrixRow) -> MatrixRowModel:
    return MatrixRowModel(
        depth=depth,
        permutation="-".join(str(i) for i in row.permutation),
        string=" ".join(row.tokens),
        string_derivable=row.string_derivable,
        cooccurrence_derivable=row.cooccurrence_derivable,
        witness_size=row.witness_size,
        exhausted=row.exhausted,
    )


app = create_app()

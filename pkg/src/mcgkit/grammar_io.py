"""Reading and writing the `.mcg` grammar text format.

The format is line-comment friendly (`#`) but otherwise whitespace
insensitive:

    grammar <ident>
    start <Nonterminal>

    # singleton-set sugar:
    tree <ident> initial|auxiliary <s-expr>

    # multi-component set:
    set <ident> [anchor '<token>]
      component <ident> initial|auxiliary <s-expr>
      component <ident> initial|auxiliary <s-expr>

S-expression node syntax: `(Label child ...)` for internal nodes, `Label!` for
a substitution slot, `Label*` for a foot node, `'token` for a terminal leaf,
`eps` for an epsilon leaf. Internal labels take the constraint suffixes
`@na` and `@oa`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .trees import (
    Constraint,
    ElementarySet,
    ElementaryTree,
    EPSILON_LABEL,
    Grammar,
    NodeKind,
    RESERVED_CHARS,
    TreeClass,
    TreeNode,
    tree_violations,
    format_gorn,
    validate_grammar,
)

_KEYWORDS = frozenset({"grammar", "start", "tree", "set", "component", "anchor"})
_PUNCT = frozenset("()!*@'")


class GrammarFormatError(ValueError):
    """Syntax or invariant error in grammar text, with 1-based position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Tok:
    text: str
    punct: bool
    line: int
    column: int


def _lex(text: str) -> list[_Tok]:
    tokens: list[_Tok] = []
    line, column = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            column = 1
            i += 1
        elif ch.isspace():
            column += 1
            i += 1
        elif ch == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in _PUNCT:
            tokens.append(_Tok(ch, True, line, column))
            column += 1
            i += 1
        else:
            start = i
            start_col = column
            while i < n and not text[i].isspace() and text[i] not in RESERVED_CHARS:
                i += 1
                column += 1
            tokens.append(_Tok(text[start:i], False, line, start_col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _lex(text)
        self.pos = 0

    def _fail(self, message: str, tok: _Tok | None = None):
        if tok is None:
            tok = self.tokens[self.pos] if self.pos < len(self.tokens) else None
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            column = last.column + len(last.text) if last else 1
            raise GrammarFormatError(f"unexpected end of input: {message}", line, column)
        raise GrammarFormatError(message, tok.line, tok.column)

    def peek(self) -> _Tok | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expect: str) -> _Tok:
        tok = self.peek()
        if tok is None:
            self._fail(f"expected {expect}")
        self.pos += 1
        return tok

    def word(self, expect: str) -> _Tok:
        tok = self.next(expect)
        if tok.punct:
            self._fail(f"expected {expect}, found {tok.text!r}", tok)
        return tok

    def keyword(self, kw: str) -> _Tok:
        tok = self.word(f"keyword {kw!r}")
        if tok.text != kw:
            self._fail(f"expected keyword {kw!r}, found {tok.text!r}", tok)
        return tok

    def punct(self, ch: str) -> _Tok:
        tok = self.next(f"{ch!r}")
        if not tok.punct or tok.text != ch:
            self._fail(f"expected {ch!r}, found {tok.text!r}", tok)
        return tok

    def at_punct(self, ch: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.punct and tok.text == ch

    def at_word(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and not tok.punct and tok.text == text

    # -- s-expressions ------------------------------------------------------

    def parse_node(self) -> TreeNode:
        tok = self.peek()
        if tok is None:
            self._fail("expected a tree node")
        if tok.punct and tok.text == "(":
            return self._parse_internal()
        if tok.punct and tok.text == "'":
            self.punct("'")
            word = self.word("terminal token")
            return TreeNode(word.text, NodeKind.TERMINAL)
        if tok.punct:
            self._fail(f"unexpected {tok.text!r} in tree", tok)
        word = self.word("node")
        if word.text == EPSILON_LABEL:
            return TreeNode(EPSILON_LABEL, NodeKind.EPSILON)
        if self.at_punct("!"):
            self.punct("!")
            return TreeNode(word.text, NodeKind.SUBSTITUTION)
        if self.at_punct("*"):
            self.punct("*")
            return TreeNode(word.text, NodeKind.FOOT)
        self._fail(
            f"bare label {word.text!r}: leaves must be 'token, eps, Label! or Label*", word
        )

    def _parse_internal(self) -> TreeNode:
        open_tok = self.punct("(")
        label = self.word("node label")
        constraint = Constraint.ALLOWED
        if self.at_punct("@"):
            self.punct("@")
            suffix = self.word("adjunction constraint")
            try:
                constraint = Constraint(suffix.text)
            except ValueError:
                self._fail(f"unknown adjunction constraint @{suffix.text}", suffix)
            if constraint is Constraint.ALLOWED:
                self._fail(f"unknown adjunction constraint @{suffix.text}", suffix)
        # parenthesized leaf spellings: (NP!) and (S*)
        if self.at_punct("!") or self.at_punct("*"):
            marker = self.next("leaf marker")
            if constraint is not Constraint.ALLOWED:
                self._fail("adjunction constraints attach only to internal nodes", label)
            self.punct(")")
            kind = NodeKind.SUBSTITUTION if marker.text == "!" else NodeKind.FOOT
            return TreeNode(label.text, kind)
        children: list[TreeNode] = []
        while not self.at_punct(")"):
            if self.peek() is None:
                self._fail(f"unclosed '(' for node {label.text!r}", open_tok)
            children.append(self.parse_node())
        self.punct(")")
        if not children:
            self._fail(f"internal node {label.text!r} needs at least one child", open_tok)
        try:
            return TreeNode(label.text, NodeKind.INTERNAL, constraint, tuple(children))
        except ValueError as exc:
            self._fail(str(exc), label)

    # -- stanzas ------------------------------------------------------------

    def parse_tree_stanza(self, name_tok: _Tok) -> ElementaryTree:
        class_tok = self.word("tree class (initial or auxiliary)")
        try:
            tree_class = TreeClass(class_tok.text)
        except ValueError:
            self._fail(f"expected 'initial' or 'auxiliary', found {class_tok.text!r}", class_tok)
        root = self.parse_node()
        if root.kind is not NodeKind.INTERNAL:
            self._fail("tree root must be an internal node", name_tok)
        tree = ElementaryTree(name_tok.text, tree_class, root)
        for address, message in tree_violations(tree):
            where = f" (at {format_gorn(address)})" if address is not None else ""
            self._fail(f"{message}{where}", name_tok)
        return tree

    def parse_grammar(self) -> Grammar:
        self.keyword("grammar")
        name = self.word("grammar name")
        self.keyword("start")
        start = self.word("start symbol")
        sets: list[ElementarySet] = []
        names: set[str] = set()

        def add(es: ElementarySet, tok: _Tok) -> None:
            if es.name in names:
                self._fail(f"duplicate set name {es.name!r}", tok)
            names.add(es.name)
            sets.append(es)

        while (tok := self.peek()) is not None:
            if tok.punct:
                self._fail(f"expected 'tree' or 'set', found {tok.text!r}", tok)
            if tok.text == "tree":
                self.keyword("tree")
                name_tok = self.word("tree name")
                tree = self.parse_tree_stanza(name_tok)
                add(ElementarySet(name_tok.text, (tree,)), name_tok)
            elif tok.text == "set":
                self.keyword("set")
                name_tok = self.word("set name")
                anchor = None
                if self.at_word("anchor"):
                    self.keyword("anchor")
                    self.punct("'")
                    anchor = self.word("anchor token").text
                components: list[ElementaryTree] = []
                component_names: set[str] = set()
                while self.at_word("component"):
                    self.keyword("component")
                    comp_tok = self.word("component name")
                    if comp_tok.text in component_names:
                        self._fail(f"duplicate component name {comp_tok.text!r}", comp_tok)
                    component_names.add(comp_tok.text)
                    components.append(self.parse_tree_stanza(comp_tok))
                if not components:
                    self._fail(f"set {name_tok.text!r} has no components", name_tok)
                es = ElementarySet(name_tok.text, tuple(components), anchor)
                if anchor is not None and anchor not in es.terminal_tokens():
                    self._fail(f"anchor {anchor!r} absent from components", name_tok)
                add(es, name_tok)
            else:
                self._fail(f"expected 'tree' or 'set', found {tok.text!r}", tok)

        grammar = Grammar(name.text, start.text, tuple(sets))
        problems = validate_grammar(grammar)
        if problems:
            self._fail(str(problems[0]), name)
        return grammar


def parse_grammar(text: str) -> Grammar:
    """Parse grammar text, raising GrammarFormatError with line/column on any
    syntax error or invariant violation."""
    return _Parser(text).parse_grammar()


# ---------------------------------------------------------------------------
# Serialization


def render_node(node) -> str:
    """S-expression for a node; also renders derived-tree nodes."""
    kind = node.kind
    if kind is NodeKind.TERMINAL:
        return f"'{node.label}"
    if kind is NodeKind.EPSILON:
        return EPSILON_LABEL
    if kind is NodeKind.SUBSTITUTION:
        return f"{node.label}!"
    if kind is NodeKind.FOOT:
        return f"{node.label}*"
    head = node.label
    if node.constraint is not Constraint.ALLOWED:
        head += f"@{node.constraint.value}"
    inner = " ".join(render_node(child) for child in node.children)
    return f"({head} {inner})"


def serialize_grammar(grammar: Grammar) -> str:
    """Canonical text for `grammar`; parse_grammar round-trips it exactly."""
    lines = [f"grammar {grammar.name}", f"start {grammar.start}", ""]
    for es in grammar.sets:
        only = es.components[0]
        if es.is_singleton and es.anchor is None and only.name == es.name:
            lines.append(f"tree {es.name} {only.tree_class.value} {render_node(only.root)}")
        else:
            head = f"set {es.name}"
            if es.anchor is not None:
                head += f" anchor '{es.anchor}"
            lines.append(head)
            for component in es.components:
                lines.append(
                    f"  component {component.name} {component.tree_class.value} "
                    f"{render_node(component.root)}"
                )
    return "\n".join(lines) + "\n"

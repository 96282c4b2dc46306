"""Surface syntax: grammar files, queries, and descriptions.

A grammar file is a sequence of period-terminated statements.  Type
declarations introduce the hierarchy and appropriateness::

    type sign sub [word, phrase] feats [HEAD:head, GENDER:gender].

Constraints attach a description to a type::

    word => (PHON:<kleine>, HEAD:adj, GENDER:fem)
          ; (PHON:<kleiner>, HEAD:(adj, DECL:strong), GENDER:masc).

Descriptions use ``,`` for conjunction, ``;`` for disjunction (binding
looser than conjunction), ``FEAT:value`` for feature constraints, ``#n``
for tags (reentrancy), ``<a, b|Tail>`` for list sugar over the cons types
``ne_list``/``e_list``/``HD``/``TL``, parentheses for grouping, and an
AVM form ``type[FEAT value, ...]`` that the canonical printer emits, so
printed structures re-parse.  ``%`` starts a comment.  Negation is not
part of the language and is rejected with a pointed message.

Multiple constraints for one type merge into a single disjunction in
declaration order.  `to_dnf` turns any description into its list of
disjunctive-normal-form feature structures, preserving source order and
dropping inconsistent disjuncts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product

from .signature import Diagnostic, Signature, SignatureError, TypeDecl, TOP, validate
from . import tfs
from .tfs import FeatureStructure, Node, Trail, UnificationFailure, deref


class ParseError(Exception):
    """Syntax or vocabulary problem; carries structured diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class TypeLit:
    name: str
    line: int | None = None
    col: int | None = None


@dataclass(frozen=True)
class Feat:
    feature: str
    value: "Description"
    line: int | None = None
    col: int | None = None


@dataclass(frozen=True)
class Conj:
    parts: tuple["Description", ...]


@dataclass(frozen=True)
class Disj:
    parts: tuple["Description", ...]


@dataclass(frozen=True)
class Tag:
    name: str
    value: "Description | None" = None
    line: int | None = None
    col: int | None = None


@dataclass(frozen=True)
class ListLit:
    items: tuple["Description", ...]
    tail: "Description | None" = None
    line: int | None = None
    col: int | None = None


Description = TypeLit | Feat | Conj | Disj | Tag | ListLit


@dataclass(frozen=True)
class Constraint:
    type_name: str
    body: Description
    line: int | None = None


@dataclass(frozen=True)
class Theory:
    """Ordered constraints, at most one per type (bodies already merged)."""

    constraints: tuple[Constraint, ...]

    @property
    def types(self) -> tuple[str, ...]:
        return tuple(c.type_name for c in self.constraints)

    def get(self, type_name: str) -> Constraint | None:
        for c in self.constraints:
            if c.type_name == type_name:
                return c
        return None


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<arrow>=>)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<tag>\#[A-Za-z0-9_]+)
      | (?P<punct>[=:,;.()\[\]<>|~])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'ident' | 'tag' | 'arrow' | punctuation itself | 'eof'
    value: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                [Diagnostic("syntax", f"unexpected character {text[pos]!r}", (), line)]
            )
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            if kind == "punct":
                tokens.append(_Token(value, value, line, col))
            else:
                tokens.append(_Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: _Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError([Diagnostic("syntax", message, (), tok.line)])

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise self.error(f"expected {kind!r}, found {tok.value or 'end of input'!r}")
        return self.next()

    def at_ident(self, word: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and (word is None or tok.value == word)

    # -- statements ---------------------------------------------------------

    def statements(self) -> tuple[list[TypeDecl], list[Constraint]]:
        decls: list[TypeDecl] = []
        raw_constraints: list[Constraint] = []
        while self.peek().kind != "eof":
            if self.at_ident("type"):
                decls.append(self.type_decl())
            else:
                raw_constraints.append(self.constraint())
        return decls, raw_constraints

    def type_decl(self) -> TypeDecl:
        start = self.expect("ident")  # 'type'
        name = self.expect("ident")
        subs: list[str] = []
        feats: list[tuple[str, str]] = []
        if self.at_ident("sub"):
            self.next()
            self.expect("[")
            while self.peek().kind == "ident":
                subs.append(self.next().value)
                if self.peek().kind == ",":
                    self.next()
            self.expect("]")
        if self.at_ident("feats"):
            self.next()
            self.expect("[")
            while self.peek().kind == "ident":
                feat = self.next().value
                self.expect(":")
                restr = self.expect("ident").value
                feats.append((feat, restr))
                if self.peek().kind == ",":
                    self.next()
            self.expect("]")
        self.expect(".")
        return TypeDecl(name.value, tuple(subs), tuple(feats), start.line)

    def constraint(self) -> Constraint:
        name = self.expect("ident")
        self.expect("arrow")
        body = self.description()
        self.expect(".")
        return Constraint(name.value, body, name.line)

    # -- descriptions -------------------------------------------------------

    def description(self) -> Description:
        parts = [self.conjunction()]
        while self.peek().kind == ";":
            self.next()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Disj(tuple(parts))

    def conjunction(self) -> Description:
        parts = [self.term()]
        while self.peek().kind == ",":
            self.next()
            parts.append(self.term())
        return parts[0] if len(parts) == 1 else Conj(tuple(parts))

    def term(self) -> Description:
        tok = self.peek()
        if tok.kind == "~":
            raise ParseError(
                [
                    Diagnostic(
                        "negation",
                        "negation is not supported; model the complement in the "
                        "type hierarchy instead",
                        (),
                        tok.line,
                    )
                ]
            )
        if tok.kind == "(":
            self.next()
            inner = self.description()
            self.expect(")")
            return inner
        if tok.kind == "tag":
            self.next()
            name = tok.value[1:]
            if self.peek().kind in (":", "="):
                self.next()
                return Tag(name, self.term(), tok.line, tok.col)
            return Tag(name, None, tok.line, tok.col)
        if tok.kind == "<":
            return self.list_literal()
        if tok.kind == "ident":
            self.next()
            if self.peek().kind == ":":
                self.next()
                return Feat(tok.value, self.term(), tok.line, tok.col)
            if self.peek().kind == "[":
                return self.avm(tok)
            return TypeLit(tok.value, tok.line, tok.col)
        raise self.error(f"unexpected {tok.value or 'end of input'!r} in description")

    def avm(self, type_tok: _Token) -> Description:
        self.expect("[")
        parts: list[Description] = [TypeLit(type_tok.value, type_tok.line, type_tok.col)]
        while self.peek().kind == "ident":
            feat = self.next()
            value = self.term()
            parts.append(Feat(feat.value, value, feat.line, feat.col))
            if self.peek().kind == ",":
                self.next()
        self.expect("]")
        return parts[0] if len(parts) == 1 else Conj(tuple(parts))

    def list_literal(self) -> Description:
        start = self.expect("<")
        if self.peek().kind == ">":
            self.next()
            return ListLit((), None, start.line, start.col)
        items = [self.term()]
        while self.peek().kind == ",":
            self.next()
            items.append(self.term())
        tail: Description | None = None
        if self.peek().kind == "|":
            self.next()
            tail = self.term()
        self.expect(">")
        return ListLit(tuple(items), tail, start.line, start.col)


# ---------------------------------------------------------------------------
# Vocabulary checking


def _check_vocab(d: Description, sig: Signature, diags: list[Diagnostic]) -> None:
    if isinstance(d, TypeLit):
        if d.name not in sig:
            diags.append(
                Diagnostic("unknown-type", f"type {d.name} is not declared", (d.name,), d.line)
            )
    elif isinstance(d, Feat):
        if d.feature not in sig.features:
            diags.append(
                Diagnostic(
                    "unknown-feature",
                    f"feature {d.feature} is not declared",
                    (d.feature,),
                    d.line,
                )
            )
        _check_vocab(d.value, sig, diags)
    elif isinstance(d, (Conj, Disj)):
        for p in d.parts:
            _check_vocab(p, sig, diags)
    elif isinstance(d, Tag):
        if d.value is not None:
            _check_vocab(d.value, sig, diags)
    elif isinstance(d, ListLit):
        for required in (tfs.CONS, tfs.EMPTY_LIST):
            if required not in sig:
                diags.append(
                    Diagnostic(
                        "unknown-type",
                        f"list sugar needs type {required}, which is not declared",
                        (required,),
                        d.line,
                    )
                )
        for p in d.items:
            _check_vocab(p, sig, diags)
        if d.tail is not None:
            _check_vocab(d.tail, sig, diags)


# ---------------------------------------------------------------------------
# Entry points


def parse_grammar(text: str) -> tuple[Signature, Theory]:
    """Parse and validate a grammar file.

    Raises :class:`ParseError` for syntax and vocabulary problems and
    :class:`~tfse.signature.SignatureError` for hierarchy violations.
    """
    parser = _Parser(_tokenize(text))
    decls, raw = parser.statements()
    sig = validate(decls)

    diags: list[Diagnostic] = []
    merged: dict[str, list[Constraint]] = {}
    order: list[str] = []
    for c in raw:
        if c.type_name not in sig:
            diags.append(
                Diagnostic(
                    "unknown-type",
                    f"constraint on undeclared type {c.type_name}",
                    (c.type_name,),
                    c.line,
                )
            )
            continue
        _check_vocab(c.body, sig, diags)
        if c.type_name not in merged:
            merged[c.type_name] = []
            order.append(c.type_name)
        merged[c.type_name].append(c)
    if diags:
        raise ParseError(diags)

    constraints: list[Constraint] = []
    for name in order:
        group = merged[name]
        if len(group) == 1:
            constraints.append(group[0])
        else:
            constraints.append(
                Constraint(name, Disj(tuple(c.body for c in group)), group[0].line)
            )
    return sig, Theory(tuple(constraints))


def parse_query(text: str, sig: Signature) -> Description:
    """Parse a query over an existing signature's vocabulary."""
    parser = _Parser(_tokenize(text))
    d = parser.description()
    if parser.peek().kind == ".":
        parser.next()
    if parser.peek().kind != "eof":
        raise parser.error("trailing input after query")
    diags: list[Diagnostic] = []
    _check_vocab(d, sig, diags)
    if diags:
        raise ParseError(diags)
    return d


# ---------------------------------------------------------------------------
# DNF expansion


def _expand(d: Description) -> list[Description]:
    """All disjunction-free variants of d, in source order."""
    if isinstance(d, (TypeLit,)):
        return [d]
    if isinstance(d, Disj):
        return [e for p in d.parts for e in _expand(p)]
    if isinstance(d, Conj):
        combos = product(*(_expand(p) for p in d.parts))
        return [Conj(tuple(c)) for c in combos]
    if isinstance(d, Feat):
        return [Feat(d.feature, e, d.line, d.col) for e in _expand(d.value)]
    if isinstance(d, Tag):
        if d.value is None:
            return [d]
        return [Tag(d.name, e, d.line, d.col) for e in _expand(d.value)]
    if isinstance(d, ListLit):
        item_choices = [_expand(p) for p in d.items]
        tail_choices = _expand(d.tail) if d.tail is not None else [None]
        out: list[Description] = []
        for combo in product(*item_choices, tail_choices):
            *items, tail = combo
            out.append(ListLit(tuple(items), tail, d.line, d.col))
        return out
    raise TypeError(f"not a description: {d!r}")


class _Builder:
    """Turns one disjunction-free description into a raw feature structure.
    Appropriateness is enforced afterwards by typecheck_repair."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.trail = Trail()
        self.tags: dict[str, Node] = {}

    def meet_type(self, node: Node, type_name: str) -> None:
        met = self.sig.glb(node.type, type_name)
        if met is None:
            raise UnificationFailure(f"{node.type} and {type_name} clash")
        node.type = met

    def merge(self, a: Node, b: Node) -> Node:
        a = deref(a)
        b = deref(b)
        if a is not b:
            touched: list[Node] = []
            tfs._merge(a, b, self.sig, self.trail, touched)
        return deref(a)

    def apply(self, node: Node, d: Description) -> None:
        node = deref(node)
        if isinstance(d, TypeLit):
            self.meet_type(node, d.name)
        elif isinstance(d, Conj):
            for p in d.parts:
                self.apply(node, p)
        elif isinstance(d, Feat):
            node = deref(node)
            tgt = node.arcs.get(d.feature)
            if tgt is None:
                tgt = Node(TOP)
                node.arcs[d.feature] = tgt
            self.apply(tgt, d.value)
        elif isinstance(d, Tag):
            bound = self.tags.get(d.name)
            if bound is None:
                self.tags[d.name] = node
            else:
                node = self.merge(bound, node)
            if d.value is not None:
                self.apply(node, d.value)
        elif isinstance(d, ListLit):
            cur = node
            for item in d.items:
                cur = deref(cur)
                self.meet_type(cur, tfs.CONS)
                hd = cur.arcs.get(tfs.HEAD_FEAT)
                if hd is None:
                    hd = Node(TOP)
                    cur.arcs[tfs.HEAD_FEAT] = hd
                self.apply(hd, item)
                cur = deref(cur)
                tl = cur.arcs.get(tfs.TAIL_FEAT)
                if tl is None:
                    tl = Node(TOP)
                    cur.arcs[tfs.TAIL_FEAT] = tl
                cur = tl
            cur = deref(cur)
            if d.tail is None:
                self.meet_type(cur, tfs.EMPTY_LIST)
            else:
                self.apply(cur, d.tail)
        else:
            raise TypeError(f"disjunction survived expansion: {d!r}")


def to_dnf(d: Description, sig: Signature) -> list[FeatureStructure]:
    """Expand a description into well-typed feature structures, one per
    consistent disjunct, in source order.  An empty result means the
    description is unsatisfiable."""
    out: list[FeatureStructure] = []
    for pure in _expand(d):
        builder = _Builder(sig)
        root = Node(TOP)
        try:
            builder.apply(root, pure)
        except UnificationFailure:
            continue
        fs = FeatureStructure(deref(root), sig)
        repaired = tfs.typecheck_repair(fs)
        if repaired is not None:
            out.append(repaired)
    return out

"""Concrete text syntax for nre expressions, queries, and property paths.

Normative grammar (whitespace-insensitive, `#` comments to end of line):

    query   := rule (";" rule)* ;
    rule    := NAME "(" term "," term ")" ":-" atom ("," atom)* ;
    atom    := "(" term "," nre "," term ")" | NAME "(" term ("," term)* ")" ;
    term    := VAR | CONST ;            VAR := "?" IDENT ;
    nre     := alt ;  alt := seq ("|" seq)* ;  seq := star ("/" star)* ;
    star    := base "*"* ;
    base    := axis ["::" (CONST | "[" nre "]")] | "(" nre ")" ;
    axis    := ("self"|"next"|"edge"|"node") ["^-1"] ;
    CONST   := IDENT | "<" not-gt* ">" | quoted-string ;

Property paths follow SPARQL 1.1 with precedence
postfix `?`/`*`/`+`  >  `^`  >  `/`  >  `|`, and `!(...)` negated sets.

Identifiers start with a letter, digit or underscore and may continue with
`.`, `+` and `-`; anything else (spaces, colons) needs `<...>` or quotes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError, SourceSpan
from .model import (
    Alt,
    Axis,
    AxisConst,
    AxisExpr,
    AxisNest,
    Concat,
    Const,
    Nre,
    Pp,
    PpAlt,
    PpInv,
    PpIri,
    PpNegSet,
    PpOpt,
    PpPlus,
    PpSeq,
    PpStar,
    Query,
    RelAtom,
    Rule,
    Star,
    Term,
    TriplePattern,
    Var,
    validate,
)

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")
_IDENT_CONT = _IDENT_START | set(".-")
_AXIS_NAMES = ("self", "next", "edge", "node")

_PUNCT = {
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACKET",
    "]": "RBRACKET",
    ",": "COMMA",
    ";": "SEMI",
    "|": "PIPE",
    "/": "SLASH",
    "*": "STAR",
    "+": "PLUS",
    "!": "BANG",
}


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    span: SourceSpan


def _tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def span(start_i: int, start_line: int, start_col: int, end_i: int) -> SourceSpan:
        return SourceSpan(start_line, start_col, start_i, end_i)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_i, start_line, start_col = i, line, col
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, span(start_i, line, col, i + 1)))
            i += 1
            col += 1
            continue
        if ch == ":":
            if text[i : i + 2] == ":-":
                tokens.append(Token("TURNSTILE", ":-", span(start_i, line, col, i + 2)))
                i += 2
                col += 2
                continue
            if text[i : i + 2] == "::":
                tokens.append(Token("DCOLON", "::", span(start_i, line, col, i + 2)))
                i += 2
                col += 2
                continue
            raise ParseError("stray ':'", span(start_i, line, col, i + 1))
        if ch == "^":
            if text[i : i + 3] == "^-1":
                tokens.append(Token("INV", "^-1", span(start_i, line, col, i + 3)))
                i += 3
                col += 3
                continue
            tokens.append(Token("CARET", "^", span(start_i, line, col, i + 1)))
            i += 1
            col += 1
            continue
        if ch == "?":
            j = i + 1
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            if j == i + 1 or text[i + 1] not in _IDENT_START:
                tokens.append(Token("QMARK", "?", span(start_i, line, col, i + 1)))
                i += 1
                col += 1
                continue
            name = text[i + 1 : j]
            tokens.append(Token("VAR", name, span(start_i, line, col, j)))
            col += j - i
            i = j
            continue
        if ch == "<":
            j = text.find(">", i + 1)
            if j == -1:
                raise ParseError("unterminated '<...>'", span(start_i, line, col, n))
            body = text[i + 1 : j]
            if not body or any(c in "<> \t\n" for c in body):
                raise ParseError(
                    "'<...>' must be non-empty and free of whitespace",
                    span(start_i, line, col, j + 1),
                )
            tokens.append(Token("CONST", body, span(start_i, line, col, j + 1)))
            col += j + 1 - i
            i = j + 1
            continue
        if ch == '"':
            j = i + 1
            out: list[str] = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n and text[j + 1] in '"\\':
                    out.append(text[j + 1])
                    j += 2
                elif text[j] == "\n":
                    break
                else:
                    out.append(text[j])
                    j += 1
            if j >= n or text[j] != '"':
                raise ParseError("unterminated string", span(start_i, line, col, min(j, n)))
            value = "".join(out)
            if not value:
                raise ParseError("empty string constant", span(start_i, line, col, j + 1))
            tokens.append(Token("CONST", value, span(start_i, line, col, j + 1)))
            col += j + 1 - i
            i = j + 1
            continue
        if ch in _IDENT_START:
            j = i
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            tokens.append(Token("IDENT", text[i:j], span(start_i, line, col, j)))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", span(start_i, line, col, i + 1))
    tokens.append(Token("EOF", "", SourceSpan(line, col, n, n)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.current
        if tok.kind != kind:
            expected = what or kind.lower()
            found = tok.value or "end of input"
            raise ParseError(f"expected {expected}, found {found!r}", tok.span)
        return self.advance()

    def at(self, kind: str) -> bool:
        return self.current.kind == kind

    def accept(self, kind: str) -> Token | None:
        if self.at(kind):
            return self.advance()
        return None

    # --- nre -----------------------------------------------------------

    def nre(self) -> Nre:
        expr = self.nre_seq()
        while self.accept("PIPE"):
            expr = Alt(expr, self.nre_seq())
        return expr

    def nre_seq(self) -> Nre:
        expr = self.nre_star()
        while self.accept("SLASH"):
            expr = Concat(expr, self.nre_star())
        return expr

    def nre_star(self) -> Nre:
        expr = self.nre_base()
        while self.accept("STAR"):
            expr = Star(expr)
        return expr

    def nre_base(self) -> Nre:
        if self.accept("LPAREN"):
            expr = self.nre()
            self.expect("RPAREN", "')'")
            return expr
        tok = self.current
        if tok.kind != "IDENT" or tok.value not in _AXIS_NAMES:
            found = tok.value or "end of input"
            raise ParseError(
                f"expected an axis (self/next/edge/node) or '(', found {found!r}",
                tok.span,
            )
        self.advance()
        axis = Axis(tok.value, inverted=bool(self.accept("INV")))
        if self.accept("DCOLON"):
            if self.accept("LBRACKET"):
                inner = self.nre()
                self.expect("RBRACKET", "']'")
                return AxisNest(axis, inner)
            const = self.const_token()
            return AxisConst(axis, const)
        return AxisExpr(axis)

    def const_token(self) -> str:
        tok = self.current
        if tok.kind in ("IDENT", "CONST"):
            self.advance()
            return tok.value
        found = tok.value or "end of input"
        raise ParseError(f"expected a constant, found {found!r}", tok.span)

    # --- terms and queries ----------------------------------------------

    def term(self) -> Term:
        tok = self.current
        if tok.kind == "VAR":
            self.advance()
            return Var(tok.value)
        return Const(self.const_token())

    def atom(self) -> TriplePattern | RelAtom:
        if self.accept("LPAREN"):
            subject = self.term()
            self.expect("COMMA", "','")
            expr = self.nre()
            self.expect("COMMA", "','")
            obj = self.term()
            self.expect("RPAREN", "')'")
            return TriplePattern(subject, expr, obj)
        name = self.expect("IDENT", "a relation name").value
        self.expect("LPAREN", "'('")
        args = [self.term()]
        while self.accept("COMMA"):
            args.append(self.term())
        self.expect("RPAREN", "')'")
        return RelAtom(name, tuple(args))

    def rule(self) -> tuple[str, Rule]:
        name = self.expect("IDENT", "a query name").value
        self.expect("LPAREN", "'('")
        u = self.term()
        self.expect("COMMA", "','")
        v = self.term()
        self.expect("RPAREN", "')'")
        self.expect("TURNSTILE", "':-'")
        triple_atoms: list[TriplePattern] = []
        rel_atoms: list[RelAtom] = []
        while True:
            parsed = self.atom()
            if isinstance(parsed, TriplePattern):
                triple_atoms.append(parsed)
            else:
                rel_atoms.append(parsed)
            if not self.accept("COMMA"):
                break
        return name, Rule((u, v), tuple(triple_atoms), tuple(rel_atoms))

    def query(self) -> Query:
        name, first = self.rule()
        rules = [first]
        while self.accept("SEMI"):
            other_name, other = self.rule()
            if other_name != name:
                raise ParseError(
                    f"union branch named {other_name!r} does not match {name!r}",
                    self.current.span,
                )
            rules.append(other)
        return Query(name, tuple(rules))

    # --- property paths ---------------------------------------------------

    def pp(self) -> Pp:
        path = self.pp_seq()
        while self.accept("PIPE"):
            path = PpAlt(path, self.pp_seq())
        return path

    def pp_seq(self) -> Pp:
        path = self.pp_inv()
        while self.accept("SLASH"):
            path = PpSeq(path, self.pp_inv())
        return path

    def pp_inv(self) -> Pp:
        if self.accept("CARET"):
            return PpInv(self.pp_inv())
        return self.pp_postfix()

    def pp_postfix(self) -> Pp:
        path = self.pp_primary()
        while True:
            if self.accept("QMARK"):
                path = PpOpt(path)
            elif self.accept("STAR"):
                path = PpStar(path)
            elif self.accept("PLUS"):
                path = PpPlus(path)
            else:
                return path

    def pp_primary(self) -> Pp:
        if self.accept("BANG"):
            return self.pp_negset()
        if self.accept("LPAREN"):
            path = self.pp()
            self.expect("RPAREN", "')'")
            return path
        return PpIri(self.const_token())

    def pp_negset(self) -> Pp:
        forward: set[str] = set()
        inverse: set[str] = set()

        def member() -> None:
            if self.accept("CARET"):
                inverse.add(self.const_token())
            else:
                forward.add(self.const_token())

        if self.accept("LPAREN"):
            member()
            while self.accept("PIPE"):
                member()
            self.expect("RPAREN", "')'")
        else:
            member()
        return PpNegSet(frozenset(forward), frozenset(inverse))

    def finish(self) -> None:
        tok = self.current
        if tok.kind != "EOF":
            raise ParseError(f"unexpected trailing input {tok.value!r}", tok.span)


def parse_nre(text: str) -> Nre:
    parser = _Parser(text)
    expr = parser.nre()
    parser.finish()
    return expr


def parse_pp(text: str) -> Pp:
    parser = _Parser(text)
    path = parser.pp()
    parser.finish()
    return path


def parse_query(text: str) -> Query:
    parser = _Parser(text)
    query = parser.query()
    parser.finish()
    validate(query)
    return query

"""Recursive-descent parser for programs, types, indices and index judgments.

Grammar (``--`` starts a line comment)::

    program  := ['forall' ident* '.'] { 'def' ident ['[' ident,* ']'] [':' type] '=' expr ';' }
    expr     := 'let' pat '=' expr 'in' expr | 'return' value | 'force' atom
              | 'box' '[' type ']' atom | 'apply' '(' value ',' value ')' | simple
    simple   := operand atom | operand ('+'|'-'|'*') operand | value
    value    := operand [':' value]
    operand  := atom | 'fold' '[' ident ']' atom atom | '\\' pat '::' type '.' expr | 'lift' expr
    atom     := ident | ident'['index,*']' | nat | '()' | '[]' | '(' expr ')' | '(' value ',' value ')'
    pat      := ident | '(' pat ',' pat ')'

    type     := tensor ['-o' '[' index ',' index ']' type]
    tensor   := prefix {'*' prefix}
    prefix   := '!' prefix | 'List' '[' index ']' prefix | 'Circ' '[' index ']' '(' type ',' type ')'
              | 'Unit' | 'Bit' | 'Qubit' | 'Nat' | '(' type ')'

    index    := term {('+'|'-') term}
    term     := factor {'*' factor}
    factor   := nat | ident | 'max' '(' index ',' index ')' | 'max' '[' ident '<' index ']' index
              | '(' index ')'

``ident[...]`` written without a space before the bracket instantiates an
index-parameterized definition; ``f []`` applies ``f`` to the empty list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import count

from . import index as ix
from . import syntax as sx

KEYWORDS = frozenset(
    "let in return force box apply lift fold def forall max Unit Bit Qubit Nat List Circ".split()
)
PRIMITIVES = frozenset(
    "H CNOT INIT0 INIT1 DISCARD MEAS CINIT0 CINIT1 CDISCARD makeRGate".split()
)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>-o(?=\s*\[)|::|<=|\(\)|[\\.,;:=()\[\]<+\-*!])
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "sym", "eof"
    text: str
    line: int
    column: int
    spaced: bool  # whitespace precedes the token


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    spaced = True
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind == "ws":
            spaced = True
        else:
            tokens.append(Token(kind, text, line, pos - line_start + 1, spaced))
            spaced = False
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1, True))
    return tokens


@dataclass(frozen=True)
class Judgment:
    ctx: tuple
    relation: str
    lhs: ix.Index
    rhs: ix.Index


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0
        taken = {t.text for t in self.tokens if t.kind == "ident"}
        self._fresh = (f"_t{n}" for n in count() if f"_t{n}" not in taken)

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "ident") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def fail(self, message: str, tok: Token | None = None):
        t = tok or self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{message}, found {found}", t.line, t.column)

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS or t.text in PRIMITIVES:
            self.fail("expected an identifier")
        self.advance()
        return t.text

    def span(self) -> tuple:
        return (self.tok.line, self.tok.column)

    def end(self) -> None:
        if self.tok.kind != "eof":
            self.fail("expected end of input")

    # indices

    def index(self) -> ix.Index:
        left = self.index_term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            right = self.index_term()
            left = ix.Plus(left, right) if op == "+" else ix.Monus(left, right)
        return left

    def index_term(self) -> ix.Index:
        left = self.index_factor()
        while self.at("*"):
            self.advance()
            left = ix.Times(left, self.index_factor())
        return left

    def index_factor(self) -> ix.Index:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return ix.Const(int(t.text))
        if self.at("max"):
            self.advance()
            if self.at("("):
                self.advance()
                left = self.index()
                self.expect(",")
                right = self.index()
                self.expect(")")
                return ix.Max(left, right)
            self.expect("[")
            binder = self.ident()
            self.expect("<")
            bound = self.index()
            self.expect("]")
            return ix.BoundedMax(binder, bound, self.index())
        if self.at("("):
            self.advance()
            inner = self.index()
            self.expect(")")
            return inner
        if t.kind == "ident":
            return ix.Var(self.ident())
        self.fail("expected an index")

    # types

    def type(self) -> sx.Type:
        left = self.tensor()
        if self.at("-o"):
            self.advance()
            self.expect("[")
            width = self.index()
            self.expect(",")
            capture = self.index()
            self.expect("]")
            return sx.Arrow(left, self.type(), width, capture)
        return left

    def tensor(self) -> sx.Type:
        left = self.prefix_type()
        while self.at("*"):
            self.advance()
            left = sx.Tensor(left, self.prefix_type())
        return left

    def prefix_type(self) -> sx.Type:
        t = self.tok
        if self.at("!"):
            self.advance()
            return sx.Bang(self.prefix_type())
        if self.at("List"):
            self.advance()
            self.expect("[")
            length = self.index()
            self.expect("]")
            return sx.ListT(length, self.prefix_type())
        if self.at("Circ"):
            self.advance()
            self.expect("[")
            width = self.index()
            self.expect("]")
            self.expect("(")
            inp = self.type()
            self.expect(",")
            out = self.type()
            self.expect(")")
            return sx.Circ(width, inp, out)
        simple = {"Unit": sx.UNIT, "Bit": sx.BIT, "Qubit": sx.QUBIT, "Nat": sx.NAT}
        if t.kind == "ident" and t.text in simple:
            self.advance()
            return simple[t.text]
        if self.at("()"):
            self.fail("expected a type")
        if self.at("("):
            self.advance()
            inner = self.type()
            self.expect(")")
            return inner
        self.fail("expected a type")

    # terms and values

    def expr(self) -> sx.Expr:
        span = self.span()
        if self.at("let"):
            self.advance()
            pattern = self.pattern()
            self.expect("=")
            bound = self.expr()
            self.expect("in")
            body = self.as_term(self.expr())
            return self.bind_pattern(pattern, bound, body, span)
        if self.at("return"):
            self.advance()
            return sx.Return(self.value(), span=span)
        if self.at("force"):
            self.advance()
            return sx.Force(self.value_atom(), span=span)
        if self.at("box"):
            self.advance()
            self.expect("[")
            bundle = self.type()
            self.expect("]")
            return sx.Box(bundle, self.value_atom(), span=span)
        if self.at("apply"):
            self.advance()
            self.expect("(")
            circuit = self.value()
            self.expect(",")
            argument = self.value()
            self.expect(")")
            return sx.Apply(circuit, argument, span=span)
        return self.simple()

    def simple(self) -> sx.Expr:
        span = self.span()
        head = self.operand()
        if self.starts_atom():
            return sx.App(head, self.value_atom(), span=span)
        if self.at("+") or self.at("-") or self.at("*"):
            op = self.advance().text
            return sx.NatOp(op, head, self.operand(), span=span)
        if self.at(":"):
            self.advance()
            return sx.Cons(head, self.value(), span=span)
        return head

    def value(self) -> sx.Value:
        span = self.span()
        head = self.operand()
        if self.at(":"):
            self.advance()
            return sx.Cons(head, self.value(), span=span)
        return head

    def operand(self) -> sx.Value:
        span = self.span()
        if self.at("fold"):
            self.advance()
            self.expect("[")
            binder = self.ident()
            self.expect("]")
            step = self.value_atom()
            base = self.value_atom()
            return sx.Fold(binder, step, base, span=span)
        if self.at("\\"):
            self.advance()
            pattern = self.pattern()
            self.expect("::")
            annotation = self.type()
            self.expect(".")
            body = self.as_term(self.expr())
            if isinstance(pattern, str):
                return sx.Lambda(pattern, annotation, body, span=span)
            param = next(self._fresh)
            return sx.Lambda(param, annotation, self.destructure(pattern, sx.Variable(param, span=span), body, span), span=span)
        if self.at("lift"):
            self.advance()
            return sx.Lift(self.as_term(self.expr()), span=span)
        return self.value_atom()

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind == "num":
            return True
        if t.kind == "ident":
            return t.text not in KEYWORDS
        return t.text in ("(", "()", "[")

    def value_atom(self) -> sx.Value:
        start = self.tok
        node = self.atom()
        if not isinstance(node, sx.Value):
            self.fail("expected a value, not a computation", start)
        return node

    def atom(self) -> sx.Expr:
        t = self.tok
        span = (t.line, t.column)
        if t.kind == "num":
            self.advance()
            return sx.NatLit(int(t.text), span=span)
        if self.at("()"):
            self.advance()
            return sx.UnitVal(span=span)
        if self.at("["):
            self.advance()
            self.expect("]")
            return sx.Nil(span=span)
        if self.at("("):
            self.advance()
            first = self.expr()
            if self.at(","):
                self.advance()
                second = self.value()
                self.expect(")")
                if not isinstance(first, sx.Value):
                    self.fail("expected a value in a pair", t)
                return sx.Pair(first, second, span=span)
            self.expect(")")
            return first
        if t.kind == "ident" and t.text in PRIMITIVES:
            self.advance()
            return sx.Prim(t.text, span=span)
        if t.kind == "ident":
            name = self.ident()
            nxt = self.tok
            if nxt.text == "[" and not nxt.spaced and self.peek().text != "]":
                self.advance()
                indices = [self.index()]
                while self.at(","):
                    self.advance()
                    indices.append(self.index())
                self.expect("]")
                return sx.DefRef(name, tuple(indices), span=span)
            return sx.Variable(name, span=span)
        self.fail("expected a value")

    def as_term(self, node: sx.Expr) -> sx.Term:
        if isinstance(node, sx.Value):
            return sx.Return(node, span=node.span)
        return node

    def pattern(self):
        if self.at("("):
            self.advance()
            left = self.pattern()
            self.expect(",")
            right = self.pattern()
            self.expect(")")
            return (left, right)
        return self.ident()

    def bind_pattern(self, pattern, bound: sx.Expr, body: sx.Term, span) -> sx.Term:
        if isinstance(pattern, str):
            return sx.Let(pattern, self.as_term(bound), body, span=span)
        if isinstance(bound, sx.Value):
            return self.destructure(pattern, bound, body, span)
        tmp = next(self._fresh)
        return sx.Let(tmp, bound, self.destructure(pattern, sx.Variable(tmp, span=span), body, span), span=span)

    def destructure(self, pattern, value: sx.Value, body: sx.Term, span) -> sx.Term:
        """Nested pair patterns become nested Dest terms."""
        left, right = pattern
        names = []
        inner = []
        for part in (left, right):
            if isinstance(part, str):
                names.append(part)
            else:
                tmp = next(self._fresh)
                names.append(tmp)
                inner.append((part, tmp))
        for part, tmp in reversed(inner):
            body = self.destructure(part, sx.Variable(tmp, span=span), body, span)
        return sx.Dest(names[0], names[1], value, body, span=span)

    # programs

    def program(self) -> sx.Program:
        params: list[str] = []
        if self.at("forall"):
            self.advance()
            while not self.at("."):
                params.append(self.ident())
            self.advance()
        definitions: list[sx.Definition] = []
        seen: set[str] = set()
        while self.tok.kind != "eof":
            head = self.expect("def")
            name_tok = self.tok
            name = self.ident()
            if name in seen:
                raise ParseError(f"duplicate definition {name!r}", name_tok.line, name_tok.column)
            def_params: list[str] = []
            if self.at("[") and not self.tok.spaced:
                self.advance()
                def_params.append(self.ident())
                while self.at(","):
                    self.advance()
                    def_params.append(self.ident())
                self.expect("]")
            annotation = None
            if self.at(":"):
                self.advance()
                annotation = self.type()
            self.expect("=")
            body = self.expr()
            self.expect(";")
            _check_scope(body, seen, name_tok)
            seen.add(name)
            definitions.append(
                sx.Definition(name, body, tuple(def_params), annotation, span=(head.line, head.column))
            )
        return sx.Program(ix.index_ctx(params), tuple(definitions))

    def judgment(self) -> Judgment:
        params: list[str] = []
        if self.at("forall"):
            self.advance()
            while not self.at("."):
                params.append(self.ident())
            self.advance()
        lhs = self.index()
        if self.at("<="):
            relation = "<="
        elif self.at("="):
            relation = "="
        else:
            self.fail("expected '<=' or '='")
        self.advance()
        rhs = self.index()
        self.end()
        return Judgment(ix.index_ctx(params), relation, lhs, rhs)


def _check_scope(body: sx.Expr, defined: set[str], where: Token) -> None:
    unknown = sorted(sx.free_term_vars(body) - defined)
    if unknown:
        node = _find_variable(body, unknown[0])
        line, column = node.span if node is not None and node.span else (where.line, where.column)
        raise ParseError(f"unknown identifier {unknown[0]!r}", line, column)
    for ref in _def_refs(body):
        if ref.name not in defined:
            line, column = ref.span or (where.line, where.column)
            raise ParseError(f"unknown definition {ref.name!r}", line, column)


def _find_variable(node: sx.Expr, name: str):
    if isinstance(node, sx.Variable) and node.name == name:
        return node
    for child in sx._children(node):
        found = _find_variable(child, name)
        if found is not None:
            return found
    return None


def _def_refs(node: sx.Expr):
    if isinstance(node, sx.DefRef):
        yield node
    for child in sx._children(node):
        yield from _def_refs(child)


def parse(source: str) -> sx.Program:
    return Parser(source).program()


def parse_expr(source: str) -> sx.Expr:
    p = Parser(source)
    node = p.expr()
    p.end()
    return node


def parse_type(source: str) -> sx.Type:
    p = Parser(source)
    node = p.type()
    p.end()
    return node


def parse_index(source: str) -> ix.Index:
    p = Parser(source)
    node = p.index()
    p.end()
    return node


def parse_judgment(source: str) -> Judgment:
    return Parser(source).judgment()

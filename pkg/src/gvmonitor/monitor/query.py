"""Boolean keyword query parser and matcher.

Grammar: terms, quoted or parenthesized phrases, ``OR`` (uppercase), and
implicit AND by adjacency. Matching is case-insensitive at the word level:
a term hits only whole tokens, a phrase hits consecutive tokens, so "tiro"
never matches inside "tiroteio".
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import QueryParseError

_TOKEN_RE = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class Term:
    text: str


@dataclass(frozen=True)
class Phrase:
    words: tuple[str, ...]


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


QueryNode = Term | Phrase | And | Or


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, str, int]] = []  # (kind, value, offset)
        self._scan()

    def _scan(self) -> None:
        text = self.text
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch in "()":
                self.tokens.append(("paren", ch, i))
                i += 1
            elif ch == '"':
                end = text.find('"', i + 1)
                if end == -1:
                    raise QueryParseError("unterminated quote", i)
                self.tokens.append(("quoted", text[i + 1 : end], i))
                i = end + 1
            else:
                j = i
                while j < len(text) and not text[j].isspace() and text[j] not in '()"':
                    j += 1
                word = text[i:j]
                kind = "or" if word == "OR" else "term"
                self.tokens.append((kind, word, i))
                i = j


class _Parser:
    def __init__(self, query: str):
        self.query = query
        self.tokens = _Lexer(query).tokens
        self.idx = 0

    def _peek(self):
        return self.tokens[self.idx] if self.idx < len(self.tokens) else None

    def _next(self):
        tok = self._peek()
        if tok is not None:
            self.idx += 1
        return tok

    def _offset(self) -> int:
        tok = self._peek()
        return tok[2] if tok is not None else len(self.query)

    def parse(self) -> QueryNode:
        if not self.tokens:
            raise QueryParseError("empty query", 0)
        node = self._or_expr()
        tok = self._peek()
        if tok is not None:
            raise QueryParseError(f"unexpected {tok[1]!r}", tok[2])
        return node

    def _or_expr(self) -> QueryNode:
        children = [self._and_expr()]
        while True:
            tok = self._peek()
            if tok is None or tok[0] != "or":
                break
            self._next()
            children.append(self._and_expr())
        return children[0] if len(children) == 1 else Or(tuple(children))

    def _and_expr(self) -> QueryNode:
        children = [self._atom()]
        while True:
            tok = self._peek()
            if tok is None or tok[0] == "or" or (tok[0] == "paren" and tok[1] == ")"):
                break
            children.append(self._atom())
        return children[0] if len(children) == 1 else And(tuple(children))

    def _atom(self) -> QueryNode:
        tok = self._peek()
        if tok is None:
            raise QueryParseError("expected a term", self._offset())
        kind, value, offset = tok
        if kind == "term":
            self._next()
            return Term(value)
        if kind == "quoted":
            self._next()
            words = tuple(value.split())
            if not words:
                raise QueryParseError("empty phrase", offset)
            return Phrase(words) if len(words) > 1 else Term(words[0])
        if kind == "paren" and value == "(":
            self._next()
            inner = self._or_expr()
            closing = self._peek()
            if closing is None or closing[0] != "paren" or closing[1] != ")":
                raise QueryParseError("unbalanced parenthesis: expected ')'", self._offset())
            self._next()
            # plain adjacent terms inside parens read as a phrase
            if isinstance(inner, And) and all(isinstance(c, Term) for c in inner.children):
                return Phrase(tuple(c.text for c in inner.children))
            return inner
        if kind == "paren" and value == ")":
            raise QueryParseError("unbalanced parenthesis: unexpected ')'", offset)
        raise QueryParseError(f"unexpected {value!r}", offset)


def parse_keyword_query(query: str) -> QueryNode:
    """Parse a keyword query into its tree (raises QueryParseError)."""
    return _Parser(query).parse()


def unparse(node: QueryNode) -> str:
    """Render a query tree back to text; phrases as parenthesized words."""
    if isinstance(node, Term):
        return node.text
    if isinstance(node, Phrase):
        return "(" + " ".join(node.words) + ")"
    if isinstance(node, And):
        parts = [
            f"({unparse(c)})" if isinstance(c, Or) else unparse(c)
            for c in node.children
        ]
        return " ".join(parts)
    if isinstance(node, Or):
        return " OR ".join(unparse(c) for c in node.children)
    raise TypeError(f"not a query node: {node!r}")


def _tokens_of(text: str) -> list[str]:
    return [t.casefold() for t in _TOKEN_RE.findall(text)]


def _contains_sequence(tokens: list[str], needle: list[str]) -> bool:
    n = len(needle)
    if n == 0:
        return False
    return any(tokens[i : i + n] == needle for i in range(len(tokens) - n + 1))


def matches(node: QueryNode, text: str) -> bool:
    """Case-insensitive word-level evaluation of the query against a text."""
    tokens = _tokens_of(text)

    def walk(n: QueryNode) -> bool:
        if isinstance(n, Term):
            return _contains_sequence(tokens, _tokens_of(n.text))
        if isinstance(n, Phrase):
            return _contains_sequence(tokens, _tokens_of(" ".join(n.words)))
        if isinstance(n, And):
            return all(walk(c) for c in n.children)
        if isinstance(n, Or):
            return any(walk(c) for c in n.children)
        raise TypeError(f"not a query node: {n!r}")

    return walk(node)

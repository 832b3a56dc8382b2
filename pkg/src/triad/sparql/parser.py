"""Recursive-descent parser for the SPARQL subset produced by the template generator.

Executable: SELECT [DISTINCT], ASK and ``SELECT (COUNT([DISTINCT] ?v|*) AS ?a)``
over basic graph patterns. FILTER, OPTIONAL, BIND, VALUES, MINUS, nested groups /
UNION and the GROUP BY / HAVING / ORDER BY / LIMIT / OFFSET modifiers are
captured verbatim as :class:`Feature` records so execution can reject them.
"""

from __future__ import annotations

import re

from ..kb.store import TriplePattern
from ..kb.terms import RDF_TYPE, Literal, Var, is_absolute_uri
from .ast import ASK, COUNT, RELATION, ENTITY, SELECT, Feature, MentionSlot, SparqlTemplate

XSD = "http://www.w3.org/2001/XMLSchema#"

_WS = re.compile(r"(?:\s+|#[^\n]*)+")
_VAR = re.compile(r"[?$]([A-Za-z_][A-Za-z0-9_]*)")
_ANGLE = re.compile(r"<([^<>\n]*)>")
_PNAME = re.compile(r"([A-Za-z][\w.-]*)?:([\w.:%-]*[\w%-])?")
_STRING = re.compile(r'"((?:[^"\\\n]|\\.)*)"|\'((?:[^\'\\\n]|\\.)*)\'')
_LANG = re.compile(r"@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)")
_NUMBER = re.compile(r"[+-]?(?:\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+)")
_WORD = re.compile(r"[A-Za-z]+")
_ESC = {"t": "\t", "n": "\n", "r": "\r", "b": "\b", "f": "\f", '"': '"', "'": "'", "\\": "\\"}

_INNER_PAREN = ("FILTER", "BIND")
_INNER_BRACE = ("OPTIONAL", "MINUS", "VALUES", "SERVICE", "GRAPH")
_MODIFIERS = ("GROUP", "HAVING", "ORDER", "LIMIT", "OFFSET")


class SparqlSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        snippet = text[position:position + 20]
        super().__init__(f"{message} at position {position}" + (f" near {snippet!r}" if snippet else ""))
        self.position = position


def _norm(text: str) -> str:
    return " ".join(text.split())


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.prefixes: dict[str, str] = {}

    # scanning helpers
    def skip(self) -> None:
        m = _WS.match(self.text, self.pos)
        if m:
            self.pos = m.end()

    def error(self, message: str, pos: int | None = None) -> SparqlSyntaxError:
        return SparqlSyntaxError(message, self.pos if pos is None else pos, self.text)

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek_char(self) -> str:
        self.skip()
        return self.text[self.pos:self.pos + 1]

    def peek_word(self) -> str:
        self.skip()
        m = _WORD.match(self.text, self.pos)
        if not m:
            return ""
        end = m.end()
        if end < len(self.text) and (self.text[end] == ":" or self.text[end].isalnum() or self.text[end] == "_"):
            return ""
        return m.group(0).upper()

    def accept_word(self, word: str) -> bool:
        if self.peek_word() == word:
            self.pos += len(word)
            return True
        return False

    def expect_word(self, word: str) -> None:
        if not self.accept_word(word):
            raise self.error(f"expected {word}")

    def accept_char(self, ch: str) -> bool:
        if self.peek_char() == ch:
            self.pos += 1
            return True
        return False

    def expect_char(self, ch: str) -> None:
        if not self.accept_char(ch):
            raise self.error(f"expected {ch!r}")

    def balanced(self, open_ch: str, close_ch: str) -> str:
        """Consume a balanced ``open_ch ... close_ch`` span, honouring string literals."""
        self.skip()
        start = self.pos
        if self.text[self.pos:self.pos + 1] != open_ch:
            raise self.error(f"expected {open_ch!r}")
        depth = 0
        i = self.pos
        while i < len(self.text):
            ch = self.text[i]
            if ch in "\"'":
                m = _STRING.match(self.text, i)
                if not m:
                    raise self.error("unterminated string", i)
                i = m.end()
                continue
            if ch == open_ch:
                depth += 1
            elif ch == close_ch:
                depth -= 1
                if depth == 0:
                    self.pos = i + 1
                    return self.text[start:self.pos]
            i += 1
        raise self.error(f"unbalanced {open_ch!r}", start)

    # grammar
    def parse(self) -> SparqlTemplate:
        self.prologue()
        if self.accept_word("ASK"):
            form, distinct, projection, alias = ASK, False, (), None
        elif self.accept_word("SELECT"):
            form, distinct, projection, alias = self.select_clause()
        else:
            raise self.error("expected SELECT or ASK")
        self.accept_word("WHERE")
        patterns, features = self.group()
        features += self.modifiers()
        if not self.at_end():
            raise self.error("unexpected trailing input")
        if not patterns:
            raise self.error("query has no triple patterns", 0)
        return SparqlTemplate(form=form, patterns=tuple(patterns), distinct=distinct,
                              projection=projection, count_alias=alias,
                              features=tuple(features), raw=self.text)

    def prologue(self) -> None:
        while True:
            if self.accept_word("PREFIX"):
                self.skip()
                m = re.compile(r"([A-Za-z][\w.-]*)?:").match(self.text, self.pos)
                if not m:
                    raise self.error("expected prefix name")
                self.pos = m.end()
                self.skip()
                iri = _ANGLE.match(self.text, self.pos)
                if not iri:
                    raise self.error("expected IRI in PREFIX")
                self.pos = iri.end()
                self.prefixes[m.group(1) or ""] = iri.group(1)
            elif self.accept_word("BASE"):
                raise self.error("BASE is not supported")
            else:
                return

    def select_clause(self):
        distinct = self.accept_word("DISTINCT")
        if not distinct:
            self.accept_word("REDUCED")
        if self.accept_char("*"):
            return SELECT, distinct, (), None
        if self.peek_word() == "COUNT" or self.peek_char() == "(":
            return self.count_clause()
        names: list[str] = []
        while True:
            self.skip()
            m = _VAR.match(self.text, self.pos)
            if not m:
                break
            self.pos = m.end()
            names.append(m.group(1))
        if not names:
            raise self.error("expected projection")
        if self.peek_char() == "(" or self.peek_word() == "COUNT":
            raise self.error("aggregates mixed with plain projection are not supported")
        return SELECT, distinct, tuple(names), None

    def count_clause(self):
        wrapped = self.accept_char("(")
        self.expect_word("COUNT")
        self.expect_char("(")
        distinct = self.accept_word("DISTINCT")
        if self.accept_char("*"):
            target: tuple[str, ...] = ()
        else:
            self.skip()
            m = _VAR.match(self.text, self.pos)
            if not m:
                raise self.error("expected variable or * in COUNT")
            self.pos = m.end()
            target = (m.group(1),)
        self.expect_char(")")
        alias = "count"
        if self.accept_word("AS"):
            self.skip()
            m = _VAR.match(self.text, self.pos)
            if not m:
                raise self.error("expected alias variable")
            self.pos = m.end()
            alias = m.group(1)
        if wrapped:
            self.expect_char(")")
        self.skip()
        if _VAR.match(self.text, self.pos) or self.peek_char() == "(":
            raise self.error("aggregates mixed with plain projection are not supported")
        return COUNT, distinct, target, alias

    def group(self) -> tuple[list[TriplePattern], list[Feature]]:
        self.expect_char("{")
        patterns: list[TriplePattern] = []
        features: list[Feature] = []
        while True:
            if self.accept_char("}"):
                return patterns, features
            if self.at_end():
                raise self.error("unterminated group")
            if self.accept_char("."):
                continue
            word = self.peek_word()
            if word in _INNER_PAREN:
                self.pos += len(word)
                features.append(Feature(word, _norm(f"{word}{self.balanced('(', ')')}"), True))
            elif word in _INNER_BRACE:
                start = self.pos
                self.pos += len(word)
                while self.peek_char() not in ("{", ""):
                    self.pos += 1
                self.balanced("{", "}")
                features.append(Feature(word, _norm(self.text[start:self.pos]), True))
            elif self.peek_char() == "{":
                start = self.pos
                self.balanced("{", "}")
                keyword = "GROUP"
                while self.accept_word("UNION"):
                    keyword = "UNION"
                    self.balanced("{", "}")
                features.append(Feature(keyword, _norm(self.text[start:self.pos]), True))
            else:
                patterns.extend(self.triples_block())

    def triples_block(self) -> list[TriplePattern]:
        out: list[TriplePattern] = []
        subject = self.term(position=0)
        while True:
            predicate = self.term(position=1)
            while True:
                obj = self.term(position=2)
                out.append(TriplePattern(subject, predicate, obj))
                if not self.accept_char(","):
                    break
            if self.accept_char(";"):
                if self.peek_char() in (".", "}"):
                    break
                continue
            break
        return out

    def term(self, position: int):
        self.skip()
        text, pos = self.text, self.pos
        m = _VAR.match(text, pos)
        if m:
            self.pos = m.end()
            return Var(m.group(1))
        m = _ANGLE.match(text, pos)
        if m:
            self.pos = m.end()
            inner = m.group(1).strip()
            if is_absolute_uri(inner):
                return inner
            if not inner:
                raise self.error("empty angle brackets", pos)
            return MentionSlot(inner, RELATION if position == 1 else ENTITY)
        if position == 1 and self.peek_word() == "A":
            self.pos += 1
            return RDF_TYPE
        m = _STRING.match(text, pos)
        if m:
            if position != 2:
                raise self.error("literal allowed only in object position", pos)
            self.pos = m.end()
            raw = m.group(1) if m.group(1) is not None else m.group(2)
            lexical = re.sub(r"\\(.)", lambda e: _ESC.get(e.group(1), e.group(1)), raw)
            lang = _LANG.match(text, self.pos)
            if lang:
                self.pos = lang.end()
                return Literal(lexical, lang.group(1), None)
            if text.startswith("^^", self.pos):
                self.pos += 2
                dt = self.term(position=-1)
                if not isinstance(dt, str):
                    raise self.error("datatype must be an IRI")
                return Literal(lexical, None, dt)
            return Literal(lexical)
        m = _NUMBER.match(text, pos)
        if m and position == 2:
            self.pos = m.end()
            lex = m.group(0)
            kind = "double" if "e" in lex.lower() else "decimal" if "." in lex else "integer"
            return Literal(lex, None, XSD + kind)
        word = self.peek_word()
        if word in ("TRUE", "FALSE") and position == 2:
            self.pos += len(word)
            return Literal(word.lower(), None, XSD + "boolean")
        m = _PNAME.match(text, pos)
        if m and m.group(0) != "":
            prefix = m.group(1) or ""
            if prefix not in self.prefixes:
                raise self.error(f"undeclared prefix {prefix!r}", pos)
            self.pos = m.end()
            return self.prefixes[prefix] + (m.group(2) or "")
        raise self.error("expected term")

    def modifiers(self) -> list[Feature]:
        out: list[Feature] = []
        while not self.at_end():
            word = self.peek_word()
            if word not in _MODIFIERS:
                break
            start = self.pos
            self.pos += len(word)
            if word in ("GROUP", "ORDER"):
                self.expect_word("BY")
                keyword = f"{word} BY"
                while not self.at_end() and self.peek_word() not in _MODIFIERS:
                    if self.peek_char() == "(":
                        self.balanced("(", ")")
                    else:
                        m = re.compile(r"[^\s()]+").match(self.text, self.pos)
                        self.pos = m.end()
                        if self.peek_char() == "(":
                            self.balanced("(", ")")
            elif word == "HAVING":
                keyword = word
                while self.peek_char() == "(":
                    self.balanced("(", ")")
            else:
                keyword = word
                self.skip()
                m = re.compile(r"\d+").match(self.text, self.pos)
                if not m:
                    raise self.error(f"expected integer after {word}")
                self.pos = m.end()
            out.append(Feature(keyword, _norm(self.text[start:self.pos]), False))
        return out


_FENCE = re.compile(r"```(?:sparql|SPARQL)?\s*(.*?)```", re.S)
_START = re.compile(r"\b(PREFIX|SELECT|ASK)\b", re.I)


def extract_query_text(output: str) -> str:
    """Pull the query out of free-form LLM output (code fences, leading prose)."""
    m = _FENCE.search(output)
    if m:
        output = m.group(1)
    m = _START.search(output)
    return output[m.start():].strip() if m else output.strip()


def parse(text: str) -> SparqlTemplate:
    """Parse query or template text; raises :class:`SparqlSyntaxError`."""
    return _Parser(text).parse()

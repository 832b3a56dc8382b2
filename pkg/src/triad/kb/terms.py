"""RDF terms: URIs are plain ``str``, literals are :class:`Literal`."""

from __future__ import annotations

from typing import NamedTuple, Union

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"


class Literal(NamedTuple):
    """A literal with its lexical form and opaque language/datatype tags."""

    lexical: str
    lang: str | None = None
    datatype: str | None = None

    def __str__(self) -> str:
        return self.lexical


Term = Union[str, Literal]


class Var(NamedTuple):
    """A query variable, stored without its leading '?'."""

    name: str

    def __str__(self) -> str:
        return "?" + self.name


class Triple(NamedTuple):
    subject: str
    predicate: str
    object: Term


def is_absolute_uri(text: str) -> bool:
    return "://" in text


def term_key(term: Term) -> tuple:
    """Total order over terms: URIs before literals, then lexicographic."""
    if isinstance(term, Literal):
        return (1, term.lexical, term.lang or "", term.datatype or "")
    return (0, term, "", "")


def term_value(term: Term) -> str:
    """String form used in answers: the URI itself or the literal's lexical form."""
    return term.lexical if isinstance(term, Literal) else term


def local_name(uri: str) -> str:
    """Label fallback: text after the last '/' or '#', underscores to spaces."""
    tail = uri.rstrip("/#")
    cut = max(tail.rfind("/"), tail.rfind("#"))
    return tail[cut + 1:].replace("_", " ")


_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def escape_string(text: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in text)


def to_ntriples(term: Term) -> str:
    """Serialize a term in N-Triples syntax."""
    if isinstance(term, Literal):
        out = f'"{escape_string(term.lexical)}"'
        if term.lang:
            out += f"@{term.lang}"
        elif term.datatype:
            out += f"^^<{term.datatype}>"
        return out
    return f"<{term}>"

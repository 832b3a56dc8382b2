"""Line-oriented N-Triples reader and writer."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .terms import Literal, Term, Triple, is_absolute_uri, to_ntriples

_IRI = r"<([^<>\"{}|^`\\\x00-\x20]*)>"
_STRING = r'"((?:[^"\\\n\r]|\\.)*)"'
_LANG = r"@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)"
_LINE = re.compile(
    rf"^\s*{_IRI}\s*{_IRI}\s*(?:{_IRI}|{_STRING}(?:{_LANG}|\^\^{_IRI})?)\s*\.\s*(?:#.*)?$"
)
_UNESCAPE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))")
_SIMPLE = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


class NTriplesError(ValueError):
    def __init__(self, lineno: int, text: str, reason: str = "malformed triple"):
        super().__init__(f"line {lineno}: {reason}: {text!r}")
        self.lineno = lineno
        self.text = text
        self.reason = reason


def _unescape(text: str) -> str:
    def sub(m: re.Match) -> str:
        if m.group(1) or m.group(2):
            return chr(int(m.group(1) or m.group(2), 16))
        ch = m.group(3)
        if ch not in _SIMPLE:
            raise ValueError(f"bad escape \\{ch}")
        return _SIMPLE[ch]

    return _UNESCAPE.sub(sub, text) if "\\" in text else text


def parse_line(line: str, lineno: int = 0) -> Triple | None:
    """Parse one line. Blank and comment lines give ``None``."""
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    m = _LINE.match(stripped)
    if m is None:
        if stripped.startswith("_:") or " _:" in stripped:
            raise NTriplesError(lineno, stripped, "blank nodes are not supported")
        raise NTriplesError(lineno, stripped)
    s, p, o_iri, o_str, o_lang, o_dt = m.groups()
    try:
        s, p = _unescape(s), _unescape(p)
        if o_iri is not None:
            obj: Term = _unescape(o_iri)
        else:
            obj = Literal(_unescape(o_str), o_lang, _unescape(o_dt) if o_dt else None)
    except ValueError as exc:
        raise NTriplesError(lineno, stripped, str(exc)) from None
    for uri in (s, p) + ((obj,) if isinstance(obj, str) else ()):
        if not is_absolute_uri(uri):
            raise NTriplesError(lineno, stripped, f"not an absolute URI: <{uri}>")
    return Triple(s, p, obj)


@dataclass
class ParseStats:
    lines: int = 0
    triples: int = 0
    skipped: int = 0


def iter_triples(lines: Iterable[str], strict: bool = True,
                 stats: ParseStats | None = None) -> Iterator[Triple]:
    """Stream triples from lines. In lenient mode malformed lines are counted and skipped."""
    stats = stats if stats is not None else ParseStats()
    for lineno, line in enumerate(lines, start=1):
        stats.lines = lineno
        try:
            triple = parse_line(line, lineno)
        except NTriplesError:
            if strict:
                raise
            stats.skipped += 1
            continue
        if triple is not None:
            stats.triples += 1
            yield triple


def read_ntriples(path: str | Path, strict: bool = True,
                  stats: ParseStats | None = None) -> list[Triple]:
    with open(path, encoding="utf-8") as fh:
        return list(iter_triples(fh, strict=strict, stats=stats))


def format_triple(triple: Triple) -> str:
    s, p, o = triple
    return f"{to_ntriples(s)} {to_ntriples(p)} {to_ntriples(o)} ."


def write_ntriples(triples: Iterable[Triple], out: str | Path | TextIO) -> int:
    n = 0
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8") as fh:
            return write_ntriples(triples, fh)
    for triple in triples:
        out.write(format_triple(triple) + "\n")
        n += 1
    return n

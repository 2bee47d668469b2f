"""Word syntax shared by the solvers and the CLI.

A word is a list of ``(generator, exponent)`` pairs.  Letters are written
``x`` or ``x^<int>``; an uppercase letter means the inverse; whitespace is
ignored.  Baumslag words use the generators a, t, b and Higman words use
a1..a4.
"""

from __future__ import annotations

import enum
import re


class ParseError(ValueError):
    pass


class Verdict(enum.Enum):
    TRIVIAL = "TRIVIAL"
    NONTRIVIAL = "NONTRIVIAL"
    CAP_EXCEEDED = "CAP_EXCEEDED"


_BS_TOKEN = re.compile(r"([aAtTbB])(?:\^(-?\d+))?")
_H_TOKEN = re.compile(r"([aA])([1-4])(?:\^(-?\d+))?")


def _scan(text: str, pattern: re.Pattern, build) -> list:
    text = "".join(text.split())
    out = []
    pos = 0
    while pos < len(text):
        m = pattern.match(text, pos)
        if not m:
            raise ParseError(f"unexpected {text[pos:pos + 10]!r} at offset {pos}")
        tok = build(m)
        if tok[1]:
            out.append(tok)
        pos = m.end()
    return out


def parse_baumslag(text: str) -> list[tuple[str, int]]:
    def build(m):
        letter, exp = m.group(1), int(m.group(2) or 1)
        if letter.isupper():
            exp = -exp
        return letter.lower(), exp

    return _scan(text, _BS_TOKEN, build)


def parse_higman(text: str) -> list[tuple[int, int]]:
    def build(m):
        exp = int(m.group(3) or 1)
        if m.group(1) == "A":
            exp = -exp
        return int(m.group(2)), exp

    return _scan(text, _H_TOKEN, build)


def inverse(word: list[tuple]) -> list[tuple]:
    return [(g, -e) for g, e in reversed(word)]


def free_reduce(word: list[tuple]) -> list[tuple]:
    out: list[tuple] = []
    for g, e in word:
        if out and out[-1][0] == g:
            e += out.pop()[1]
        if e:
            out.append((g, e))
    return out


def expand(word: list[tuple]) -> list[tuple]:
    """Spell every power out as single letters with exponent +-1."""
    return [(g, 1 if e > 0 else -1) for g, e in word for _ in range(abs(e))]


def format_word(word: list[tuple]) -> str:
    parts = []
    for g, e in word:
        name = str(g) if isinstance(g, str) else f"a{g}"
        parts.append(name if e == 1 else f"{name}^{e}")
    return " ".join(parts)

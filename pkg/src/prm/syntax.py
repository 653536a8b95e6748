"""Concrete syntax for terms.

    term := "Z" "(" nat ")"
          | "S"
          | "P" "(" nat "," nat ")"
          | "C" "(" term ";" term { "," term } ")"
          | "R" "(" term ";" term ")"

Whitespace is insignificant on input; ``render`` emits none.
"""

from __future__ import annotations

from .terms import ArityError, Comp, PrimRec, Proj, Succ, Term, Zero, arity


class ParseError(SyntaxError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def location(self, pos: int | None = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        before = self.text[:pos]
        line = before.count("\n") + 1
        column = pos - (before.rfind("\n") + 1) + 1
        return line, column

    def error(self, message: str, pos: int | None = None) -> ParseError:
        return ParseError(message, *self.location(pos))

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        got = self.peek()
        if got != ch:
            shown = repr(got) if got else "end of input"
            raise self.error(f"expected {ch!r}, found {shown}")
        self.pos += 1

    def nat(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.error("expected a natural number")
        return int(self.text[start:self.pos])

    def term(self) -> Term:
        head = self.peek()
        if head == "S":
            self.pos += 1
            return Succ()
        if head == "Z":
            self.pos += 1
            self.expect("(")
            n = self.nat()
            self.expect(")")
            return Zero(n)
        if head == "P":
            self.pos += 1
            self.expect("(")
            i = self.nat()
            self.expect(",")
            n = self.nat()
            self.expect(")")
            return Proj(i, n)
        if head == "C":
            self.pos += 1
            self.expect("(")
            outer = self.term()
            self.expect(";")
            inners = [self.term()]
            while self.peek() == ",":
                self.pos += 1
                inners.append(self.term())
            self.expect(")")
            return Comp(outer, tuple(inners))
        if head == "R":
            self.pos += 1
            self.expect("(")
            base = self.term()
            self.expect(";")
            step = self.term()
            self.expect(")")
            return PrimRec(base, step)
        shown = repr(head) if head else "end of input"
        raise self.error(f"expected a term, found {shown}")


def parse(text: str) -> Term:
    """Parse and validate a term.

    Raises ``ParseError`` for syntax errors and ``ArityError`` for terms that
    parse but are not well-formed (e.g. ``P(3,2)``).
    """
    parser = _Parser(text)
    term = parser.term()
    if parser.peek():
        raise parser.error("trailing input")
    arity(term)
    return term


def render(term: Term) -> str:
    """Canonical text of a term (no whitespace)."""
    parts: list[str] = []
    _render(term, parts)
    return "".join(parts)


def _render(term: Term, out: list[str]) -> None:
    if isinstance(term, Succ):
        out.append("S")
    elif isinstance(term, Zero):
        out.append(f"Z({term.n})")
    elif isinstance(term, Proj):
        out.append(f"P({term.i},{term.n})")
    elif isinstance(term, Comp):
        out.append("C(")
        _render(term.outer, out)
        out.append(";")
        for k, inner in enumerate(term.inners):
            if k:
                out.append(",")
            _render(inner, out)
        out.append(")")
    elif isinstance(term, PrimRec):
        out.append("R(")
        _render(term.base, out)
        out.append(";")
        _render(term.step, out)
        out.append(")")
    else:
        raise TypeError(f"not a term: {term!r}")


__all__ = ["ParseError", "ArityError", "parse", "render"]

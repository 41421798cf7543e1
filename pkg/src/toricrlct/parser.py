"""Recursive-descent parser for polynomial text.

Grammar (whitespace ignored)::

    poly   := ['+'|'-'] term (('+'|'-') term)*
    term   := item ('*' item)*
    item   := coeff | ident ['^' ['-'] int] | '(' poly ')' ['^' int]
    coeff  := int ['/' posint]
    ident  := letter (letter | digit | '_')*
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .polynomial import LaurentPolynomial

__all__ = ["parse", "PolynomialSyntaxError"]


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


# intermediate form: {((name, exp), ...) sorted by name: Fraction}
def _mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            m = dict(ka)
            for v, e in kb:
                m[v] = m.get(v, 0) + e
            key = tuple(sorted((v, e) for v, e in m.items() if e))
            out[key] = out.get(key, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def _add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + sign * c
    return {k: c for k, c in out.items() if c}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.seen: list[str] = []

    def error(self, msg: str, pos: int | None = None):
        raise PolynomialSyntaxError(msg, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            ch = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            self.error(f"expected an integer, found {ch!r}")
        return int(self.text[start:self.pos])

    def poly(self) -> dict:
        sign = -1 if self.eat("-") else (self.eat("+") and 1) or 1
        acc = _add({}, self.term(), sign)
        while True:
            if self.eat("+"):
                acc = _add(acc, self.term())
            elif self.eat("-"):
                acc = _add(acc, self.term(), -1)
            else:
                return acc

    def term(self) -> dict:
        acc = self.item()
        while self.eat("*"):
            acc = _mul(acc, self.item())
        return acc

    def item(self) -> dict:
        ch = self.peek()
        if ch.isdigit():
            num = self.integer()
            if self.eat("/"):
                at = self.pos
                den = self.integer()
                if den == 0:
                    self.error("zero denominator", at)
                return {(): Fraction(num, den)}
            return {(): Fraction(num)}
        if ch.isalpha():
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self.pos += 1
            name = self.text[start:self.pos]
            if name not in self.seen:
                self.seen.append(name)
            exp = 1
            if self.eat("^"):
                neg = self.eat("-")
                exp = -self.integer() if neg else self.integer()
            return {((name, exp),): Fraction(1)} if exp else {(): Fraction(1)}
        if ch == "(":
            self.pos += 1
            inner = self.poly()
            if not self.eat(")"):
                self.error("expected ')'")
            if self.eat("^"):
                if self.peek() == "-":
                    self.error("negative powers of a parenthesized expression are not supported")
                k = self.integer()
                out: dict = {(): Fraction(1)}
                for _ in range(k):
                    out = _mul(out, inner)
                return out
            return inner
        if not ch:
            self.error("unexpected end of input")
        self.error(f"unexpected character {ch!r}")


def parse(text: str, variables: Sequence[str] | None = None) -> LaurentPolynomial:
    """Parse ``text`` into a canonical :class:`LaurentPolynomial`.

    Variables are ordered as given in ``variables`` (extra names found in the
    text are appended) or else by first appearance.
    """
    p = _Parser(text)
    if not p.peek():
        p.error("empty polynomial")
    body = p.poly()
    if p.peek():
        p.error(f"unexpected character {p.peek()!r}")
    order = list(variables) if variables else []
    for v in p.seen:
        if v not in order:
            order.append(v)
    index = {v: i for i, v in enumerate(order)}
    terms = {}
    for key, c in body.items():
        exp = [0] * len(order)
        for v, e in key:
            exp[index[v]] = e
        terms[tuple(exp)] = c
    return LaurentPolynomial(terms, order)

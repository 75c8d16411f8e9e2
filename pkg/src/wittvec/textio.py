"""Tokenizer and parser for the polynomial expression grammar.

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := coefficient | var ('^' natural)?

A leading sign on the first term is accepted so that integer tables with
negative coefficients round-trip. Whitespace is ignored.
"""

import re

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\^|\*|\+|-))")


def tokenize(text, line=1):
    """Split ``text`` into ``(kind, value, column)`` triples, kind in {'num', 'name', 'op'}."""
    tokens = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            col = pos + 1
            while col <= len(text) and text[col - 1].isspace():
                col += 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", line, col)
        num, name, op = match.groups()
        col = match.start(match.lastindex) + 1
        if num is not None:
            tokens.append(("num", int(num), col))
        elif name is not None:
            tokens.append(("name", name, col))
        else:
            tokens.append(("op", op, col))
        pos = match.end()
    return tokens


def parse_terms(text, variables, line=1, allow_t=True):
    """Parse ``text`` into a list of ``(coefficient, t_exponent, exponents)``.

    ``variables`` lists the accepted variable names in order; ``exponents`` is
    a tuple aligned with it. Like terms are *not* merged here.
    """
    index = {name: i for i, name in enumerate(variables)}
    tokens = tokenize(text, line)
    if not tokens:
        raise ParseError("empty expression", line, 1)
    pos = 0
    terms = []
    sign = 1
    if tokens[0][0] == "op" and tokens[0][1] in "+-":
        sign = -1 if tokens[0][1] == "-" else 1
        pos = 1

    def expect_factor_start(p):
        if p >= len(tokens):
            col = tokens[-1][2] + len(str(tokens[-1][1]))
            raise ParseError("expression ends unexpectedly", line, col)
        kind, value, col = tokens[p]
        if kind == "op":
            raise ParseError(f"unexpected {value!r}", line, col)

    while True:
        coef = sign
        texp = 0
        exps = [0] * len(variables)
        expect_factor_start(pos)
        while True:
            kind, value, col = tokens[pos]
            pos += 1
            if kind == "num":
                coef *= value
            else:
                power = 1
                if pos < len(tokens) and tokens[pos][:2] == ("op", "^"):
                    if pos + 1 >= len(tokens) or tokens[pos + 1][0] != "num":
                        c = tokens[pos][2] + 1
                        raise ParseError("expected a natural exponent after '^'", line, c)
                    power = tokens[pos + 1][1]
                    pos += 2
                if value == "t" and allow_t:
                    texp += power
                elif value in index:
                    exps[index[value]] += power
                else:
                    raise ParseError(f"unknown variable {value!r}", line, col)
            if pos < len(tokens) and tokens[pos][0] == "op" and tokens[pos][1] == "*":
                pos += 1
                expect_factor_start(pos)
                continue
            break
        terms.append((coef, texp, tuple(exps)))
        if pos == len(tokens):
            return terms
        kind, value, col = tokens[pos]
        if kind != "op" or value not in "+-":
            raise ParseError(f"unexpected {value!r}", line, col)
        sign = -1 if value == "-" else 1
        pos += 1

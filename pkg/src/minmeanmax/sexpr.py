"""Text form for expression trees.

The grammar is a tiny s-expression language::

    expr  := "0" | "s"<uint> | "(min " expr { " " expr }+ ")"
           | "(max " expr { " " expr }+ ")"
           | "(diff " expr " " expr ")"
           | "(mean " alpha " " expr { " " expr }+ ")"
    alpha := "-inf" | "inf" | decimal

``format_expr`` emits the canonical single-line form and ``parse_expr``
accepts any whitespace layout, reporting errors with 1-based line and
column positions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .expr import Diff, Expr, Input, Max, Mean, Min, Zero
from .means import Alpha

__all__ = ["ParseError", "parse_expr", "format_expr", "tokenize", "Token"]

_INPUT_RE = re.compile(r"s(\d+)\Z")


class ParseError(ValueError):
    """Syntax error carrying a 1-based source location."""

    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    """Split into parens and atoms, tracking line/column of each."""
    tokens: list[Token] = []
    line, col = 1, 1
    atom_start: tuple[int, int] | None = None
    atom: list[str] = []

    def flush() -> None:
        nonlocal atom_start
        if atom_start is not None:
            tokens.append(Token("".join(atom), *atom_start))
            atom.clear()
            atom_start = None

    for ch in text:
        if ch == "\n":
            flush()
            line += 1
            col = 1
            continue
        if ch.isspace():
            flush()
        elif ch in "()":
            flush()
            tokens.append(Token(ch, line, col))
        else:
            if atom_start is None:
                atom_start = (line, col)
            atom.append(ch)
        col += 1
    flush()
    return tokens


def parse_expr(text: str) -> Expr:
    """Parse one expression; trailing non-whitespace is an error."""
    tokens = tokenize(text)
    if not tokens:
        raise ParseError("empty input", 1, 1)
    expr, pos = _parse(tokens, 0)
    if pos != len(tokens):
        tok = tokens[pos]
        raise ParseError(f"trailing input: {tok.text!r}", tok.line, tok.col)
    return expr


def _end_location(tokens: list[Token]) -> tuple[int, int]:
    last = tokens[-1]
    return last.line, last.col + len(last.text)


def _take(tokens: list[Token], pos: int, context: str) -> Token:
    if pos >= len(tokens):
        line, col = _end_location(tokens)
        raise ParseError(f"unexpected end of input ({context})", line, col)
    return tokens[pos]


def _parse(tokens: list[Token], pos: int) -> tuple[Expr, int]:
    tok = _take(tokens, pos, "expected an expression")
    if tok.text == ")":
        raise ParseError("unexpected ')'", tok.line, tok.col)
    if tok.text != "(":
        return _parse_atom(tok), pos + 1

    op = _take(tokens, pos + 1, "expected an operator after '('")
    if op.text in "()":
        raise ParseError("expected an operator name", op.line, op.col)
    pos += 2

    alpha: Alpha | None = None
    if op.text == "mean":
        alpha_tok = _take(tokens, pos, "expected an exponent after 'mean'")
        if alpha_tok.text in "()":
            raise ParseError("expected an exponent literal", alpha_tok.line, alpha_tok.col)
        try:
            alpha = Alpha.from_literal(alpha_tok.text)
        except ValueError as exc:
            raise ParseError(str(exc), alpha_tok.line, alpha_tok.col) from None
        pos += 1
    elif op.text not in ("min", "max", "diff"):
        raise ParseError(f"unknown operator {op.text!r}", op.line, op.col)

    operands: list[Expr] = []
    while True:
        tok = _take(tokens, pos, f"unclosed '{op.text}' form")
        if tok.text == ")":
            pos += 1
            break
        operand, pos = _parse(tokens, pos)
        operands.append(operand)

    if op.text == "diff":
        if len(operands) != 2:
            raise ParseError(
                f"diff takes exactly 2 operands, got {len(operands)}", op.line, op.col
            )
        return Diff(operands[0], operands[1]), pos
    if len(operands) < 2:
        raise ParseError(
            f"{op.text} needs at least 2 operands, got {len(operands)}", op.line, op.col
        )
    if op.text == "min":
        return Min(*operands), pos
    if op.text == "max":
        return Max(*operands), pos
    assert alpha is not None
    return Mean(alpha, *operands), pos


def _parse_atom(tok: Token) -> Expr:
    if tok.text == "0":
        return Zero()
    m = _INPUT_RE.match(tok.text)
    if m:
        return Input(int(m.group(1)))
    raise ParseError(f"unexpected token {tok.text!r}", tok.line, tok.col)


def format_expr(e: Expr) -> str:
    """Canonical single-line text for ``e``; inverse of :func:`parse_expr`."""
    if isinstance(e, Zero):
        return "0"
    if isinstance(e, Input):
        return f"s{e.index}"
    if isinstance(e, Min):
        return "(min " + " ".join(format_expr(c) for c in e.children) + ")"
    if isinstance(e, Max):
        return "(max " + " ".join(format_expr(c) for c in e.children) + ")"
    if isinstance(e, Diff):
        return f"(diff {format_expr(e.left)} {format_expr(e.right)})"
    if isinstance(e, Mean):
        body = " ".join(format_expr(c) for c in e.children)
        return f"(mean {e.alpha.literal()} {body})"
    raise TypeError(f"not an expression node: {e!r}")

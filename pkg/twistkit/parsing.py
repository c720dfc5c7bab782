"""Text grammar shared by the CLI, the HTTP API and the pretty-printer.

Grammar (one flat grammar for every object kind)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := rational | coord | coord '^' uint | '(' expr ')' | basis
    basis  := 'd' coord ('^' 'd' coord)*        differential form
            | '@' coord ('^' '@' coord)*        multivector (@x1 is d/dx1)

A term holds at most one basis chain; every term of an expression must have the
same kind and degree. ``pretty`` output always parses back to an equal object.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .errors import DegreeError, DimensionMismatchError, ParseError, UnknownCoordinateError
from .exterior import DifferentialForm, GradedField, Multivector
from .poly import Chart, Polynomial

logger = logging.getLogger(__name__)

Expression = Union[Polynomial, DifferentialForm, Multivector]

_TOKEN_PATTERN = re.compile(
    r"(?P<space>\s+)"
    r"|(?P<number>\d+(?:/\d+)?)"
    r"|(?P<vector>@[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[\^*+\-()])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # number, vector, ident, op, end
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    """Split ``text`` into tokens with 1-based line/column positions.

    Raises:
        ParseError: On a character outside the grammar
    """
    tokens: List[Token] = []
    line, line_start, position = 1, 0, 0
    while position < len(text):
        match = _TOKEN_PATTERN.match(text, position)
        if match is None:
            raise ParseError(
                f"Unexpected character {text[position]!r}", line, position - line_start + 1
            )
        kind = match.lastgroup or ""
        value = match.group()
        if kind == "space":
            for offset, char in enumerate(value):
                if char == "\n":
                    line += 1
                    line_start = position + offset + 1
        else:
            tokens.append(Token(kind, value, line, position - line_start + 1))
        position = match.end()
    tokens.append(Token("end", "", line, position - line_start + 1))
    return tokens


@dataclass
class _Term:
    coefficient: Polynomial
    kind: Optional[str] = None  # None (scalar), "form" or "vector"
    indices: Tuple[int, ...] = ()
    token: Optional[Token] = None


class _Parser:
    """Recursive-descent parser over a token list."""

    def __init__(self, text: str, chart: Chart):
        self.chart = chart
        self.tokens = tokenize(text)
        self.position = 0

    # -- token helpers -------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.position + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.peek()
        self.position += 1
        return token

    def at_op(self, *ops: str) -> bool:
        token = self.peek()
        return token.kind == "op" and token.text in ops

    def expect_op(self, op: str) -> Token:
        token = self.peek()
        if not self.at_op(op):
            found = token.text or "end of input"
            raise ParseError(f"Expected '{op}', found '{found}'", token.line, token.column)
        return self.advance()

    def form_basis_index(self, token: Token) -> Optional[int]:
        """Chart index if ``token`` is ``d<coord>``, else None."""
        if token.kind != "ident" or token.text in self.chart:
            return None
        if token.text.startswith("d") and token.text[1:] in self.chart:
            return self.chart.index(token.text[1:])
        return None

    # -- grammar ------------------------------------------------------

    def parse(self) -> List[_Term]:
        terms = self.parse_sum()
        token = self.peek()
        if token.kind != "end":
            raise ParseError(f"Unexpected '{token.text}'", token.line, token.column)
        return terms

    def parse_sum(self) -> List[_Term]:
        negative = False
        if self.at_op("+", "-"):
            negative = self.advance().text == "-"
        terms = [self.parse_term(negative)]
        while self.at_op("+", "-"):
            negative = self.advance().text == "-"
            terms.append(self.parse_term(negative))
        return terms

    def parse_term(self, negative: bool) -> _Term:
        term = _Term(Polynomial.constant(self.chart, -1 if negative else 1), token=self.peek())
        self.parse_factor(term)
        while self.at_op("*"):
            self.advance()
            self.parse_factor(term)
        return term

    def parse_factor(self, term: _Term) -> None:
        token = self.peek()
        if token.kind == "number":
            self.advance()
            try:
                value = Fraction(token.text)
            except ZeroDivisionError:
                raise ParseError(
                    f"Zero denominator in {token.text!r}", token.line, token.column
                ) from None
            term.coefficient = term.coefficient * value
        elif token.kind == "vector":
            self.attach_basis(term, "vector", self.parse_chain("vector"), token)
        elif self.form_basis_index(token) is not None:
            self.attach_basis(term, "form", self.parse_chain("form"), token)
        elif token.kind == "ident":
            self.advance()
            if token.text not in self.chart:
                raise UnknownCoordinateError(token.text, self.chart.names)
            factor = Polynomial.coordinate(self.chart, token.text)
            if self.at_op("^"):
                self.advance()
                exponent = self.peek()
                if exponent.kind != "number" or "/" in exponent.text:
                    raise ParseError(
                        f"Expected a nonnegative integer exponent after '{token.text}^'",
                        exponent.line,
                        exponent.column,
                    )
                self.advance()
                factor = factor ** int(exponent.text)
            term.coefficient = term.coefficient * factor
        elif self.at_op("("):
            self.advance()
            inner = self.parse_sum()
            self.expect_op(")")
            for piece in inner:
                if piece.kind is not None:
                    assert piece.token is not None
                    raise ParseError(
                        "Basis elements are not allowed inside parentheses",
                        piece.token.line,
                        piece.token.column,
                    )
            total = Polynomial.zero(self.chart)
            for piece in inner:
                total = total + piece.coefficient
            term.coefficient = term.coefficient * total
        else:
            found = token.text or "end of input"
            raise ParseError(f"Unexpected '{found}'", token.line, token.column)

    def parse_chain(self, kind: str) -> Tuple[int, ...]:
        indices = [self.chain_index(self.advance(), kind)]
        while self.at_op("^") and self.chain_index(self.peek(1), kind, strict=False) is not None:
            self.advance()
            indices.append(self.chain_index(self.advance(), kind))
        return tuple(indices)

    def chain_index(self, token: Token, kind: str, strict: bool = True) -> Optional[int]:
        if kind == "vector" and token.kind == "vector":
            return self.chart.index(token.text[1:])
        if kind == "form":
            index = self.form_basis_index(token)
            if index is not None:
                return index
        if strict:
            raise ParseError(f"Expected a basis element, found '{token.text}'",
                             token.line, token.column)
        return None

    def attach_basis(self, term: _Term, kind: str, indices: Tuple[int, ...], token: Token) -> None:
        if term.kind is not None:
            raise ParseError("A term may contain at most one basis chain", token.line, token.column)
        term.kind = kind
        term.indices = indices


def _assemble(terms: List[_Term], chart: Chart) -> Expression:
    kinds = {(term.kind, len(term.indices)) for term in terms}
    if len(kinds) > 1:
        first = terms[0]
        for term in terms[1:]:
            if (term.kind, len(term.indices)) != (first.kind, len(first.indices)):
                assert term.token is not None
                raise ParseError(
                    "All terms must have the same kind and degree",
                    term.token.line,
                    term.token.column,
                )
    kind, degree = kinds.pop()
    if kind is None:
        total = Polynomial.zero(chart)
        for term in terms:
            total = total + term.coefficient
        return total
    cls = DifferentialForm if kind == "form" else Multivector
    components: Dict[Tuple[int, ...], Polynomial] = {}
    for term in terms:
        field = cls.from_components(chart, degree, {term.indices: term.coefficient})
        for key, value in field.items():
            components[key] = components[key] + value if key in components else value
    return cls(chart, degree, components)


def parse(text: str, chart: Chart) -> Expression:
    """Parse a polynomial, differential form or multivector on ``chart``.

    Raises:
        ParseError: On grammar violations (with line and column)
        UnknownCoordinateError: On identifiers that are not chart coordinates
    """
    logger.debug(f"Parsing {text!r} on chart {chart}")
    return _assemble(_Parser(text, chart).parse(), chart)


def parse_polynomial(text: str, chart: Chart) -> Polynomial:
    result = parse(text, chart)
    if not isinstance(result, Polynomial):
        raise DegreeError(f"Expected a polynomial, got a {type(result).__name__} of degree {result.degree}")
    return result


def _parse_graded(text: str, chart: Chart, cls: type, degree: Optional[int]) -> GradedField:
    result = parse(text, chart)
    if isinstance(result, Polynomial):
        # "0" stands for the zero object of any degree; other scalars are 0-forms
        if result.is_zero and degree is not None:
            return cls.zero(chart, degree)
        result = cls(chart, 0, {(): result})
    if not isinstance(result, cls):
        raise DegreeError(f"Expected a {cls.__name__}, got a {type(result).__name__}")
    if degree is not None and result.degree != degree:
        raise DegreeError(f"Expected degree {degree}, got {result.degree}")
    return result


def parse_form(text: str, chart: Chart, degree: Optional[int] = None) -> DifferentialForm:
    form = _parse_graded(text, chart, DifferentialForm, degree)
    assert isinstance(form, DifferentialForm)
    return form


def parse_multivector(text: str, chart: Chart, degree: Optional[int] = None) -> Multivector:
    field = _parse_graded(text, chart, Multivector, degree)
    assert isinstance(field, Multivector)
    return field


def parse_point(text: str, dim: Optional[int] = None) -> List[float]:
    """Parse a comma-separated state such as ``1,0,0,0,0,0``.

    Raises:
        ParseError: If an entry is not a number
        DimensionMismatchError: If ``dim`` is given and the length differs
    """
    values: List[float] = []
    column = 1
    for entry in text.split(","):
        stripped = entry.strip()
        try:
            values.append(float(Fraction(stripped)))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"Invalid number {stripped!r}", 1, column) from None
        column += len(entry) + 1
    if dim is not None and len(values) != dim:
        raise DimensionMismatchError(dim, len(values), "start point")
    return values


def pretty(obj: Expression) -> str:
    """Canonical text of any symbolic object."""
    return obj.pretty()

"""
Recursive-descent parser for polynomial expressions and families.

Grammar (whitespace ignored)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary | unary)*      # juxtaposition multiplies
    unary   := ('+' | '-') unary | power
    power   := primary ('^' ['-'] uint)?
    primary := uint | 'pi' | var | '(' expr ')'
    var     := 'u' uint | 's' | 't' | 'w'

Division is only allowed by unit coefficients (r * pi^e).
"""

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from .coeff import Coeff, CoefficientFieldError
from .polynomial import MultiPoly, default_names

logger = logging.getLogger(__name__)

ALIAS_ORDER = ('s', 't', 'w')
KNOWN_CONSTANTS = ('e', 'sqrt', 'sqrt2', 'sqrt3', 'i', 'tau')


class PolynomialSyntaxError(ValueError):
    """Syntax error with the 0-based character position of the offending token."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        pointer = f"\n  {text}\n  {' ' * position}^" if text else ""
        super().__init__(f"{message} at position {position}{pointer}")


class UnknownVariableError(PolynomialSyntaxError):
    """Raised for identifiers outside the variable set."""


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    position: int


class PolynomialParser:
    """Parse polynomial text into :class:`MultiPoly` values."""

    _token_pattern = re.compile(
        r'\s*(?:(?P<number>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))'
    )

    def __init__(self, d: int, names: Optional[Sequence[str]] = None):
        """
        Args:
            d: Number of variables
            names: Variable names (``u1..ud`` or aliases from ``s, t, w``)
        """
        self.d = d
        self.names = tuple(names) if names is not None else default_names(d)
        if len(self.names) != d:
            raise ValueError(f"expected {d} variable names, got {len(self.names)}")
        self._aliases: Dict[str, int] = {
            name: i for i, name in enumerate(self.names) if name in ALIAS_ORDER
        }
        self._text = ""
        self._tokens: List[Token] = []
        self._index = 0

    # Tokenizer ----------------------------------------------------------

    @classmethod
    def normalize(cls, text: str) -> str:
        return text.replace('−', '-').replace('π', 'pi').replace('·', '*')

    @classmethod
    def tokenize(cls, text: str) -> List[Token]:
        tokens = []
        position = 0
        stripped_end = len(text.rstrip())
        while position < stripped_end:
            match = cls._token_pattern.match(text, position)
            if not match:
                offset = position + (len(text[position:]) - len(text[position:].lstrip()))
                raise PolynomialSyntaxError(f"unexpected character {text[offset]!r}", offset, text)
            kind = match.lastgroup or 'op'
            tokens.append(Token(kind, match.group(kind), match.start(kind)))
            position = match.end()
        tokens.append(Token('end', '', len(text)))
        return tokens

    # Entry points -------------------------------------------------------

    def parse(self, text: str) -> MultiPoly:
        self._text = self.normalize(text)
        self._tokens = self.tokenize(self._text)
        self._index = 0
        if self._peek().kind == 'end':
            raise PolynomialSyntaxError("empty expression", 0, self._text)
        result = self._expr()
        token = self._peek()
        if token.kind != 'end':
            raise PolynomialSyntaxError(f"unexpected {token.value!r}", token.position, self._text)
        return result.with_names(self.names)

    # Grammar ------------------------------------------------------------

    def _peek(self) -> Token:
        return self._tokens[self._index]

    def _advance(self) -> Token:
        token = self._tokens[self._index]
        self._index += 1
        return token

    def _expect(self, value: str) -> Token:
        token = self._advance()
        if token.value != value:
            found = repr(token.value) if token.kind != 'end' else "end of input"
            raise PolynomialSyntaxError(f"expected {value!r}, found {found}", token.position, self._text)
        return token

    def _expr(self) -> MultiPoly:
        result = self._term()
        while self._peek().value in ('+', '-'):
            op = self._advance().value
            right = self._term()
            result = result + right if op == '+' else result - right
        return result

    def _starts_primary(self, token: Token) -> bool:
        return token.kind == 'name' or token.value == '('

    def _term(self) -> MultiPoly:
        result = self._unary()
        while True:
            token = self._peek()
            if token.value == '*':
                self._advance()
                result = result * self._unary()
            elif token.value == '/':
                self._advance()
                divisor_token = self._peek()
                divisor = self._unary()
                result = self._divide(result, divisor, divisor_token)
            elif self._starts_primary(token):
                result = result * self._unary()
            else:
                return result

    def _divide(self, numerator: MultiPoly, divisor: MultiPoly, token: Token) -> MultiPoly:
        if not divisor.is_constant():
            raise CoefficientFieldError(
                f"division by non-constant {divisor} at position {token.position}"
            )
        value = divisor.constant_term
        if not value:
            raise CoefficientFieldError(f"division by zero at position {token.position}")
        if not value.is_unit():
            raise CoefficientFieldError(
                f"division by non-unit coefficient {value} at position {token.position}"
            )
        return numerator.divide_by_coefficient(value)

    def _unary(self) -> MultiPoly:
        token = self._peek()
        if token.value == '-':
            self._advance()
            return -self._unary()
        if token.value == '+':
            self._advance()
            return self._unary()
        return self._power()

    def _power(self) -> MultiPoly:
        is_pi = self._peek().kind == 'name' and self._peek().value == 'pi'
        base = self._primary()
        if self._peek().value != '^':
            return base
        self._advance()
        negative = False
        if self._peek().value == '-':
            self._advance()
            negative = True
        token = self._advance()
        if token.kind != 'number':
            raise PolynomialSyntaxError("exponent must be an integer", token.position, self._text)
        exponent = int(token.value)
        if negative:
            if not is_pi:
                raise PolynomialSyntaxError(
                    "negative exponents are only allowed on pi", token.position, self._text
                )
            return MultiPoly.constant(self.d, Coeff.monomial(1, -exponent), self.names)
        return base ** exponent

    def _primary(self) -> MultiPoly:
        token = self._advance()
        if token.kind == 'number':
            return MultiPoly.constant(self.d, int(token.value), self.names)
        if token.kind == 'name':
            return self._name(token)
        if token.value == '(':
            inner = self._expr()
            self._expect(')')
            return inner
        found = repr(token.value) if token.kind != 'end' else "end of input"
        raise PolynomialSyntaxError(f"unexpected {found}", token.position, self._text)

    def _name(self, token: Token) -> MultiPoly:
        name = token.value
        if name == 'pi':
            return MultiPoly.constant(self.d, Coeff.monomial(1, 1), self.names)
        match = re.fullmatch(r'u(\d+)', name)
        if match:
            index = int(match.group(1))
            if not 1 <= index <= self.d or (self.names and self.names[index - 1] != name):
                raise UnknownVariableError(
                    f"unknown variable {name!r} for {self.d} variables", token.position, self._text
                )
            return MultiPoly.variable(self.d, index - 1, self.names)
        if name in self._aliases:
            return MultiPoly.variable(self.d, self._aliases[name], self.names)
        if name in KNOWN_CONSTANTS:
            raise UnknownVariableError(
                f"{name!r} is not supported; pi is the only transcendental", token.position, self._text
            )
        raise UnknownVariableError(f"unknown variable {name!r}", token.position, self._text)


def infer_names(text: str, d: Optional[int] = None) -> Tuple[str, ...]:
    """
    Choose variable names for a text: ``u1..ud`` or the aliases it uses.

    Aliases are indexed in the fixed order s < t < w over the letters present.
    """
    tokens = PolynomialParser.tokenize(PolynomialParser.normalize(text))
    identifiers = [t for t in tokens if t.kind == 'name' and t.value != 'pi']
    u_indices = [int(t.value[1:]) for t in identifiers if re.fullmatch(r'u\d+', t.value)]
    aliases = sorted({t.value for t in identifiers if t.value in ALIAS_ORDER}, key=ALIAS_ORDER.index)
    if u_indices and aliases:
        token = next(t for t in identifiers if t.value in ALIAS_ORDER)
        raise UnknownVariableError("cannot mix u-variables with s, t, w aliases", token.position, text)
    if aliases:
        if d is not None and d > len(aliases):
            # Pad with the unused aliases so d variables exist.
            extra = [a for a in ALIAS_ORDER if a not in aliases][: d - len(aliases)]
            aliases = sorted(aliases + extra, key=ALIAS_ORDER.index)
            if len(aliases) < d:
                return default_names(d)
        if d is not None and d < len(aliases):
            token = next(t for t in identifiers if t.value == aliases[-1])
            raise UnknownVariableError(
                f"{len(aliases)} aliases used but only {d} variables", token.position, text
            )
        return tuple(aliases)
    width = max(u_indices, default=0)
    if d is not None:
        if width > d:
            token = next(t for t in identifiers if re.fullmatch(r'u\d+', t.value) and int(t.value[1:]) > d)
            raise UnknownVariableError(f"unknown variable {token.value!r} for {d} variables", token.position, text)
        width = d
    return default_names(max(width, 1) if d is None else width)


def parse_poly(text: str, d: int, names: Optional[Sequence[str]] = None) -> MultiPoly:
    """
    Parse one polynomial in d variables.

    Raises:
        PolynomialSyntaxError: malformed text (with position)
        UnknownVariableError: variable outside the d variables
        CoefficientFieldError: division by a non-unit coefficient
    """
    if names is None:
        names = infer_names(text, d)
    return PolynomialParser(d, names).parse(text)


def split_family(text: str) -> List[str]:
    parts = [part.strip() for part in PolynomialParser.normalize(text).strip().strip('{}').split(',')]
    if not parts or any(not part for part in parts):
        raise PolynomialSyntaxError("empty family member", 0, text)
    return parts


def parse_family(text: str, d: Optional[int] = None) -> 'PolyFamily':
    """
    Parse a comma-separated family such as ``"t, 2t, t^2"``.

    Variable names are inferred from the whole family so that every member
    shares one indexing (``"s+t, s-t, 2s"`` has s = u1, t = u2).
    """
    from .family import PolyFamily

    members = split_family(text)
    names = infer_names(" + ".join(members), d)
    width = len(names)
    parser = PolynomialParser(width, names)
    polys = []
    offset = 0
    for member in members:
        try:
            polys.append(parser.parse(member))
        except PolynomialSyntaxError as e:
            # Report the position within the full family text.
            start = text.find(member, offset)
            position = e.position + max(start, 0)
            raise type(e)(str(e).split(" at position")[0], position, text) from None
        offset = max(offset, text.find(member, offset) + len(member))
    logger.debug(f"Parsed family of {len(polys)} members in {width} variables")
    return PolyFamily(width, polys, names)

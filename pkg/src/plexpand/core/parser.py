#!/usr/bin/env python3
"""
Lecture du langage de description des fonctions

Grammaire :
    fichier   := expr ((';' | fin de ligne) expr)*
    expr      := terme (('+' | '-') terme)*
    terme     := unaire (('*' | '/') unaire)*
    unaire    := '-' unaire | primaire
    primaire  := nombre | xK | fonction '(' expr (',' expr)* ')' | '(' expr ')'

Les fins de ligne entre parenthèses sont des espaces ; '#' commence un commentaire
jusqu'à la fin de la ligne.

Auteur: Hugues Le Gendre
Date: 2025
"""

import re
from dataclasses import dataclass
from pathlib import Path

from ..utils.logging import LoggingUtils
from .elementals import OpKind
from .errors import ArityError, ParseError, UnknownIdentifier
from .tape import EvalProcedure, TapeBuilder

_logger = LoggingUtils.setup_simple_logger("Parser")

_TOKEN_PATTERN = re.compile(
    r"""
    (?P<space>[ \t\r]+)
    | (?P<comment>\#[^\n]*)
    | (?P<newline>\n)
    | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
    | (?P<op>[-+*/(),;])
    """,
    re.VERBOSE,
)

_INPUT_NAME = re.compile(r"x([1-9]\d*)")

# Fonctions univariées du langage et leur opcode
_UNARY_FUNCTIONS: dict[str, OpKind] = {
    "abs": OpKind.ABS,
    "sin": OpKind.SIN,
    "cos": OpKind.COS,
    "exp": OpKind.EXP,
    "log": OpKind.LOG,
    "sqrt": OpKind.SQRT,
    "sqr": OpKind.SQUARE,
    "recip": OpKind.RECIP,
}
_BINARY_FUNCTIONS: dict[str, OpKind] = {"min": OpKind.MIN, "max": OpKind.MAX}


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    """
    Découpe le texte en jetons, positions comptées à partir de 1.

    Raises:
        ParseError: Caractère inattendu
    """
    tokens: list[Token] = []
    line, line_start, position = 1, 0, 0
    while position < len(text):
        match = _TOKEN_PATTERN.match(text, position)
        column = position - line_start + 1
        if match is None:
            raise ParseError(f"Caractère inattendu {text[position]!r}", line, column)
        kind = match.lastgroup
        if kind == "newline":
            tokens.append(Token("newline", "\n", line, column))
            line, line_start = line + 1, match.end()
        elif kind not in ("space", "comment"):
            tokens.append(Token(kind, match.group(), line, column))
        position = match.end()
    tokens.append(Token("eof", "", line, position - line_start + 1))
    return tokens


def infer_dimension(text: str) -> int:
    """
    Plus grand indice d'entrée xK apparaissant dans le texte (1 au minimum).
    """
    names = (_INPUT_NAME.fullmatch(token.text) for token in tokenize(text) if token.kind == "name")
    indices = [int(match.group(1)) for match in names if match]
    return max(indices, default=1)


class _Parser:
    """Descente récursive sur la liste de jetons, construisant directement la procédure."""

    def __init__(self, tokens: list[Token], builder: TapeBuilder):
        self.tokens = tokens
        self.builder = builder
        self.position = 0
        self.depth = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.position]

    def _advance(self) -> Token:
        token = self.current
        self.position += 1
        # Entre parenthèses, les fins de ligne ne séparent pas les sorties
        while self.depth > 0 and self.current.kind == "newline":
            self.position += 1
        return token

    def _expect(self, text: str) -> Token:
        token = self.current
        if token.text != text or token.kind == "eof":
            found = "fin du texte" if token.kind == "eof" else repr(token.text)
            raise ParseError(f"{text!r} attendu, trouvé {found}", token.line, token.column)
        return self._advance()

    def _is_separator(self) -> bool:
        return self.current.kind == "newline" or self.current.text == ";"

    def parse_file(self) -> list[int]:
        outputs: list[int] = []
        while True:
            while self._is_separator():
                self._advance()
            if self.current.kind == "eof":
                break
            outputs.append(self.parse_expr())
            if self.current.kind != "eof" and not self._is_separator():
                token = self.current
                raise ParseError(f"Jeton inattendu {token.text!r}", token.line, token.column)
        if not outputs:
            token = self.current
            raise ParseError("Aucune expression", token.line, token.column)
        return outputs

    def parse_expr(self) -> int:
        left = self.parse_term()
        while self.current.text in ("+", "-") and self.current.kind == "op":
            kind = OpKind.ADD if self._advance().text == "+" else OpKind.SUB
            left = self.builder.binary(kind, left, self.parse_term())
        return left

    def parse_term(self) -> int:
        left = self.parse_unary()
        while self.current.text in ("*", "/") and self.current.kind == "op":
            kind = OpKind.MUL if self._advance().text == "*" else OpKind.DIV
            left = self.builder.binary(kind, left, self.parse_unary())
        return left

    def parse_unary(self) -> int:
        if self.current.text == "-" and self.current.kind == "op":
            self._advance()
            if self.current.kind == "number":
                return self.builder.const(-float(self._advance().text))
            return self.builder.unary(OpKind.NEG, self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> int:
        token = self.current
        match token.kind:
            case "number":
                self._advance()
                return self.builder.const(float(token.text))
            case "name":
                self._advance()
                if self.current.text == "(":
                    return self._parse_call(token)
                return self._parse_input(token)
            case "op" if token.text == "(":
                self._open()
                inner = self.parse_expr()
                self._close()
                return inner
            case "eof":
                raise ParseError("Expression incomplète", token.line, token.column)
            case _:
                raise ParseError(f"Jeton inattendu {token.text!r}", token.line, token.column)

    def _open(self) -> None:
        self.depth += 1
        self._expect("(")

    def _close(self) -> None:
        self.depth -= 1
        self._expect(")")

    def _parse_input(self, token: Token) -> int:
        match = _INPUT_NAME.fullmatch(token.text)
        if match is None or int(match.group(1)) > self.builder.n:
            raise UnknownIdentifier(token.text, token.line, token.column)
        return self.builder.input(int(match.group(1)) - 1)

    def _parse_arguments(self) -> list[int]:
        """Arguments d'un appel, séparés par des virgules."""
        self._open()
        arguments: list[int] = []
        if self.current.text != ")":
            while True:
                arguments.append(self.parse_expr())
                if self.current.text != ",":
                    break
                self._advance()
        self._close()
        return arguments

    def _parse_call(self, name: Token) -> int:
        if name.text == "pow":
            return self._parse_pow(name)
        if name.text not in _UNARY_FUNCTIONS and name.text not in _BINARY_FUNCTIONS:
            raise UnknownIdentifier(name.text, name.line, name.column)
        arguments = self._parse_arguments()
        expected = 1 if name.text in _UNARY_FUNCTIONS else 2
        if len(arguments) != expected:
            raise ArityError(f"{name.text} attend {expected} argument(s), reçu {len(arguments)}", name.line, name.column)
        if expected == 1:
            return self.builder.unary(_UNARY_FUNCTIONS[name.text], arguments[0])
        return self.builder.binary(_BINARY_FUNCTIONS[name.text], *arguments)

    def _parse_pow(self, name: Token) -> int:
        arguments = self._parse_arguments()
        if len(arguments) != 2:
            raise ArityError(f"pow attend 2 arguments, reçu {len(arguments)}", name.line, name.column)
        base, exponent_node = arguments
        exponent_op = self.builder.node(exponent_node).op
        if exponent_op.kind is OpKind.CONST and float(exponent_op.value).is_integer():
            k = int(exponent_op.value)
            if k >= 2:
                return self.builder.unary(OpKind.POWINT, base, exponent=k)
            if k == 1:
                return base
            if k == 0:
                return self.builder.const(1.0)
            if k == -1:
                return self.builder.unary(OpKind.RECIP, base)
            return self.builder.unary(OpKind.RECIP, self.builder.unary(OpKind.POWINT, base, exponent=-k))
        # Puissance générale : exp(k * log(u)), base strictement positive
        logarithm = self.builder.unary(OpKind.LOG, base)
        return self.builder.unary(OpKind.EXP, self.builder.mul(exponent_node, logarithm))


def parse_expression(text: str, n: int | None = None, builder: TapeBuilder | None = None) -> EvalProcedure:
    """
    Construit la procédure d'évaluation décrite par le texte.

    Args:
        text (str): Une ou plusieurs expressions (une sortie chacune)
        n (int | None): Dimension d'entrée ; déduite du plus grand xK si absente
        builder (TapeBuilder | None): Constructeur à compléter (éléments personnalisés déjà enregistrés)

    Returns:
        EvalProcedure: Procédure de F : R^n -> R^m, sous-expressions communes partagées

    Raises:
        ParseError: Texte non conforme, avec ligne et colonne
        UnknownIdentifier: Variable ou fonction inconnue
        ArityError: Mauvais nombre d'arguments
    """
    tokens = tokenize(text)
    if builder is None:
        builder = TapeBuilder(n if n is not None else infer_dimension(text))
    outputs = _Parser(tokens, builder).parse_file()
    proc = builder.build(outputs)
    _logger.debug(f"Procédure lue : n = {proc.n}, m = {proc.m}, {len(proc.nodes)} noeuds, s = {proc.s}")
    return proc


def parse_function_file(path: str | Path, n: int | None = None) -> EvalProcedure:
    """
    Lit un fichier de fonction (UTF-8) ; une sortie par ligne ou par ';'.
    """
    text = Path(path).read_text(encoding="utf-8")
    _logger.info(f"Lecture de {path}")
    return parse_expression(text, n)

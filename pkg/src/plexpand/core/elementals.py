#!/usr/bin/env python3
"""
Bibliothèque d'éléments : opcodes, arités, et pour les univariés lisses
la valeur, la dérivée première et la dérivée seconde.

Les fonctions lèvent les exceptions de `math` (ValueError, ZeroDivisionError,
OverflowError) hors du domaine ; l'appelant les convertit en DomainError.
"""

import math
from enum import Enum


class OpKind(Enum):
    INPUT = "input"
    CONST = "const"
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    NEG = "neg"
    ABS = "abs"
    MIN = "min"
    MAX = "max"
    SIN = "sin"
    COS = "cos"
    EXP = "exp"
    LOG = "log"
    SQRT = "sqrt"
    SQUARE = "square"
    POWINT = "powint"
    RECIP = "recip"
    CUSTOM = "custom"


NULLARY = frozenset({OpKind.INPUT, OpKind.CONST})
BINARY = frozenset({OpKind.ADD, OpKind.SUB, OpKind.MUL, OpKind.DIV, OpKind.MIN, OpKind.MAX})
SMOOTH_UNARY = frozenset(
    {
        OpKind.NEG,
        OpKind.SIN,
        OpKind.COS,
        OpKind.EXP,
        OpKind.LOG,
        OpKind.SQRT,
        OpKind.SQUARE,
        OpKind.POWINT,
        OpKind.RECIP,
    }
)
UNARY = SMOOTH_UNARY | {OpKind.ABS}


def fixed_arity(kind: OpKind) -> int | None:
    """
    Arité d'un opcode de la bibliothèque, None pour Custom (arité déclarée par l'élément).
    """
    if kind in NULLARY:
        return 0
    if kind in UNARY:
        return 1
    if kind in BINARY:
        return 2
    return None


def unary_value(kind: OpKind, u: float, exponent: int | None = None) -> float:
    """
    Évalue l'élément univarié `kind` en u.

    Args:
        kind (OpKind): Opcode univarié
        u (float): Argument
        exponent (int | None): Exposant pour PowInt

    Returns:
        float: Valeur de l'élément
    """
    match kind:
        case OpKind.NEG:
            return -u
        case OpKind.ABS:
            return abs(u)
        case OpKind.SIN:
            return math.sin(u)
        case OpKind.COS:
            return math.cos(u)
        case OpKind.EXP:
            return math.exp(u)
        case OpKind.LOG:
            return math.log(u)
        case OpKind.SQRT:
            return math.sqrt(u)
        case OpKind.SQUARE:
            return u * u
        case OpKind.POWINT:
            return math.pow(u, exponent)
        case OpKind.RECIP:
            return 1.0 / u
        case _:
            raise ValueError(f"Opcode non univarié : {kind}")


def unary_derivative(kind: OpKind, u: float, exponent: int | None = None) -> float:
    """
    Dérivée première de l'élément univarié `kind` en u.

    Raises:
        ValueError, ZeroDivisionError: Si la dérivée n'est pas définie (sqrt en 0, ...)
    """
    match kind:
        case OpKind.NEG:
            return -1.0
        case OpKind.SIN:
            return math.cos(u)
        case OpKind.COS:
            return -math.sin(u)
        case OpKind.EXP:
            return math.exp(u)
        case OpKind.LOG:
            if u <= 0.0:
                raise ValueError("log' hors domaine")
            return 1.0 / u
        case OpKind.SQRT:
            if u <= 0.0:
                raise ValueError("sqrt' non définie en 0")
            return 0.5 / math.sqrt(u)
        case OpKind.SQUARE:
            return 2.0 * u
        case OpKind.POWINT:
            return exponent * math.pow(u, exponent - 1)
        case OpKind.RECIP:
            return -1.0 / (u * u)
        case _:
            raise ValueError(f"Opcode sans dérivée lisse : {kind}")

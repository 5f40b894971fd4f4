#!/usr/bin/env python3
"""
Noyaux sécants sans singularité en représentation milieu-rayon

Pour une paire de traces (v̌, v̂) on manipule le milieu v̊ = (v̌ + v̂)/2 et le rayon
signé δv = (v̂ - v̌)/2. Chaque noyau renvoie le milieu et le rayon du résultat, ainsi
que la pente sécante, sans jamais diviser par δv : lorsque les deux traces se
confondent, la pente se réduit à la dérivée.

Auteur: Hugues Le Gendre
Date: 2025
"""

import math
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass

from ..config import SERIES_THRESHOLD
from .elementals import OpKind
from .errors import DomainError


@dataclass(frozen=True, slots=True)
class MidRad:
    """
    Paire de valeurs v̌ = mid - rad, v̂ = mid + rad ; le rayon peut être négatif.
    """

    mid: float
    rad: float = 0.0

    @classmethod
    def from_endpoints(cls, lower: float, upper: float) -> "MidRad":
        return cls(0.5 * (lower + upper), 0.5 * (upper - lower))

    @property
    def lower(self) -> float:
        return self.mid - self.rad

    @property
    def upper(self) -> float:
        return self.mid + self.rad


def sinc(t: float) -> float:
    """sin(t)/t, prolongée par 1 en 0."""
    if abs(t) < SERIES_THRESHOLD:
        t2 = t * t
        return 1.0 - t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0))
    return math.sin(t) / t


def sinhc(t: float) -> float:
    """sinh(t)/t, prolongée par 1 en 0."""
    if abs(t) < SERIES_THRESHOLD:
        t2 = t * t
        return 1.0 + t2 / 6.0 * (1.0 + t2 / 20.0 * (1.0 + t2 / 42.0))
    return math.sinh(t) / t


def artanhc(t: float) -> float:
    """
    artanh(t)/t, prolongée par 1 en 0.

    Raises:
        DomainError: Si |t| >= 1
    """
    if not abs(t) < 1.0:
        raise DomainError(None, f"artanhc({t}) hors domaine, |t| < 1 requis")
    if abs(t) < SERIES_THRESHOLD:
        t2 = t * t
        return 1.0 + t2 * (1.0 / 3.0 + t2 * (1.0 / 5.0 + t2 / 7.0))
    return math.atanh(t) / t


def _monomial(m: float, r: float, exponent: int) -> tuple[float, float, float]:
    # (m ± r)^n = somme des C(n,k) m^(n-k) (±r)^k : termes pairs au milieu, impairs au rayon
    mid = slope = 0.0
    for k in range(exponent + 1):
        term = math.comb(exponent, k) * math.pow(m, exponent - k)
        if k % 2 == 0:
            mid += term * math.pow(r, k)
        else:
            slope += term * math.pow(r, k - 1)
    rad = slope * r
    return mid, rad, slope


def secant_unary(kind: OpKind, arg: MidRad, exponent: int | None = None) -> tuple[MidRad, float]:
    """
    Noyau sécant d'un élément univarié lisse de la bibliothèque.

    Args:
        kind (OpKind): Opcode univarié lisse
        arg (MidRad): Milieu et rayon de l'argument
        exponent (int | None): Exposant pour PowInt

    Returns:
        tuple[MidRad, float]: Milieu et rayon du résultat, pente sécante

    Raises:
        ValueError, ZeroDivisionError, DomainError: Pente non définie (extrémités hors domaine)
    """
    m, r = arg.mid, arg.rad
    match kind:
        case OpKind.NEG:
            return MidRad(-m, -r), -1.0
        case OpKind.SIN:
            mid, rad, slope = math.sin(m) * math.cos(r), math.cos(m) * math.sin(r), math.cos(m) * sinc(r)
        case OpKind.COS:
            mid, rad, slope = math.cos(m) * math.cos(r), -math.sin(m) * math.sin(r), -math.sin(m) * sinc(r)
        case OpKind.EXP:
            scale = math.exp(m)
            mid, rad, slope = scale * math.cosh(r), scale * math.sinh(r), scale * sinhc(r)
        case OpKind.LOG:
            if m <= 0.0:
                raise ValueError(f"log sécant : milieu {m} non positif")
            t = r / m
            # ½ log(m² - r²) écrit sans annulation
            mid = math.log(m) + 0.5 * math.log1p(-t * t)
            rad = math.atanh(t)
            slope = artanhc(t) / m
        case OpKind.SQRT:
            # Les extrémités sont déjà vérifiées positives ; seul l'arrondi du milieu peut les rendre < 0
            upper, lower = math.sqrt(max(m + r, 0.0)), math.sqrt(max(m - r, 0.0))
            total = upper + lower
            if total == 0.0:
                raise ZeroDivisionError("sqrt sécant : les deux extrémités sont nulles")
            mid, rad, slope = 0.5 * total, r / total, 1.0 / total
        case OpKind.SQUARE:
            mid, rad, slope = m * m + r * r, 2.0 * m * r, 2.0 * m
        case OpKind.POWINT:
            mid, rad, slope = _monomial(m, r, exponent)
        case OpKind.RECIP:
            if r == 0.0:
                return MidRad(1.0 / m), -1.0 / (m * m)
            denominator = m * m - r * r
            if denominator == 0.0:
                raise ZeroDivisionError("recip sécant : une extrémité est nulle")
            mid, rad, slope = m / denominator, -r / denominator, -1.0 / denominator
        case _:
            raise ValueError(f"Pas de noyau sécant univarié pour {kind}")
    return MidRad(mid, rad), slope


def secant_binary(kind: OpKind, left: MidRad, right: MidRad) -> tuple[MidRad, tuple[float, float]]:
    """
    Noyau sécant des opérations arithmétiques binaires.

    Returns:
        tuple[MidRad, tuple[float, float]]: Résultat et pentes par rapport à (gauche, droite)

    Raises:
        ZeroDivisionError: Division dont une extrémité du dénominateur est nulle
    """
    mj, rj = left.mid, left.rad
    mk, rk = right.mid, right.rad
    match kind:
        case OpKind.ADD:
            return MidRad(mj + mk, rj + rk), (1.0, 1.0)
        case OpKind.SUB:
            return MidRad(mj - mk, rj - rk), (1.0, -1.0)
        case OpKind.MUL:
            return MidRad(mj * mk + rj * rk, rj * mk + mj * rk), (mk, mj)
        case OpKind.DIV:
            if rk == 0.0:
                return MidRad(mj / mk, rj / mk), (1.0 / mk, -mj / (mk * mk))
            denominator = mk * mk - rk * rk
            if denominator == 0.0:
                raise ZeroDivisionError("division sécante : une extrémité du dénominateur est nulle")
            mid = (mj * mk - rj * rk) / denominator
            rad = (rj * mk - mj * rk) / denominator
            return MidRad(mid, rad), (mk / denominator, -mj / denominator)
        case _:
            raise ValueError(f"Pas de noyau sécant binaire pour {kind}")


def secant_abs(arg: MidRad) -> MidRad:
    """Milieu (|v̌|+|v̂|)/2 et rayon (|v̂|-|v̌|)/2 de la valeur absolue."""
    lower, upper = abs(arg.mid - arg.rad), abs(arg.mid + arg.rad)
    return MidRad(0.5 * (lower + upper), 0.5 * (upper - lower))


def series_secant(derivatives: Sequence[float], r: float) -> tuple[MidRad, float]:
    """
    Noyau sécant par développement de Taylor au milieu.

    Args:
        derivatives: Valeurs phi(m), phi'(m), phi''(m), ... (ordre de troncature = longueur - 1)
        r (float): Rayon signé

    Returns:
        tuple[MidRad, float]: Milieu et rayon du résultat, pente sécante
    """
    mid = slope = 0.0
    previous, power = 0.0, 1.0  # r^(k-1)/(k-1)! et r^k/k!
    for k, derivative in enumerate(derivatives):
        if k % 2 == 0:
            mid += derivative * power
        else:
            slope += derivative * previous / k
        previous, power = power, power * r / (k + 1)
    return MidRad(mid, slope * r), slope


# Rayon en dessous duquel le quotient différentiel cède la place à la dérivée au milieu
QUOTIENT_THRESHOLD: float = sys.float_info.epsilon ** (1.0 / 3.0)


def difference_slope(
    endpoints: Callable[[], tuple[float, float]], arg: MidRad, derivative: Callable[[], float]
) -> float:
    """
    Pente sécante (phi(v̂) - phi(v̌)) / (v̂ - v̌) d'un élément sans noyau fermé.

    Args:
        endpoints: Renvoie (phi(v̌), phi(v̂)), appelé seulement si le rayon est assez grand
        arg (MidRad): Argument
        derivative: Renvoie phi'(v̊), utilisé pour les rayons trop petits

    Returns:
        float: Pente sécante
    """
    if abs(arg.rad) <= QUOTIENT_THRESHOLD * (1.0 + abs(arg.mid)):
        return float(derivative())
    lower, upper = endpoints()
    return (float(upper) - float(lower)) / (2.0 * arg.rad)

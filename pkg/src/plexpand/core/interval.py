#!/usr/bin/env python3
"""
Arithmétique d'intervalles avec arrondi extérieur

Chaque borne calculée est écartée d'un ulp vers l'extérieur par `math.nextafter`,
ce qui suffit à contenir les valeurs exactes pour les opérations correctement
arrondies ; sin et cos reçoivent une marge absolue supplémentaire.
"""

import math
from dataclasses import dataclass


def _down(value: float) -> float:
    return math.nextafter(value, -math.inf)


def _up(value: float) -> float:
    return math.nextafter(value, math.inf)


@dataclass(frozen=True, slots=True)
class Interval:
    """Intervalle fermé [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"Intervalle invalide [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value: float) -> "Interval":
        return cls(float(value), float(value))

    @classmethod
    def hull(cls, *values: float) -> "Interval":
        return cls(_down(min(values)), _up(max(values)))

    def __repr__(self) -> str:
        return f"[{self.lo:.6g}, {self.hi:.6g}]"

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def mag(self) -> float:
        """max |x| sur l'intervalle."""
        return max(abs(self.lo), abs(self.hi))

    def mig(self) -> float:
        """min |x| sur l'intervalle (0 s'il contient 0)."""
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def subset_of(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(_down(self.lo - other.hi), _up(self.hi - other.lo))

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval.hull(*products)

    def scale(self, factor: float) -> "Interval":
        return Interval.hull(self.lo * factor, self.hi * factor)

    def recip(self) -> "Interval":
        """
        Raises:
            ZeroDivisionError: Si l'intervalle contient 0
        """
        if self.lo <= 0.0 <= self.hi:
            raise ZeroDivisionError(f"Inverse d'un intervalle contenant 0 : {self}")
        return Interval.hull(1.0 / self.lo, 1.0 / self.hi)

    def __truediv__(self, other: "Interval") -> "Interval":
        if other.lo <= 0.0 <= other.hi:
            raise ZeroDivisionError(f"Division par un intervalle contenant 0 : {other}")
        quotients = (self.lo / other.lo, self.lo / other.hi, self.hi / other.lo, self.hi / other.hi)
        return Interval.hull(*quotients)

    def abs(self) -> "Interval":
        return Interval(self.mig(), self.mag())

    def square(self) -> "Interval":
        low = self.mig()
        return Interval(_down(low * low) if low > 0.0 else 0.0, _up(self.mag() * self.mag()))

    def powint(self, exponent: int) -> "Interval":
        if exponent % 2 == 0:
            low = self.mig()
            return Interval(_down(math.pow(low, exponent)) if low > 0.0 else 0.0, _up(math.pow(self.mag(), exponent)))
        return Interval.hull(math.pow(self.lo, exponent), math.pow(self.hi, exponent))

    def sqrt(self) -> "Interval":
        if self.lo < 0.0:
            raise ValueError(f"sqrt d'un intervalle contenant des négatifs : {self}")
        return Interval(max(0.0, _down(math.sqrt(self.lo))), _up(math.sqrt(self.hi)))

    def exp(self) -> "Interval":
        return Interval(max(0.0, _down(math.exp(self.lo))), _up(math.exp(self.hi)))

    def log(self) -> "Interval":
        if self.lo <= 0.0:
            raise ValueError(f"log d'un intervalle non strictement positif : {self}")
        return Interval(_down(math.log(self.lo)), _up(math.log(self.hi)))

    def sin(self) -> "Interval":
        return self._periodic(math.sin, math.pi / 2.0)

    def cos(self) -> "Interval":
        return self._periodic(math.cos, 0.0)

    def _periodic(self, function, peak: float) -> "Interval":
        # Extrema en peak + k*pi : maximum pour k pair, minimum pour k impair
        if self.width >= 2.0 * math.pi:
            return Interval(-1.0, 1.0)
        values = [function(self.lo), function(self.hi)]
        margin = 1e-12
        first = math.ceil((self.lo - peak) / math.pi - margin)
        last = math.floor((self.hi - peak) / math.pi + margin)
        values += [1.0 if k % 2 == 0 else -1.0 for k in range(first, last + 1)]
        return Interval(max(-1.0, _down(min(values) - 1e-15)), min(1.0, _up(max(values) + 1e-15)))

#!/usr/bin/env python3
"""
Test de l'arithmétique d'intervalles

Chaque opération est comparée à un échantillonnage : les valeurs ponctuelles
doivent toujours être contenues dans l'enclosure.
"""

import math

import numpy as np
import pytest

from src.plexpand.core.interval import Interval


def _random_interval(rng: np.random.Generator, low: float = -3.0, high: float = 3.0) -> Interval:
    a, b = sorted(rng.uniform(low, high, size=2))
    return Interval(float(a), float(b))


def _points(interval: Interval, count: int = 50) -> np.ndarray:
    return np.concatenate([[interval.lo, interval.hi], np.linspace(interval.lo, interval.hi, count)])


def test_basic_properties() -> None:
    print("=== Test des propriétés de base ===")

    interval = Interval(-1.0, 3.0)
    assert interval.width == 4.0 and interval.mid == 1.0
    assert interval.mag() == 3.0 and interval.mig() == 0.0
    assert Interval(2.0, 5.0).mig() == 2.0 and Interval(-5.0, -2.0).mig() == 2.0
    assert interval.contains(0.0) and not interval.contains(3.5)
    assert Interval(0.0, 1.0).subset_of(interval)
    assert Interval.point(2.0) == Interval(2.0, 2.0)
    with pytest.raises(ValueError):
        Interval(1.0, 0.0)
    with pytest.raises(ValueError):
        Interval(math.nan, 1.0)
    print("   ✅ Propriétés vérifiées")


def test_reference_enclosures() -> None:
    """Enclosures des exemples de référence."""
    assert Interval(0.0, 4.0).subset_of(Interval(-1.0, 2.0).square()), "sqr([-1, 2]) ⊇ [0, 4]"
    assert Interval(0.0, 3.0).subset_of(Interval(-3.0, 1.0).abs()), "|[-3, 1]| ⊇ [0, 3]"
    assert Interval(-1.0, 1.0).subset_of(Interval(0.0, 10.0).sin()), "sin([0, 10]) ⊇ [-1, 1]"
    narrow = Interval(0.1, 0.2).sin()
    assert narrow.hi < 0.2 and narrow.lo > 0.09, f"sin([0.1, 0.2]) trop large : {narrow}"


def test_containment_by_sampling() -> None:
    """Les valeurs ponctuelles restent dans l'enclosure calculée."""
    print("=== Test de l'inclusion par échantillonnage ===")

    rng = np.random.default_rng(41)
    unary = {
        "neg": (lambda a: -a, lambda u: -u),
        "abs": (Interval.abs, abs),
        "square": (Interval.square, lambda u: u * u),
        "cube": (lambda a: a.powint(3), lambda u: u**3),
        "quartic": (lambda a: a.powint(4), lambda u: u**4),
        "exp": (Interval.exp, math.exp),
        "sin": (Interval.sin, math.sin),
        "cos": (Interval.cos, math.cos),
    }
    for _ in range(300):
        interval = _random_interval(rng, -8.0, 8.0)
        for name, (enclose, function) in unary.items():
            enclosure = enclose(interval)
            for u in _points(interval):
                assert enclosure.contains(function(float(u))), f"{name}({u}) hors de {enclosure}"

        positive = _random_interval(rng, 0.1, 5.0)
        for enclose, function in ((Interval.log, math.log), (Interval.sqrt, math.sqrt), (Interval.recip, lambda u: 1 / u)):
            enclosure = enclose(positive)
            assert all(enclosure.contains(function(float(u))) for u in _points(positive)), f"{enclosure} incomplet"

        left, right = _random_interval(rng), _random_interval(rng)
        for operation, function in (
            (Interval.__add__, lambda u, w: u + w),
            (Interval.__sub__, lambda u, w: u - w),
            (Interval.__mul__, lambda u, w: u * w),
        ):
            enclosure = operation(left, right)
            for u in _points(left, 10):
                for w in _points(right, 10):
                    assert enclosure.contains(function(float(u), float(w))), f"{enclosure} ne contient pas {u}, {w}"
        quotient = left / positive
        assert all(quotient.contains(float(u) / float(w)) for u in _points(left, 10) for w in _points(positive, 10))
        scaled = left.scale(-2.5)
        assert all(scaled.contains(-2.5 * float(u)) for u in _points(left, 10))
    print("   ✅ Enclosures contenant toutes les valeurs échantillonnées")


def test_domain_violations() -> None:
    with pytest.raises(ZeroDivisionError):
        Interval(-1.0, 1.0).recip()
    with pytest.raises(ZeroDivisionError):
        Interval(1.0, 2.0) / Interval(0.0, 1.0)
    with pytest.raises(ValueError):
        Interval(-1.0, 1.0).log()
    with pytest.raises(ValueError):
        Interval(-1.0, 1.0).sqrt()


def test_outward_rounding() -> None:
    """Les bornes calculées sont écartées vers l'extérieur."""
    total = Interval.point(0.1) + Interval.point(0.2)
    assert total.lo < 0.1 + 0.2 < total.hi, f"Enclosure non élargie : {total}"
    assert Interval.point(0.0).exp().contains(1.0)


if __name__ == "__main__":
    print("🧪 Démarrage des tests de l'arithmétique d'intervalles...")
    print()

    try:
        test_basic_properties()
        test_reference_enclosures()
        test_containment_by_sampling()
        test_domain_violations()
        test_outward_rounding()
    except Exception as e:
        print(f"❌ Erreur lors des tests : {e}")
        exit(1)

    print("🎉 Tous les tests ont réussi !")
    print()

#!/usr/bin/env python3
"""
Test du langage de description des fonctions

Ce script teste la lecture des expressions, les diagnostics et la
sensibilité du modèle sécant à la représentation.
"""

import math

import pytest

from src.plexpand.core.elementals import OpKind
from src.plexpand.core.errors import ArityError, ParseError, UnknownIdentifier
from src.plexpand.core.linearize import secant, tangent
from src.plexpand.core.parser import infer_dimension, parse_expression, parse_function_file, tokenize
from src.plexpand.core.tape import evaluate


def _kinds(proc) -> list[OpKind]:
    return [node.op.kind for node in proc.nodes]


def test_parse_structure() -> None:
    """Les constantes sont des noeuds ; Max est conservé jusqu'à l'abaissement."""
    print("=== Test de la structure des procédures lues ===")

    proc = parse_expression("abs(x1) - 0.5", n=1)
    assert _kinds(proc) == [OpKind.INPUT, OpKind.ABS, OpKind.CONST, OpKind.SUB], f"Noeuds : {_kinds(proc)}"
    assert proc.s == 1, "Un noeud Abs attendu"

    proc = parse_expression("max(x1, x2)", n=2)
    assert proc.count(OpKind.MAX) == 1, "Un noeud Max attendu"
    assert proc.s == 0, "Aucun Abs avant abaissement"

    composed = parse_expression("log(exp(x1))", n=1)
    identity = parse_expression("x1", n=1)
    assert len(composed.nodes) == 3, f"3 noeuds attendus, trouvé {len(composed.nodes)}"
    assert len(identity.nodes) == 1, "La procédure identité n'a que l'entrée"
    print("   ✅ Structures conformes")


def test_parse_values() -> None:
    """Priorités, moins unaire et puissances."""
    print("=== Test des valeurs ===")

    cases = {
        "1 + 2 * 3": 7.0,
        "(1 + 2) * 3": 9.0,
        "8 / 4 / 2": 1.0,
        "-x1 + 1": -1.0,
        "- -x1": 2.0,
        "pow(x1, 3)": 8.0,
        "pow(x1, 1)": 2.0,
        "pow(x1, 0)": 1.0,
        "pow(x1, -2)": 0.25,
        "pow(x1, 0.5)": math.sqrt(2.0),
        "sqr(x1) - recip(x1)": 3.5,
        "min(x1, 3) + max(x1, 3)": 5.0,
        "1e-1 * 20": 2.0,
    }
    for text, expected in cases.items():
        y, _ = evaluate(parse_expression(text, n=1), [2.0])
        assert y[0] == pytest.approx(expected, rel=1e-14), f"{text!r} en 2 : {y[0]} au lieu de {expected}"
    print(f"   ✅ {len(cases)} expressions évaluées")


def test_pow_opcodes() -> None:
    assert parse_expression("pow(x1, 3)").count(OpKind.POWINT) == 1
    assert parse_expression("pow(x1, 1)").outputs == (0,), "pow(e, 1) doit se réduire à e"
    negative = parse_expression("pow(x1, -2)")
    assert negative.count(OpKind.RECIP) == 1 and negative.count(OpKind.POWINT) == 1
    general = parse_expression("pow(x1, 0.5)")
    assert general.count(OpKind.EXP) == 1 and general.count(OpKind.LOG) == 1
    negative_literal = parse_expression("-3")
    assert _kinds(negative_literal)[-1] is OpKind.CONST and negative_literal.nodes[-1].op.value == -3.0


def test_parse_shares_subexpressions() -> None:
    proc = parse_expression("sin(x1) * sin(x1) + sin(x1)", n=1)
    assert proc.count(OpKind.SIN) == 1, "sin(x1) doit être partagé"


def test_parse_multiple_outputs() -> None:
    """Une sortie par ligne ou par ';', fins de ligne ignorées entre parenthèses, commentaires."""
    print("=== Test des sorties multiples ===")

    proc = parse_expression("x1 + x2   # somme\nx1 - x2; x1 * x2\n\n")
    assert proc.n == 2 and proc.m == 3, f"n = 2, m = 3 attendus, trouvé n = {proc.n}, m = {proc.m}"
    y, _ = evaluate(proc, [3.0, 2.0])
    assert y.tolist() == [5.0, 1.0, 6.0], f"Sorties inattendues : {y}"

    proc = parse_expression("max(x1,\n    x2) + (x1\n - x2)")
    assert proc.m == 1, "Les fins de ligne entre parenthèses ne séparent pas les sorties"
    print("   ✅ Sorties multiples lues")


def test_parse_errors() -> None:
    """Diagnostics avec ligne et colonne."""
    print("=== Test des diagnostics ===")

    with pytest.raises(ParseError) as info:
        parse_expression("x1 + * 2")
    assert (info.value.line, info.value.column) == (1, 6), f"Position inattendue : {info.value}"

    with pytest.raises(ParseError) as info:
        parse_expression("x1\nx1 + $")
    assert (info.value.line, info.value.column) == (2, 6), f"Position inattendue : {info.value}"

    with pytest.raises(UnknownIdentifier) as info:
        parse_expression("foo(x1)")
    assert info.value.name == "foo"
    with pytest.raises(UnknownIdentifier):
        parse_expression("x3", n=2)
    with pytest.raises(UnknownIdentifier):
        parse_expression("y + 1")
    with pytest.raises(ArityError):
        parse_expression("sin(x1, x2)")
    with pytest.raises(ArityError):
        parse_expression("max(x1)")
    with pytest.raises(ParseError):
        parse_expression("sin(x1")
    with pytest.raises(ParseError):
        parse_expression("   # rien\n")
    with pytest.raises(ValueError):
        parse_expression("x1 x2")
    print("   ✅ Erreurs de lecture diagnostiquées")


def test_tokenize_and_dimension() -> None:
    tokens = tokenize("sin(x12) # commentaire")
    assert [token.kind for token in tokens] == ["name", "op", "name", "op", "eof"]
    assert infer_dimension("x1 + x12 * x3") == 12
    assert infer_dimension("1 + 2") == 1


def test_parse_function_file(tmp_path) -> None:
    path = tmp_path / "f.pw"
    path.write_text("abs(x1) - 0.5\n", encoding="utf-8")
    proc = parse_function_file(path)
    assert evaluate(proc, [2.0])[0].tolist() == [1.5]


def test_representation_sensitivity() -> None:
    """
    x1*x2 et exp(log(x1) + log(x2)) définissent la même fonction mais pas le même modèle sécant.

    Les deux modèles reproduisent F aux extrémités ; ils diffèrent entre elles.
    """
    print("=== Test de la sensibilité à la représentation ===")

    product = parse_expression("x1 * x2")
    exponential = parse_expression("exp(log(x1) + log(x2))")
    lower, upper, corner = [1.0, 1.0], [2.0, 3.0], [1.0, 3.0]

    first, second = secant(product, lower, upper), secant(exponential, lower, upper)
    for point, expected in ((lower, 1.0), (upper, 6.0)):
        assert first.eval_model(point)[0] == pytest.approx(expected, rel=1e-13), "Produit : extrémité non reproduite"
        assert second.eval_model(point)[0] == pytest.approx(expected, rel=1e-13), "Exponentielle : extrémité non reproduite"
    assert first.eval_model(corner)[0] == pytest.approx(4.0, rel=1e-13), "Modèle du produit en (1, 3) : 4 attendu"
    assert second.eval_model(corner)[0] == pytest.approx(4.0657, abs=1e-3), "Modèle exponentiel en (1, 3) : ~4.0657"

    # Le modèle tangent ne dépend pas de la représentation
    center = [1.5, 2.0]
    for point in (corner, upper, [0.5, 0.5]):
        assert tangent(product, center).eval_model(point)[0] == pytest.approx(
            tangent(exponential, center).eval_model(point)[0], rel=1e-12
        ), "Les modèles tangents doivent coïncider"
    print("   ✅ Modèles sécants distincts, modèles tangents identiques")


if __name__ == "__main__":
    print("🧪 Démarrage des tests du langage de description...")
    print()

    try:
        test_parse_structure()
        test_parse_values()
        test_pow_opcodes()
        test_parse_shares_subexpressions()
        test_parse_multiple_outputs()
        test_parse_errors()
        test_tokenize_and_dimension()
        test_representation_sensitivity()
    except Exception as e:
        print(f"❌ Erreur lors des tests : {e}")
        exit(1)

    print("🎉 Tous les tests ont réussi !")
    print()

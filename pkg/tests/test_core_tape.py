#!/usr/bin/env python3
"""
Test des procédures d'évaluation

Ce script teste la construction, l'évaluation et l'abaissement de Min/Max.
"""

import math

import numpy as np
import pytest

from src.plexpand.core.elementals import OpKind
from src.plexpand.core.errors import ArityError, DomainError, DuplicateElemental, UnloweredTapeError
from src.plexpand.core.tape import (
    CustomElemental,
    EvalProcedure,
    Node,
    Opcode,
    TapeBuilder,
    evaluate,
    lower_minmax,
    register_custom,
)
from tests.tape_factory import random_point, random_tape


def _oscillating(u: float) -> float:
    return u**3 * math.sin(1.0 / u) if u != 0.0 else 0.0


def _oscillating_derivative(u: float) -> float:
    return 3.0 * u * u * math.sin(1.0 / u) - u * math.cos(1.0 / u) if u != 0.0 else 0.0


OSCILLATING = CustomElemental("osc", 1, _oscillating, (_oscillating_derivative,))


def test_builder_shares_subexpressions() -> None:
    """Un même noeud demandé deux fois n'est créé qu'une fois."""
    print("=== Test du partage des sous-expressions ===")

    builder = TapeBuilder(2)
    first = builder.add(builder.input(0), builder.input(1))
    second = builder.add(builder.input(0), builder.input(1))
    assert first == second, "add(x1, x2) doit être partagé"
    assert builder.const(2.0) == builder.const(2.0), "Les constantes égales doivent être partagées"
    assert len(builder) == 4, f"4 noeuds attendus (2 entrées, add, const), trouvé {len(builder)}"
    print("   ✅ Sous-expressions partagées")


def test_evaluate_examples() -> None:
    """Évaluation de procédures construites à la main."""
    print("=== Test de l'évaluation ===")

    builder = TapeBuilder(1)
    out = builder.sub(builder.abs(builder.input(0)), builder.const(0.5))
    proc = builder.build([out])
    y, trace = evaluate(proc, [2.0])
    assert y.tolist() == [1.5], f"|2| - 0.5 = 1.5, trouvé {y}"
    assert trace.values.tolist() == [2.0, 2.0, 0.5, 1.5], f"Trace inattendue : {trace.values}"

    builder = TapeBuilder(2)
    x1, x2 = builder.input(0), builder.input(1)
    out = builder.add(builder.mul(x1, x2), builder.unary(OpKind.SIN, x1))
    y, _ = evaluate(builder.build([out]), [0.0, 7.0])
    assert y.tolist() == [0.0], f"0*7 + sin(0) = 0, trouvé {y}"
    print("   ✅ Évaluations correctes")


def test_evaluate_domain_error() -> None:
    """log(-1) lève DomainError avec l'indice du noeud."""
    print("=== Test des erreurs de domaine ===")

    builder = TapeBuilder(1)
    log_node = builder.unary(OpKind.LOG, builder.input(0))
    proc = builder.build([log_node])
    with pytest.raises(DomainError) as info:
        evaluate(proc, [-1.0])
    assert info.value.node_index == log_node, f"Noeud {log_node} attendu, reçu {info.value.node_index}"

    builder = TapeBuilder(1)
    proc = builder.build([builder.unary(OpKind.RECIP, builder.input(0))])
    with pytest.raises(DomainError):
        evaluate(proc, [0.0])
    print("   ✅ DomainError levée avec diagnostic")


def test_evaluate_rejects_wrong_dimension() -> None:
    builder = TapeBuilder(2)
    proc = builder.build([builder.add(builder.input(0), builder.input(1))])
    with pytest.raises(ValueError):
        evaluate(proc, [1.0])


def test_opcode_validation() -> None:
    """Les opcodes incomplets sont refusés."""
    print("=== Test de la validation des opcodes ===")

    with pytest.raises(ValueError):
        Opcode(OpKind.POWINT, exponent=1)
    with pytest.raises(ValueError):
        Opcode(OpKind.CONST, value=math.inf)
    with pytest.raises(ValueError):
        Opcode(OpKind.INPUT)
    with pytest.raises(ValueError):
        Opcode(OpKind.CUSTOM)
    print("   ✅ Opcodes invalides refusés")


def test_procedure_validation() -> None:
    """Ordre topologique, arité et sorties vérifiés à la construction."""
    print("=== Test de la validation des procédures ===")

    x = Node(Opcode(OpKind.INPUT, slot=0))
    with pytest.raises(ValueError):
        EvalProcedure(n=1, nodes=(x, Node(Opcode(OpKind.SIN), (1,))), outputs=(1,))
    with pytest.raises(ArityError):
        EvalProcedure(n=1, nodes=(x, Node(Opcode(OpKind.ADD), (0,))), outputs=(1,))
    with pytest.raises(ArityError):
        EvalProcedure(n=1, nodes=(x, Node(Opcode(OpKind.CUSTOM, elemental_id="absent"), (0,))), outputs=(1,))
    with pytest.raises(ValueError):
        EvalProcedure(n=1, nodes=(x,), outputs=())
    with pytest.raises(ValueError):
        EvalProcedure(n=1, nodes=(x,), outputs=(3,))
    with pytest.raises(ValueError):
        TapeBuilder(0)
    print("   ✅ Procédures invalides refusées")


def test_custom_elemental() -> None:
    """Élément personnalisé évaluable en 0, identifiant unique."""
    print("=== Test des éléments personnalisés ===")

    builder = TapeBuilder(1)
    assert register_custom(builder, OSCILLATING) == "osc", "L'identifiant doit être renvoyé"
    proc = builder.build([builder.custom("osc", builder.input(0))])
    y, _ = evaluate(proc, [0.0])
    assert y.tolist() == [0.0], f"u³ sin(1/u) prolongée en 0, trouvé {y}"
    y, _ = evaluate(proc, [0.5])
    assert y[0] == pytest.approx(0.125 * math.sin(2.0)), f"Valeur en 0.5 inattendue : {y}"

    with pytest.raises(DuplicateElemental):
        builder.register_custom(OSCILLATING)
    with pytest.raises(ArityError):
        builder.custom("osc", 0, 0)
    with pytest.raises(ArityError):
        CustomElemental("bad", 2, lambda u, w: u, (lambda u, w: 1.0,))
    with pytest.raises(ValueError):
        CustomElemental("bad", 1, math.sin, (math.cos,), lipschitz_hint=(-1.0,))
    print("   ✅ Éléments personnalisés enregistrés et vérifiés")


def test_custom_domain_error() -> None:
    builder = TapeBuilder(1)
    builder.register_custom(CustomElemental("inv", 1, lambda u: 1.0 / u, (lambda u: -1.0 / (u * u),)))
    proc = builder.build([builder.custom("inv", builder.input(0))])
    with pytest.raises(DomainError):
        evaluate(proc, [0.0])


def test_lower_minmax_identities() -> None:
    """max(3, 5) = 5 et min(-1, -4) = -4 après abaissement, un Abs par noeud abaissé."""
    print("=== Test de l'abaissement de Min/Max ===")

    builder = TapeBuilder(2)
    x1, x2 = builder.input(0), builder.input(1)
    proc = builder.build([builder.binary(OpKind.MAX, x1, x2), builder.binary(OpKind.MIN, x1, x2)])
    assert proc.has_minmax(), "La procédure doit contenir Min/Max"
    with pytest.raises(UnloweredTapeError):
        proc.require_lowered()

    lowered = lower_minmax(proc)
    assert not lowered.has_minmax(), "Min/Max doivent avoir disparu"
    assert lowered.s == 2, f"Un Abs par noeud abaissé, s = 2 attendu, trouvé {lowered.s}"
    assert evaluate(lowered, [3.0, 5.0])[0][0] == 5.0, "max(3, 5) = 5"
    assert evaluate(lowered, [-1.0, -4.0])[0][1] == -4.0, "min(-1, -4) = -4"
    assert lower_minmax(lowered) is lowered, "Une procédure sans Min/Max est renvoyée telle quelle"
    print("   ✅ Identités de Min/Max vérifiées")


def test_lower_minmax_keeps_abs_distinct() -> None:
    """max(x1, x2) + |x1 - x2| : le |u - w| de l'abaissement n'est pas fusionné avec l'Abs existant."""
    builder = TapeBuilder(2)
    x1, x2 = builder.input(0), builder.input(1)
    spread = builder.abs(builder.sub(x1, x2))
    proc = builder.build([builder.add(builder.binary(OpKind.MAX, x1, x2), spread)])
    assert proc.s == 1

    lowered = lower_minmax(proc)
    assert lowered.s == 2, f"s = 2 attendu après abaissement, trouvé {lowered.s}"
    assert evaluate(lowered, [1.0, 4.0])[0][0] == 7.0, "max(1, 4) + |1 - 4| = 7"

    again = TapeBuilder(1)
    assert again.abs(again.input(0)) == again.abs(again.input(0)), "Abs partagé par défaut"
    assert again.abs(again.input(0), shared=False) != again.abs(again.input(0)), "shared=False crée un noeud"


def test_lower_minmax_random_tapes() -> None:
    """L'abaissement conserve les valeurs sur des procédures aléatoires."""
    rng = np.random.default_rng(11)
    for _ in range(100):
        proc = random_tape(rng, "abs")
        lowered = lower_minmax(proc)
        assert lowered.s == proc.s + proc.count(OpKind.MIN, OpKind.MAX), (
            f"s doit croître du nombre de Min/Max abaissés : {proc.s} -> {lowered.s}"
        )
        for _ in range(5):
            x = random_point(rng, proc.n)
            expected, _ = evaluate(proc, x)
            actual, _ = evaluate(lowered, x)
            assert np.allclose(actual, expected, rtol=1e-12, atol=1e-12), f"Écart après abaissement en {x}"


def test_describe() -> None:
    builder = TapeBuilder(1)
    proc = builder.build([builder.unary(OpKind.POWINT, builder.input(0), exponent=3)])
    lines = proc.describe()
    assert lines == ["v0 = x1", "v1 = pow(., 3)[0]"], f"Description inattendue : {lines}"
    assert proc.count(OpKind.POWINT) == 1


if __name__ == "__main__":
    print("🧪 Démarrage des tests des procédures...")
    print()

    try:
        test_builder_shares_subexpressions()
        test_evaluate_examples()
        test_evaluate_domain_error()
        test_evaluate_rejects_wrong_dimension()
        test_opcode_validation()
        test_procedure_validation()
        test_custom_elemental()
        test_custom_domain_error()
        test_lower_minmax_identities()
        test_lower_minmax_keeps_abs_distinct()
        test_lower_minmax_random_tapes()
        test_describe()
    except Exception as e:
        print(f"❌ Erreur lors des tests : {e}")
        exit(1)

    print("🎉 Tous les tests ont réussi !")
    print()

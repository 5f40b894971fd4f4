#!/usr/bin/env python3
"""
Test des certificats de Lipschitz β_F / γ_F

Ce script vérifie les valeurs de référence, la réécriture des produits et, sur
des procédures aléatoires, que les bornes de Lipschitz, d'approximation, de
décalage de modèle, de partie incrémentale et de raffinement ne sont jamais violées.
"""

import json
import math

import numpy as np
import pytest

from src.plexpand.core.bounds import BoxK, beta_gamma, interval_evaluate, multiplication_lowering, stability_radius
from src.plexpand.core.elementals import OpKind
from src.plexpand.core.errors import CertError, DomainError, SingularPiece
from src.plexpand.core.formats import CertDocument_check_type, CertDocument_load_from_json
from src.plexpand.core.interval import Interval
from src.plexpand.core.linearize import AbsNormalForm, secant, tangent
from src.plexpand.core.parser import parse_expression
from src.plexpand.core.tape import CustomElemental, TapeBuilder, evaluate, lower_minmax
from tests.tape_factory import random_tape

CERTIFIED_FAMILIES = ("polynomial", "trig", "abs")


def _box(n: int, radius: float = 1.0) -> BoxK:
    return BoxK(-radius * np.ones(n), radius * np.ones(n))


def test_box_validation() -> None:
    K = BoxK(np.array([-1.0, 0.0]), np.array([1.0, 2.0]))
    assert K.n == 2 and K.contains([0.0, 1.0]) and not K.contains([2.0, 1.0])
    assert K.sample(np.random.default_rng(0), 5).shape == (5, 2)
    assert K.intervals() == [Interval(-1.0, 1.0), Interval(0.0, 2.0)]
    with pytest.raises(ValueError):
        BoxK(np.array([1.0]), np.array([0.0]))
    with pytest.raises(ValueError):
        BoxK(np.array([-math.inf]), np.array([0.0]))
    with pytest.raises(ValueError):
        BoxK(np.array([0.0, 0.0]), np.array([1.0]))


def test_enclosures() -> None:
    """Enclosures des noeuds par propagation d'intervalles."""
    print("=== Test des enclosures ===")

    enclosures = interval_evaluate(parse_expression("sqr(x1)"), BoxK(np.array([-1.0]), np.array([2.0])))
    assert Interval(0.0, 4.0).subset_of(enclosures[-1]), f"sqr([-1, 2]) : {enclosures[-1]}"
    enclosures = interval_evaluate(parse_expression("abs(x1)"), BoxK(np.array([-3.0]), np.array([1.0])))
    assert Interval(0.0, 3.0).subset_of(enclosures[-1]), f"|[-3, 1]| : {enclosures[-1]}"
    enclosures = interval_evaluate(parse_expression("sin(x1)"), BoxK(np.array([0.0]), np.array([10.0])))
    assert Interval(-1.0, 1.0).subset_of(enclosures[-1]), f"sin([0, 10]) : {enclosures[-1]}"

    rng = np.random.default_rng(43)
    for _ in range(100):
        proc = random_tape(rng, "mixed")
        K = _box(proc.n)
        enclosures = interval_evaluate(proc, K)
        for x in K.sample(rng, 20):
            _, trace = evaluate(proc, x)
            assert all(enclosure.contains(value) for enclosure, value in zip(enclosures, trace.values)), (
                "Une valeur ponctuelle sort de son enclosure"
            )
    print("   ✅ Enclosures contenant les valeurs échantillonnées")


def test_reference_constants() -> None:
    """β/γ des exemples calculés à la main."""
    print("=== Test des constantes de référence ===")

    certs = beta_gamma(parse_expression("x1 + x2"), BoxK(np.array([0.0, 0.0]), np.array([1.0, 1.0])))
    assert (certs.beta_F, certs.gamma_F) == (2.0, 0.0), f"x1 + x2 : β = 2, γ = 0, trouvé {certs.beta_F}, {certs.gamma_F}"

    certs = beta_gamma(parse_expression("sqr(x1)"), BoxK(np.array([-1.0]), np.array([2.0])))
    assert certs.beta_F == pytest.approx(4.0, rel=1e-12), f"sqr sur [-1, 2] : β = 4, trouvé {certs.beta_F}"
    assert certs.gamma_F == pytest.approx(2.0, rel=1e-12), f"sqr sur [-1, 2] : γ = 2, trouvé {certs.gamma_F}"
    assert certs.rigorous, "Aucun élément personnalisé : certificat rigoureux"
    for x in np.linspace(-1.0, 2.0, 31):
        model = tangent(parse_expression("sqr(x1)"), [0.5])
        assert certs.check_approximation(model, [x]), f"Borne (ii) violée en {x}"

    proc = parse_expression("abs(sin(x1))")
    certs = beta_gamma(proc, BoxK(np.array([0.0]), np.array([math.pi])))
    assert certs.beta_F == pytest.approx(1.0, rel=1e-12) and certs.gamma_F == pytest.approx(1.0, rel=1e-12)
    rng = np.random.default_rng(2)
    for x, x_tilde in rng.uniform(0.0, math.pi, size=(100, 2, 1)):
        assert certs.check_lipschitz(proc, x, x_tilde), "Borne (i) violée pour |sin|"
    print("   ✅ Constantes de référence retrouvées")


def test_multiplication_lowering() -> None:
    """u*w = ((u+w)² - (u-w)²)/4 ; plus aucun produit de deux variables."""
    print("=== Test de la réécriture des produits ===")

    lowered = multiplication_lowering(parse_expression("x1 * x2"))
    assert evaluate(lowered, [3.0, 4.0])[0].tolist() == [12.0], "¼(49 - 1) = 12"

    proc = parse_expression("x1 * x2 + x1 / x2 + x1 / 4 + 3 * x2 + x1 * x1")
    lowered = multiplication_lowering(proc)
    for node in lowered.nodes:
        if node.op.kind is OpKind.MUL:
            kinds = [lowered.nodes[arg].op.kind for arg in node.args]
            assert OpKind.CONST in kinds, "Un produit restant doit être une mise à l'échelle"
    assert lowered.count(OpKind.DIV) == 0, "Les quotients doivent être réécrits"
    rng = np.random.default_rng(47)
    for x in rng.uniform(0.5, 2.0, size=(50, 2)):
        assert evaluate(lowered, x)[0] == pytest.approx(evaluate(proc, x)[0], rel=1e-13)
    print("   ✅ Produits réécrits, valeurs conservées")


def test_certificate_suite() -> None:
    """Bornes (i) à (iv) et raffinement : aucune violation sur 200 configurations par famille."""
    print("=== Test de la suite de certificats ===")

    rng = np.random.default_rng(53)
    for family in CERTIFIED_FAMILIES:
        checked = 0
        for _ in range(20):
            proc = lower_minmax(random_tape(rng, family, outputs=int(rng.integers(1, 3))))
            K = _box(proc.n)
            certs = beta_gamma(proc, K)
            for _ in range(10):
                x, x_tilde, ylo, yhi, zlo, zhi, y, z = K.sample(rng, 8)
                secant_y, secant_z = secant(proc, ylo, yhi), secant(proc, zlo, zhi)
                tangent_y, tangent_z = tangent(proc, y), tangent(proc, z)

                assert certs.check_lipschitz(proc, x, x_tilde, secant_y, tangent_y), f"{family} : borne (i) violée"
                assert certs.check_approximation(secant_y, x), f"{family} : borne (ii) sécante violée"
                assert certs.check_approximation(tangent_y, x), f"{family} : borne (ii) tangente violée"
                assert certs.check_model_shift(secant_y, secant_z, x), f"{family} : borne (iii) sécante violée"
                assert certs.check_model_shift(tangent_y, tangent_z, x), f"{family} : borne (iii) tangente violée"
                assert certs.check_increment_shift(secant_y, secant_z, x - secant_y.center), (
                    f"{family} : borne (iv) sécante violée"
                )
                assert certs.check_increment_shift(tangent_y, tangent_z, x - y), f"{family} : borne (iv) tangente violée"
                assert certs.check_refinement(tangent_y, secant_z, x), f"{family} : borne de raffinement violée"
                checked += 1
        print(f"   ✅ {family} : {checked} configurations sans violation")


def test_bounds_monotone_in_box() -> None:
    """Réduire K n'augmente ni β_F ni γ_F."""
    rng = np.random.default_rng(59)
    for family in CERTIFIED_FAMILIES:
        for _ in range(30):
            proc = lower_minmax(random_tape(rng, family))
            K = _box(proc.n)
            corners = np.sort(rng.uniform(K.lower, K.upper, size=(2, proc.n)), axis=0)
            inner = BoxK(corners[0], corners[1])
            outer_certs, inner_certs = beta_gamma(proc, K), beta_gamma(proc, inner)
            assert inner_certs.beta_F <= outer_certs.beta_F * (1.0 + 1e-12), (
                f"{family} : β_F {inner_certs.beta_F} > {outer_certs.beta_F} sur une boîte plus petite"
            )
            assert inner_certs.gamma_F <= outer_certs.gamma_F * (1.0 + 1e-12), (
                f"{family} : γ_F {inner_certs.gamma_F} > {outer_certs.gamma_F} sur une boîte plus petite"
            )


def test_certificate_document() -> None:
    certs = beta_gamma(parse_expression("max(x1, x2) * sin(x1)"), _box(2))
    document = certs.to_document()
    assert CertDocument_check_type(document), "Document de certificat invalide"
    loaded = CertDocument_load_from_json(json.dumps(document))
    assert loaded is not None and loaded["beta_F"] == certs.beta_F
    assert len(document["per_node"]) == len(certs.proc.nodes)
    assert CertDocument_load_from_json(json.dumps({"beta_F": 1.0})) is None, "Document incomplet rejeté"


def test_domain_and_cert_errors() -> None:
    """log sur une boîte contenant 0 : DomainError ; sqrt en 0 : dérivée non bornée."""
    with pytest.raises(DomainError):
        beta_gamma(parse_expression("log(x1)"), BoxK(np.array([-1.0]), np.array([1.0])))
    with pytest.raises(DomainError):
        beta_gamma(parse_expression("recip(x1)"), BoxK(np.array([-1.0]), np.array([1.0])))
    with pytest.raises(CertError):
        beta_gamma(parse_expression("sqrt(x1)"), BoxK(np.array([0.0]), np.array([1.0])))
    with pytest.raises(ValueError):
        interval_evaluate(parse_expression("x1 + x2"), _box(1))


def _arctan(with_hint: bool) -> CustomElemental:
    hint = (3.0 * math.sqrt(3.0) / 8.0 + 1e-12,) if with_hint else None
    return CustomElemental("arctan", 1, math.atan, (lambda u: 1.0 / (1.0 + u * u),), lipschitz_hint=hint)


@pytest.mark.parametrize("with_hint", [True, False])
def test_custom_elemental_bounds(with_hint: bool) -> None:
    """Indication de Lipschitz : certificat rigoureux ; sans indication : échantillonnage non rigoureux."""
    builder = TapeBuilder(1)
    builder.register_custom(_arctan(with_hint))
    proc = builder.build([builder.custom("arctan", builder.mul(builder.const(2.0), builder.input(0)))])
    K = _box(1)
    certs = beta_gamma(proc, K)
    assert certs.rigorous is with_hint, f"rigoureux = {certs.rigorous}, attendu {with_hint}"
    assert certs.beta_F >= 2.0 - 1e-9, f"β_F >= sup|2 atan'| = 2, trouvé {certs.beta_F}"
    rng = np.random.default_rng(59)
    for x, xlo, xhi in K.sample(rng, 300).reshape(100, 3, 1):
        assert certs.check_approximation(secant(proc, xlo, xhi), x), "Borne (ii) violée pour arctan"


def test_stability_radius() -> None:
    """rho_F : minimum des 1/||A_σ^-1|| ; rayon non borné si γ_F = 0."""
    print("=== Test du rayon de stabilité ===")

    proc = parse_expression("x1 + x2\nx1 - x2")
    K = BoxK(np.zeros(2), np.ones(2))
    certs = beta_gamma(proc, K)
    rho, radius = stability_radius(tangent(proc, [0.5, 0.5]).abs_normal, certs)
    assert rho == pytest.approx(1.0, rel=1e-12) and math.isinf(radius), f"rho = 1, rayon infini : {rho}, {radius}"

    rng = np.random.default_rng(61)
    curved = beta_gamma(parse_expression("sqr(x1)\nx2"), _box(2))
    for _ in range(20):
        anf = AbsNormalForm(
            center=np.zeros(2),
            offset=np.zeros(2),
            c=rng.normal(size=2),
            b=np.zeros(2),
            Z=rng.normal(size=(2, 2)),
            L=np.array([[0.0, 0.0], [rng.normal(), 0.0]]),
            J=3.0 * np.eye(2) + 0.1 * rng.normal(size=(2, 2)),
            Y=0.2 * rng.normal(size=(2, 2)),
        )
        expected = math.inf
        for sigma in ((-1, -1), (-1, 1), (1, -1), (1, 1)):
            signs = np.diag(sigma).astype(float)
            A = anf.J + anf.Y @ signs @ np.linalg.inv(np.eye(2) - anf.L @ signs) @ anf.Z
            expected = min(expected, 1.0 / np.linalg.norm(np.linalg.inv(A), ord=np.inf))
        rho, radius = stability_radius(anf, curved)
        assert rho == pytest.approx(expected, rel=1e-10), f"rho = {rho}, énumération directe {expected}"
        assert radius == pytest.approx(rho / curved.gamma_F, rel=1e-12)

    with pytest.raises(SingularPiece):
        stability_radius(tangent(parse_expression("x1 + abs(x1)"), [0.0]).abs_normal, curved)
    with pytest.raises(ValueError):
        stability_radius(tangent(parse_expression("x1 + x2"), [0.0, 0.0]).abs_normal, curved)
    print("   ✅ Rayon de stabilité conforme à l'énumération directe")


if __name__ == "__main__":
    print("🧪 Démarrage des tests des certificats...")
    print()

    try:
        test_box_validation()
        test_enclosures()
        test_reference_constants()
        test_multiplication_lowering()
        test_certificate_suite()
        test_bounds_monotone_in_box()
        test_certificate_document()
        test_domain_and_cert_errors()
        test_custom_elemental_bounds(True)
        test_custom_elemental_bounds(False)
        test_stability_radius()
    except Exception as e:
        print(f"❌ Erreur lors des tests : {e}")
        exit(1)

    print("🎉 Tous les tests ont réussi !")
    print()

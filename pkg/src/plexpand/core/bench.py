#!/usr/bin/env python3
"""
Banc d'essai : application de rotation non linéaire du plan

    F(x) = R(φ(∠x) - ∠x) · x + c,    φ(ψ) = ψ + 8/(5π) ψ² - 8/(5π²) ψ³ + 2/(5π³) ψ⁴

φ envoie [0, 2π[ sur lui-même de façon strictement monotone ; F est bijective et
lisse hors de l'origine. Avec + c, les résidus du mode tangent sans bruit valent
13.392, 5.656, 3.400, 9.21e-3, ... La variante bruitée ajoute sin(f·(x1 + x2)) · a
aux deux composantes.

Auteur: Hugues Le Gendre
Date: 2025
"""

import csv
import io
import json
import math
from dataclasses import dataclass

from ..utils.logging import LoggingUtils
from .elementals import OpKind
from .linearize import Mode
from .newton import NewtonOptions, NewtonReport, newton_secant, newton_tangent
from .tape import CustomElemental, EvalProcedure, TapeBuilder

_logger = LoggingUtils.setup_simple_logger("Bench")

ANGLE_ID = "angle"
TWO_PI = 2.0 * math.pi

# Coefficients de φ(ψ) - ψ
_THETA_COEFFICIENTS = {2: 8.0 / (5.0 * math.pi), 3: -8.0 / (5.0 * math.pi**2), 4: 2.0 / (5.0 * math.pi**3)}


@dataclass(frozen=True)
class RotationConfig:
    """
    Paramètres du banc d'essai.

    Attributes:
        c (tuple[float, float]): Décalage ajouté au vecteur tourné
        noise (bool): Ajoute la perturbation oscillante
        noise_frequency (float): Fréquence f de la perturbation
        noise_amplitude (float): Amplitude a de la perturbation
        start_tangent (tuple[float, float]): Départ du mode tangent (milieu des départs sécants)
        start_secant (tuple[tuple[float, float], tuple[float, float]]): Départs (x̌, x̂) du mode sécant
    """

    c: tuple[float, float] = (1.001, 10.01)
    noise: bool = False
    noise_frequency: float = 5000.0
    noise_amplitude: float = 1e-4
    start_tangent: tuple[float, float] = (1.65, 2.975)
    start_secant: tuple[tuple[float, float], tuple[float, float]] = ((-3.7, -2.05), (7.0, 8.0))


def angle(x1: float, x2: float) -> float:
    """
    Angle polaire de (x1, x2) dans [0, 2π[.

    Raises:
        ValueError: À l'origine
    """
    if x1 == 0.0 and x2 == 0.0:
        raise ValueError("angle non défini à l'origine")
    value = math.atan2(x2, x1)
    if value < 0.0:
        value += TWO_PI
    return 0.0 if value >= TWO_PI else value


def _angle_dx1(x1: float, x2: float) -> float:
    return -x2 / (x1 * x1 + x2 * x2)


def _angle_dx2(x1: float, x2: float) -> float:
    return x1 / (x1 * x1 + x2 * x2)


ANGLE = CustomElemental(elemental_id=ANGLE_ID, arity=2, value_fn=angle, partials=(_angle_dx1, _angle_dx2))


def build_rotation(cfg: RotationConfig | None = None) -> EvalProcedure:
    """
    Procédure 2 -> 2 de l'application de rotation.

    ∠x et θ = φ(∠x) - ∠x sont partagés entre les deux composantes.

    Args:
        cfg (RotationConfig | None): Paramètres (valeurs par défaut si None)

    Returns:
        EvalProcedure: Procédure avec l'élément personnalisé `angle`
    """
    cfg = cfg or RotationConfig()
    builder = TapeBuilder(2)
    builder.register_custom(ANGLE)
    x1, x2 = builder.input(0), builder.input(1)
    psi = builder.custom(ANGLE_ID, x1, x2)

    phi = psi
    for exponent, coefficient in _THETA_COEFFICIENTS.items():
        phi = builder.add(phi, builder.mul(builder.const(coefficient), builder.unary(OpKind.POWINT, psi, exponent)))
    theta = builder.sub(phi, psi)
    cos_theta, sin_theta = builder.unary(OpKind.COS, theta), builder.unary(OpKind.SIN, theta)

    first = builder.add(builder.sub(builder.mul(cos_theta, x1), builder.mul(sin_theta, x2)), builder.const(cfg.c[0]))
    second = builder.add(builder.add(builder.mul(sin_theta, x1), builder.mul(cos_theta, x2)), builder.const(cfg.c[1]))
    if cfg.noise:
        wave = builder.unary(OpKind.SIN, builder.mul(builder.const(cfg.noise_frequency), builder.add(x1, x2)))
        perturbation = builder.mul(wave, builder.const(cfg.noise_amplitude))
        first, second = builder.add(first, perturbation), builder.add(second, perturbation)

    proc = builder.build([first, second])
    _logger.debug(f"Application de rotation : {len(proc.nodes)} noeuds, bruit = {cfg.noise}")
    return proc


def reproduce_tables(
    cfg: RotationConfig | None = None, opts: NewtonOptions | None = None
) -> tuple[NewtonReport, NewtonReport]:
    """
    Lance les deux modes de Newton depuis les départs du banc d'essai.

    Returns:
        tuple[NewtonReport, NewtonReport]: Rapports tangent et sécant
    """
    cfg = cfg or RotationConfig()
    opts = opts or NewtonOptions()
    proc = build_rotation(cfg)
    tangent_report = newton_tangent(proc, cfg.start_tangent, opts)
    secant_report = newton_secant(proc, cfg.start_secant[0], cfg.start_secant[1], opts)
    _logger.info(
        f"Rotation (bruit = {cfg.noise}) : tangent {tangent_report.describe_status()} en {tangent_report.steps} pas, "
        f"sécant {secant_report.describe_status()} en {secant_report.steps} pas"
    )
    return tangent_report, secant_report


def _rows(tangent_report: NewtonReport, secant_report: NewtonReport) -> list[tuple[str, str, str]]:
    def cell(report: NewtonReport, k: int) -> str:
        return repr(report.residuals[k]) if k < len(report.residuals) else ""

    def rate(report: NewtonReport) -> str:
        return "" if report.rate_estimate is None else f"{report.rate_estimate:.12g}"

    count = max(len(tangent_report.residuals), len(secant_report.residuals))
    rows = [(str(k), cell(tangent_report, k), cell(secant_report, k)) for k in range(count)]
    rows.append(("taux", rate(tangent_report), rate(secant_report)))
    return rows


def residual_table_markdown(tangent_report: NewtonReport, secant_report: NewtonReport) -> str:
    lines = ["| itération | résidu (tangent) | résidu (sécant) |", "|---:|---:|---:|"]
    lines += [f"| {k} | {t} | {s} |" for k, t, s in _rows(tangent_report, secant_report)]
    return "\n".join(lines)


def residual_table_csv(tangent_report: NewtonReport, secant_report: NewtonReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["iteration", "tangent", "secant"])
    writer.writerows(_rows(tangent_report, secant_report))
    return buffer.getvalue()


def reports_json(tangent_report: NewtonReport, secant_report: NewtonReport, indent: int | None = 2) -> str:
    return json.dumps(
        {str(Mode.TANGENT): tangent_report.to_document(), str(Mode.SECANT): secant_report.to_document()},
        indent=indent,
    )

#!/usr/bin/env python3
"""
Itérations de Newton généralisées par linéarisation affine par morceaux

Chaque pas construit le modèle (tangent en x_k, sécant sur la paire x_{k-1}, x_k)
puis prend pour itéré suivant la racine du modèle la plus proche de son centre.
Les échecs sont consignés dans le rapport ; aucune exception ne traverse une itération.

Auteur: Hugues Le Gendre
Date: 2025
"""

import csv
import io
import json
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from enum import StrEnum
from typing import Optional

import numpy as np

from ..config import (
    ENUMERATION_CAP,
    JOBS,
    NEWTON_MAX_ITERATIONS,
    NEWTON_RESIDUAL_TOLERANCE,
    NEWTON_STEP_TOLERANCE,
    RATE_MIN_STEP_FACTOR,
    STAGNATION_ULPS,
)
from ..utils.logging import LoggingUtils
from ..utils.vectors import VectorLike, as_vector, inf_norm
from .errors import DomainError, EnumerationCapExceeded, InsufficientData, NoRoot, SingularJ
from .formats import NewtonReportDocument
from .linearize import Mode, PLModel, secant, tangent
from .plsolve import PLSolver
from .tape import EvalProcedure, evaluate

_logger = LoggingUtils.setup_simple_logger("Newton")


class SolverPreference(StrEnum):
    ENUMERATION = "enumeration"
    MODULUS = "modulus-then-enumeration"


class NewtonStatus(StrEnum):
    CONVERGED = "converged"
    NO_ROOT = "no-root"
    MAX_ITERATIONS = "max-iterations"
    DOMAIN_ERROR = "domain-error"
    STAGNATED = "stagnated"


@dataclass(frozen=True)
class NewtonOptions:
    """
    Paramètres d'une itération de Newton.

    Attributes:
        mode (Mode): tangent ou sécant
        max_iterations (int): Nombre maximal de pas
        residual_tolerance (float): Arrêt dès que ||F(x_k)||∞ <= tolérance
        step_tolerance (float): Arrêt (stagnation) dès que ||x_{k+1} - x_k||∞ <= tolérance, si > 0
        enumeration_cap (int): Limite d'énumération du solveur interne
        solver (SolverPreference): Énumération seule ou itération du module d'abord
        jobs (int): Parallélisme de l'énumération
    """

    mode: Mode = Mode.TANGENT
    max_iterations: int = NEWTON_MAX_ITERATIONS
    residual_tolerance: float = NEWTON_RESIDUAL_TOLERANCE
    step_tolerance: float = NEWTON_STEP_TOLERANCE
    enumeration_cap: int = ENUMERATION_CAP
    solver: SolverPreference = SolverPreference.ENUMERATION
    jobs: int = JOBS

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations doit être positif, reçu {self.max_iterations}")
        if self.residual_tolerance < 0.0 or self.step_tolerance < 0.0:
            raise ValueError("Les tolérances doivent être positives ou nulles")


@dataclass
class NewtonReport:
    """
    Résultat d'une itération de Newton.

    Attributes:
        mode (Mode): Mode de linéarisation
        iterates (list[np.ndarray]): Itérés x_k (points de départ compris)
        residuals (list[float]): ||F(x_k)||∞ pour chaque itéré
        status (NewtonStatus): Motif d'arrêt
        failed_at (int | None): Indice du pas en échec (no-root, domain-error)
        rate_estimate (float | None): Ordre de convergence estimé
    """

    mode: Mode
    iterates: list[np.ndarray] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    status: NewtonStatus = NewtonStatus.MAX_ITERATIONS
    failed_at: int | None = None
    rate_estimate: float | None = None
    starts: int = field(default=1, repr=False)

    @property
    def converged(self) -> bool:
        return self.status == NewtonStatus.CONVERGED

    @property
    def solution(self) -> Optional[np.ndarray]:
        return self.iterates[-1] if self.iterates else None

    @property
    def steps(self) -> int:
        """Nombre d'itérés calculés (points de départ exclus)."""
        return max(0, len(self.iterates) - self.starts)

    def describe_status(self) -> str:
        return self.status if self.failed_at is None else f"{self.status}({self.failed_at})"

    def to_document(self) -> NewtonReportDocument:
        return {
            "mode": str(self.mode),
            "status": str(self.status),
            "failed_at": self.failed_at,
            "iterates": [x.tolist() for x in self.iterates],
            "residuals": list(self.residuals),
            "rate_estimate": self.rate_estimate,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_document(), indent=indent)

    def to_table(self) -> str:
        lines = [f"{'itération':>9}  {'résidu':>18}"]
        lines += [f"{k:>9}  {residual:>18.9e}" for k, residual in enumerate(self.residuals)]
        lines.append(f"statut : {self.describe_status()}")
        rate = "n/d" if self.rate_estimate is None else f"{self.rate_estimate:.11g}"
        lines.append(f"taux estimé : {rate}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["iteration", "residual", *[f"x{i + 1}" for i in range(len(self.iterates[0]))]])
        for k, (x, residual) in enumerate(zip(self.iterates, self.residuals)):
            writer.writerow([k, repr(residual), *[repr(float(value)) for value in x]])
        return buffer.getvalue()


def rate_estimate(iterates: Sequence[VectorLike]) -> float:
    """
    Ordre de convergence empirique log(Δ_{k+1}/Δ_k) / log(Δ_k/Δ_{k-1}), Δ_k = ||x_{k+1} - x_k||∞.

    Évalué au dernier indice dont les trois pas dépassent le plancher absolu
    RATE_MIN_STEP_FACTOR * eps, sans mise à l'échelle par ||x||.

    Raises:
        InsufficientData: Moins de trois pas admissibles consécutifs
    """
    points = [as_vector(x) for x in iterates]
    eps = np.finfo(float).eps
    steps = [inf_norm(b - a) for a, b in zip(points, points[1:])]
    admissible = [step > RATE_MIN_STEP_FACTOR * eps for step in steps]
    for k in range(len(steps) - 2, 0, -1):
        if admissible[k - 1] and admissible[k] and admissible[k + 1]:
            denominator = math.log(steps[k] / steps[k - 1])
            if denominator != 0.0:
                return math.log(steps[k + 1] / steps[k]) / denominator
    raise InsufficientData(f"Pas assez de pas admissibles pour estimer le taux ({len(points)} itérés)")


def _solve_step(model: PLModel, opts: NewtonOptions) -> np.ndarray:
    solver = PLSolver(model.abs_normal, cap=opts.enumeration_cap, jobs=opts.jobs)
    if opts.solver == SolverPreference.MODULUS:
        # Hors contraction, la racine du module peut ne pas être la plus proche
        try:
            root = solver.modulus_iteration() if solver.modulus_contraction() < 1.0 else None
        except SingularJ:
            root = None
        if root is not None:
            return root
        _logger.debug("Itération du module inapplicable ou sans succès, repli sur l'énumération")
    return solver.min_norm_root(model.center)


def _stagnated(residuals: list[float]) -> bool:
    if len(residuals) < 3:
        return False
    window = residuals[-3:]
    floor = STAGNATION_ULPS * math.ulp(max(window))
    return abs(window[2] - window[1]) <= floor and abs(window[1] - window[0]) <= floor


def _run(
    proc: EvalProcedure,
    starts: list[np.ndarray],
    opts: NewtonOptions,
    build: Callable[[list[np.ndarray]], PLModel],
) -> NewtonReport:
    if proc.n != proc.m:
        raise ValueError(f"Système non carré : n = {proc.n}, m = {proc.m}")
    if proc.s > opts.enumeration_cap:
        raise EnumerationCapExceeded(proc.s, opts.enumeration_cap)
    report = NewtonReport(mode=opts.mode, starts=len(starts))
    for index, x in enumerate(starts):
        try:
            y, _ = evaluate(proc, x)
        except DomainError as e:
            _logger.warning(f"Point de départ hors domaine : {e}")
            report.status, report.failed_at = NewtonStatus.DOMAIN_ERROR, index
            return report
        report.iterates.append(x)
        report.residuals.append(inf_norm(y))

    for k in range(opts.max_iterations):
        if report.residuals[-1] <= opts.residual_tolerance:
            report.status = NewtonStatus.CONVERGED
            break
        try:
            model = build(report.iterates)
            x_next = _solve_step(model, opts)
            y_next, _ = evaluate(proc, x_next)
        except NoRoot:
            _logger.info(f"Pas {k} : le modèle n'a pas de racine")
            report.status, report.failed_at = NewtonStatus.NO_ROOT, k
            break
        except DomainError as e:
            _logger.info(f"Pas {k} : {e}")
            report.status, report.failed_at = NewtonStatus.DOMAIN_ERROR, k
            break
        step = inf_norm(x_next - report.iterates[-1])
        report.iterates.append(x_next)
        report.residuals.append(inf_norm(y_next))
        _logger.info(f"Pas {k} : résidu {report.residuals[-1]:.3e}, pas {step:.3e}, s = {model.s}")
        if report.residuals[-1] <= opts.residual_tolerance:
            report.status = NewtonStatus.CONVERGED
            break
        if _stagnated(report.residuals) or (opts.step_tolerance > 0.0 and step <= opts.step_tolerance):
            report.status = NewtonStatus.STAGNATED
            break
    else:
        report.status = NewtonStatus.MAX_ITERATIONS

    try:
        report.rate_estimate = rate_estimate(report.iterates)
    except InsufficientData:
        report.rate_estimate = None
    _logger.info(f"Newton {opts.mode} : {report.describe_status()} après {report.steps} pas")
    return report


def newton_tangent(proc: EvalProcedure, x0: VectorLike, opts: NewtonOptions | None = None) -> NewtonReport:
    """
    Newton tangent x_{k+1} = N(x_k).

    Args:
        proc (EvalProcedure): Procédure carrée sans Min/Max
        x0: Point de départ
        opts (NewtonOptions | None): Paramètres (mode forcé à tangent)

    Returns:
        NewtonReport: Itérés, résidus et statut

    Raises:
        EnumerationCapExceeded: Trop de noeuds Abs pour le solveur interne
    """
    options = NewtonOptions(mode=Mode.TANGENT) if opts is None else replace(opts, mode=Mode.TANGENT)
    return _run(proc, [as_vector(x0, proc.n, "x0")], options, lambda iterates: tangent(proc, iterates[-1]))


def newton_secant(
    proc: EvalProcedure, x0: VectorLike, x1: VectorLike, opts: NewtonOptions | None = None
) -> NewtonReport:
    """
    Newton sécant x_{k+1} = N(x_k, x_{k-1}), centré au milieu de la paire.

    Si x0 = x1, x0 n'est compté qu'une fois et le premier pas coïncide avec le pas tangent.
    """
    options = NewtonOptions(mode=Mode.SECANT) if opts is None else replace(opts, mode=Mode.SECANT)
    first = as_vector(x0, proc.n, "x0")
    second = as_vector(x1, proc.n, "x1")
    starts = [first] if np.array_equal(first, second) else [first, second]

    def build(iterates: list[np.ndarray]) -> PLModel:
        previous = iterates[-2] if len(iterates) > 1 else iterates[-1]
        return secant(proc, previous, iterates[-1])

    return _run(proc, starts, options, build)


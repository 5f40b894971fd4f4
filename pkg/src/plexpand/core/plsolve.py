#!/usr/bin/env python3
"""
Résolution de systèmes affines par morceaux donnés sous forme abs-normale

Chaque signature σ ∈ {-1, +1}^s fixe |z| = Σ z et ramène le système à un
système linéaire de taille n + s ; une solution est retenue si ses signes sont
compatibles avec σ.

Auteur: Hugues Le Gendre
Date: 2025
"""

import itertools
import math
from collections.abc import Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..config import (
    DEDUP_TOLERANCE,
    ENUMERATION_CAP,
    JOBS,
    MODULUS_MAX_ITERATIONS,
    MODULUS_TOLERANCE,
    ROOT_RESIDUAL_TOLERANCE,
    SIGN_TOLERANCE,
)
from ..utils.logging import Logger, LoggingUtils
from ..utils.vectors import VectorLike, as_vector, inf_norm
from .errors import EnumerationCapExceeded, NoRoot, RegularityError, SingularJ
from .formats import RootSetDocument
from .linearize import AbsNormalForm

Signature = tuple[int, ...]

# Écart relatif en dessous duquel deux distances sont considérées égales (départage)
_TIE_TOLERANCE = 1e-12


def iter_signatures(s: int, cap: int = ENUMERATION_CAP) -> Iterator[Signature]:
    """
    Signatures de {-1, +1}^s dans l'ordre lexicographique.

    Raises:
        EnumerationCapExceeded: Si s > cap
    """
    if s > cap:
        raise EnumerationCapExceeded(s, cap)
    return itertools.product((-1, 1), repeat=s)


def _is_singular(matrix: np.ndarray) -> bool:
    return matrix.size > 0 and np.linalg.cond(matrix) * np.finfo(float).eps >= 1.0


@dataclass(frozen=True, slots=True)
class Root:
    """
    Racine x d'une pièce σ ; `boundary` indique une variable de commutation nulle (racine sur un pli).
    """

    x: np.ndarray
    sigma: Signature
    det_sign: int
    boundary: bool = False


@dataclass(frozen=True)
class RootSet:
    roots: tuple[Root, ...] = ()
    singular_pieces: int = 0
    visited: int = 0

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self) -> Iterator[Root]:
        return iter(self.roots)

    def to_document(self) -> RootSetDocument:
        return {
            "roots": [
                {"x": root.x.tolist(), "sigma": list(root.sigma), "det_sign": root.det_sign} for root in self.roots
            ]
        }


@dataclass
class PLSolver:
    """
    Solveur d'une forme abs-normale carrée pour une valeur cible.

    Attributes:
        anf (AbsNormalForm): Forme abs-normale (n = m)
        target (np.ndarray): Valeur cible y (0 par défaut)
        cap (int): Limite d'énumération sur s
        jobs (int): Nombre de fils pour l'énumération
    """

    anf: AbsNormalForm
    target: np.ndarray | None = None
    cap: int = ENUMERATION_CAP
    jobs: int = JOBS
    logger: Logger = field(init=False, repr=False)

    def __post_init__(self):
        if self.anf.n != self.anf.m:
            raise ValueError(f"Système non carré : n = {self.anf.n}, m = {self.anf.m}")
        self.target = np.zeros(self.anf.m) if self.target is None else as_vector(self.target, self.anf.m, "target")
        self.logger = LoggingUtils.setup_simple_logger("PLSolver")

    @property
    def rhs(self) -> np.ndarray:
        """target - F̊ - b : second membre en Δy hors partie absolue."""
        return self.target - self.anf.offset - self.anf.b

    def residual(self, x: VectorLike) -> float:
        return inf_norm(self.anf.evaluate(x) - self.target)

    def residual_tolerance(self) -> float:
        return ROOT_RESIDUAL_TOLERANCE * (1.0 + inf_norm(self.target))

    def _solve_piece(self, sigma: Signature) -> Root | None | bool:
        """Racine de la pièce σ, None si incompatible, False si la pièce est singulière."""
        anf = self.anf
        n, s = anf.n, anf.s
        signs = np.asarray(sigma, dtype=float)
        system = np.zeros((n + s, n + s))
        system[:s, :n] = -anf.Z
        system[:s, n:] = np.eye(s) - anf.L * signs
        system[s:, :n] = anf.J
        system[s:, n:] = anf.Y * signs
        if _is_singular(system):
            return False
        solution = np.linalg.solve(system, np.concatenate([anf.c, self.rhs]))
        step, z = solution[:n], solution[n:]
        scale = SIGN_TOLERANCE * (1.0 + inf_norm(z))
        if np.any(signs * z < -scale):
            return None
        x = anf.center + step
        if self.residual(x) > self.residual_tolerance():
            self.logger.debug(f"σ = {sigma} : racine rejetée, résidu {self.residual(x):.3e}")
            return None
        matrix, _ = anf.piece(sigma)
        det_sign = 0 if _is_singular(matrix) else int(np.sign(np.linalg.det(matrix)))
        return Root(x=x, sigma=sigma, det_sign=det_sign, boundary=bool(np.any(np.abs(z) <= scale)))

    def _solve_chunk(self, signatures: Sequence[Signature]) -> list[Root | None | bool]:
        return [self._solve_piece(sigma) for sigma in signatures]

    def enumerate_roots(self) -> RootSet:
        """
        Toutes les racines, par énumération des 2^s pièces.

        Returns:
            RootSet: Racines dédupliquées, triées par signature

        Raises:
            EnumerationCapExceeded: Si s dépasse la limite
        """
        signatures = list(iter_signatures(self.anf.s, self.cap))
        if self.jobs > 1 and len(signatures) > 1:
            size = math.ceil(len(signatures) / self.jobs)
            chunks = [signatures[i : i + size] for i in range(0, len(signatures), size)]
            with ThreadPoolExecutor(max_workers=self.jobs) as executor:
                outcomes = [outcome for chunk in executor.map(self._solve_chunk, chunks) for outcome in chunk]
        else:
            outcomes = self._solve_chunk(signatures)

        roots: list[Root] = []
        singular = 0
        for outcome in outcomes:
            if outcome is False:
                singular += 1
            elif isinstance(outcome, Root):
                duplicate = next(
                    (kept for kept in roots if inf_norm(kept.x - outcome.x) <= DEDUP_TOLERANCE * (1.0 + inf_norm(kept.x))),
                    None,
                )
                if duplicate is None:
                    roots.append(outcome)
        self.logger.info(
            f"Énumération : {len(signatures)} signatures, {singular} pièces singulières, {len(roots)} racine(s)"
        )
        return RootSet(roots=tuple(roots), singular_pieces=singular, visited=len(signatures))

    def min_norm_root(self, center: VectorLike | None = None, roots: RootSet | None = None) -> np.ndarray:
        """
        Racine la plus proche du centre en norme infinie.

        Égalités départagées par la norme euclidienne puis par l'ordre lexicographique de x.

        Raises:
            NoRoot: Aucune racine
        """
        origin = self.anf.center if center is None else as_vector(center, self.anf.n, "center")
        candidates = list(self.enumerate_roots() if roots is None else roots)
        if not candidates:
            raise NoRoot("Le modèle affine par morceaux n'a aucune racine")
        for norm in (np.inf, 2):
            distances = [float(np.linalg.norm(root.x - origin, ord=norm)) for root in candidates]
            best = min(distances)
            candidates = [
                root
                for root, distance in zip(candidates, distances)
                if distance <= best + _TIE_TOLERANCE * (1.0 + best)
            ]
        return min(candidates, key=lambda root: tuple(root.x)).x.copy()

    def degree(self, roots: RootSet | None = None) -> int:
        """
        Degré : somme des signes de det(A_σ) sur les préimages de la cible.

        Raises:
            RegularityError: Cible non régulière (racine sur un pli ou pièce singulière)
        """
        root_set = self.enumerate_roots() if roots is None else roots
        for root in root_set:
            if root.boundary or root.det_sign == 0:
                raise RegularityError(f"Valeur cible non régulière : racine {root.x.tolist()} (σ = {root.sigma})")
        return sum(root.det_sign for root in root_set)

    def modulus_contraction(self) -> float:
        """
        Facteur ||L - Z J^-1 Y||∞ de l'application z -> c + Z Δx(z) + L|z|.

        En dessous de 1, le point fixe est unique : la racine l'est aussi.

        Raises:
            SingularJ: J singulière
        """
        anf = self.anf
        if _is_singular(anf.J):
            raise SingularJ("J singulière : itération du module inapplicable")
        if anf.s == 0:
            return 0.0
        return float(np.linalg.norm(anf.L - anf.Z @ np.linalg.solve(anf.J, anf.Y), ord=np.inf))

    def modulus_iteration(
        self, max_iterations: int = MODULUS_MAX_ITERATIONS, tolerance: float = MODULUS_TOLERANCE
    ) -> Optional[np.ndarray]:
        """
        Point fixe z <- c + Z Δx + L|z|, Δx <- J^-1 (target - F̊ - b - Y|z|).

        Returns:
            Optional[np.ndarray]: Racine x, ou None sans convergence

        Raises:
            SingularJ: J singulière
        """
        anf = self.anf
        if _is_singular(anf.J):
            raise SingularJ("J singulière : itération du module inapplicable")
        limit = tolerance * (1.0 + inf_norm(self.target))
        step = np.zeros(anf.n)
        for iteration in range(1, max_iterations + 1):
            z = anf.switching(step)
            step = np.linalg.solve(anf.J, self.rhs - anf.Y @ np.abs(z))
            if not np.all(np.isfinite(step)):
                break
            if self.residual(anf.center + step) <= limit:
                self.logger.debug(f"Itération du module : convergence en {iteration} itération(s)")
                return anf.center + step
        self.logger.debug("Itération du module : pas de convergence")
        return None


def enumerate_roots(
    anf: AbsNormalForm, target: VectorLike | None = None, cap: int = ENUMERATION_CAP, jobs: int = JOBS
) -> RootSet:
    return PLSolver(anf, target, cap, jobs).enumerate_roots()


def min_norm_root(
    anf: AbsNormalForm,
    center: VectorLike | None = None,
    target: VectorLike | None = None,
    cap: int = ENUMERATION_CAP,
    jobs: int = JOBS,
) -> np.ndarray:
    """
    Racine de norme minimale ||x - center||∞ du modèle (Newton généralisé).

    Raises:
        NoRoot: Aucune racine
    """
    return PLSolver(anf, target, cap, jobs).min_norm_root(center)


def degree(anf: AbsNormalForm, target: VectorLike | None = None, cap: int = ENUMERATION_CAP, jobs: int = JOBS) -> int:
    return PLSolver(anf, target, cap, jobs).degree()


def modulus_iteration(
    anf: AbsNormalForm,
    target: VectorLike | None = None,
    max_iterations: int = MODULUS_MAX_ITERATIONS,
    tolerance: float = MODULUS_TOLERANCE,
) -> Optional[np.ndarray]:
    return PLSolver(anf, target).modulus_iteration(max_iterations, tolerance)

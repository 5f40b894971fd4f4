#!/usr/bin/env python3
"""
Constantes de Lipschitz calculables β_F et γ_F sur une boîte K

Les enclosures des noeuds sont obtenues par arithmétique d'intervalles ; les
récurrences portent sur la procédure où chaque produit a été réécrit par
l'identité d'Appolonius u*w = ((u+w)² - (u-w)²)/4, de sorte que seuls restent
des additions, des valeurs absolues, des univariés et des multiplications
par une constante.

Auteur: Hugues Le Gendre
Date: 2025
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..config import ENUMERATION_CAP, SAMPLING_POINTS
from ..utils.logging import LoggingUtils
from ..utils.vectors import VectorLike, as_vector, inf_norm
from .elementals import OpKind
from .errors import CertError, DomainError, SingularPiece
from .formats import CertDocument
from .interval import Interval
from .linearize import AbsNormalForm, PLModel
from .plsolve import iter_signatures
from .tape import CustomElemental, EvalProcedure, Node, TapeBuilder, evaluate, lower_minmax, rewrite

_logger = LoggingUtils.setup_simple_logger("Bounds")

# Tolérance des vérifications de bornes : relative puis absolue
_RELATIVE_SLACK = 1e-9
_ABSOLUTE_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class BoxK:
    """Boîte fermée K = [lower, upper] de R^n."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = as_vector(self.lower, name="lower")
        upper = as_vector(self.upper, lower.shape[0], "upper")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("La boîte K doit être bornée")
        if np.any(lower > upper):
            raise ValueError(f"Boîte vide : lower {lower.tolist()} > upper {upper.tolist()}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def n(self) -> int:
        return self.lower.shape[0]

    def intervals(self) -> list[Interval]:
        return [Interval(float(lo), float(hi)) for lo, hi in zip(self.lower, self.upper)]

    def contains(self, x: VectorLike) -> bool:
        point = as_vector(x, self.n)
        return bool(np.all(self.lower <= point) and np.all(point <= self.upper))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """`count` points uniformes dans K, une ligne par point."""
        return rng.uniform(self.lower, self.upper, size=(count, self.n))

    def to_document(self) -> dict[str, list[float]]:
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist()}


def _sup_derivatives(kind: OpKind, arg: Interval, exponent: int | None) -> tuple[float, float]:
    """
    sup |phi'| et sup |phi''| sur l'enclosure de l'argument, arrondis vers le haut.

    Raises:
        CertError: Borne infinie
    """
    match kind:
        case OpKind.NEG:
            first, second = 1.0, 0.0
        case OpKind.SIN:
            first, second = arg.cos().mag(), arg.sin().mag()
        case OpKind.COS:
            first, second = arg.sin().mag(), arg.cos().mag()
        case OpKind.EXP:
            first = second = arg.exp().hi
        case OpKind.LOG:
            first, second = 1.0 / arg.lo, 1.0 / (arg.lo * arg.lo)
        case OpKind.SQRT:
            if arg.lo <= 0.0:
                raise CertError(f"sqrt' non bornée sur {arg}")
            first, second = 0.5 / math.sqrt(arg.lo), 0.25 / (arg.lo * math.sqrt(arg.lo))
        case OpKind.SQUARE:
            first, second = 2.0 * arg.mag(), 2.0
        case OpKind.POWINT:
            first = exponent * math.pow(arg.mag(), exponent - 1)
            second = exponent * (exponent - 1) * math.pow(arg.mag(), exponent - 2)
        case OpKind.RECIP:
            low = arg.mig()
            first, second = 1.0 / (low * low), 2.0 / (low * low * low)
        case _:
            raise ValueError(f"Pas de constantes de Lipschitz pour {kind}")
    if not (math.isfinite(first) and math.isfinite(second)):
        raise CertError(f"{kind.value} : dérivées non bornées sur {arg}")
    return math.nextafter(first, math.inf), math.nextafter(second, math.inf)


@dataclass(frozen=True, slots=True)
class _CustomBounds:
    enclosure: Interval
    lipschitz: tuple[float, ...]  # sup |d_a phi| par argument
    curvature: float  # constante de Lipschitz du gradient (norme 1 sur norme infinie)
    rigorous: bool


@lru_cache(maxsize=256)
def _custom_bounds(elemental: CustomElemental, args: tuple[Interval, ...]) -> _CustomBounds:
    mids = [arg.mid for arg in args]
    half_widths = [0.5 * arg.width for arg in args]
    if elemental.lipschitz_hint is not None:
        # Accroissements finis autour du centre de la boîte
        radius = max(half_widths)
        lipschitz = tuple(
            abs(float(partial(*mids))) + hint * radius
            for partial, hint in zip(elemental.partials, elemental.lipschitz_hint)
        )
        value = float(elemental.value_fn(*mids))
        spread = sum(bound * width for bound, width in zip(lipschitz, half_widths))
        enclosure = Interval.hull(value - spread, value + spread)
        return _CustomBounds(enclosure, lipschitz, sum(elemental.lipschitz_hint), True)

    rng = np.random.default_rng(0)
    lower = np.array([arg.lo for arg in args])
    upper = np.array([arg.hi for arg in args])
    points = np.vstack([lower, upper, np.array(mids), rng.uniform(lower, upper, size=(SAMPLING_POINTS, len(args)))])
    values = [float(elemental.value_fn(*point)) for point in points]
    partials = np.array([[float(partial(*point)) for partial in elemental.partials] for point in points])
    lipschitz = tuple(float(np.max(np.abs(partials[:, a]))) for a in range(elemental.arity))
    if elemental.arity == 1 and elemental.higher_derivatives:
        curvature = max(abs(float(elemental.higher_derivatives[0](point[0]))) for point in points)
    else:
        step = 1e-6 * (1.0 + float(np.max(upper - lower)))
        curvature = 0.0
        for point, gradient in zip(points[: SAMPLING_POINTS // 10], partials):
            total = 0.0
            for b in range(elemental.arity):
                shifted = point.copy()
                shifted[b] += step if shifted[b] + step <= upper[b] else -step
                moved = np.array([float(partial(*shifted)) for partial in elemental.partials])
                total += float(np.sum(np.abs(moved - gradient))) / step
            curvature = max(curvature, total)
    _logger.warning(f"{elemental.elemental_id} : bornes par échantillonnage, certificat non rigoureux")
    return _CustomBounds(Interval.hull(*values), lipschitz, curvature, False)


def _node_enclosure(proc: EvalProcedure, node: Node, box: list[Interval], enclosures: list[Interval]) -> Interval:
    op = node.op
    args = [enclosures[arg] for arg in node.args]
    match op.kind:
        case OpKind.INPUT:
            return box[op.slot]
        case OpKind.CONST:
            return Interval.point(op.value)
        case OpKind.ADD:
            return args[0] + args[1]
        case OpKind.SUB:
            return args[0] - args[1]
        case OpKind.MUL:
            return args[0] * args[1]
        case OpKind.DIV:
            return args[0] / args[1]
        case OpKind.MIN:
            return Interval(min(args[0].lo, args[1].lo), min(args[0].hi, args[1].hi))
        case OpKind.MAX:
            return Interval(max(args[0].lo, args[1].lo), max(args[0].hi, args[1].hi))
        case OpKind.NEG:
            return -args[0]
        case OpKind.ABS:
            return args[0].abs()
        case OpKind.SIN:
            return args[0].sin()
        case OpKind.COS:
            return args[0].cos()
        case OpKind.EXP:
            return args[0].exp()
        case OpKind.LOG:
            return args[0].log()
        case OpKind.SQRT:
            return args[0].sqrt()
        case OpKind.SQUARE:
            return args[0].square()
        case OpKind.POWINT:
            return args[0].powint(op.exponent)
        case OpKind.RECIP:
            return args[0].recip()
        case OpKind.CUSTOM:
            return _custom_bounds(proc.customs[op.elemental_id], tuple(args)).enclosure
        case _:
            raise ValueError(f"Opcode inconnu {op.kind}")


def interval_evaluate(proc: EvalProcedure, K: BoxK) -> list[Interval]:
    """
    Enclosure [lo_i, hi_i] de chaque valeur v_i(K), par propagation d'intervalles.

    Args:
        proc (EvalProcedure): Procédure
        K (BoxK): Boîte des entrées

    Returns:
        list[Interval]: Une enclosure par noeud

    Raises:
        DomainError: Une enclosure rencontre la frontière du domaine d'un élément
    """
    if K.n != proc.n:
        raise ValueError(f"Boîte de dimension {K.n}, procédure de dimension {proc.n}")
    box = K.intervals()
    enclosures: list[Interval] = []
    for index, node in enumerate(proc.nodes):
        try:
            enclosure = _node_enclosure(proc, node, box, enclosures)
        except (ArithmeticError, ValueError) as e:
            raise DomainError(index, f"enclosure de {node.op.label()} hors domaine ({e})") from e
        if not (math.isfinite(enclosure.lo) and math.isfinite(enclosure.hi)):
            raise DomainError(index, f"enclosure non bornée {enclosure}")
        enclosures.append(enclosure)
    return enclosures


def _is_const(builder: TapeBuilder, index: int) -> bool:
    return builder.node(index).op.kind is OpKind.CONST


def _appolonius(builder: TapeBuilder, u: int, w: int) -> int:
    if _is_const(builder, u) or _is_const(builder, w):
        return builder.mul(u, w)
    if u == w:
        return builder.unary(OpKind.SQUARE, u)
    plus = builder.unary(OpKind.SQUARE, builder.add(u, w))
    minus = builder.unary(OpKind.SQUARE, builder.sub(u, w))
    return builder.mul(builder.sub(plus, minus), builder.const(0.25))


def _lower_mul(builder: TapeBuilder, node: Node, args: list[int]) -> int:
    return _appolonius(builder, *args)


def _lower_div(builder: TapeBuilder, node: Node, args: list[int]) -> int:
    u, w = args
    if _is_const(builder, w) and builder.node(w).op.value != 0.0:
        return builder.mul(u, builder.const(1.0 / builder.node(w).op.value))
    return _appolonius(builder, u, builder.unary(OpKind.RECIP, w))


def multiplication_lowering(proc: EvalProcedure) -> EvalProcedure:
    """
    Réécrit chaque produit par u*w = ((u+w)² - (u-w)²)/4 et chaque quotient u/w par u*recip(w).

    Les produits par une constante sont conservés (mise à l'échelle).

    Args:
        proc (EvalProcedure): Procédure

    Returns:
        EvalProcedure: Procédure équivalente (à l'arrondi près) sans produit de deux variables
    """
    return rewrite(proc, {OpKind.MUL: _lower_mul, OpKind.DIV: _lower_div})


def _holds(lhs: float, bound: float) -> bool:
    return lhs <= bound * (1.0 + _RELATIVE_SLACK) + _ABSOLUTE_SLACK


def _distance(first: VectorLike, second: VectorLike) -> float:
    return inf_norm(np.asarray(first, dtype=float) - np.asarray(second, dtype=float))


@dataclass(frozen=True, eq=False)
class LipschitzCerts:
    """
    Certificats β/γ sur K, pour la procédure réduite (Min/Max et produits réécrits).

    Attributes:
        box (BoxK): Boîte K
        proc (EvalProcedure): Procédure réduite sur laquelle portent les constantes par noeud
        enclosures (tuple[Interval, ...]): Enclosure de chaque noeud
        betas (np.ndarray): β_v par noeud
        gammas (np.ndarray): γ_v par noeud
        beta_F (float): max des β sur les sorties
        gamma_F (float): max des γ sur les sorties
        rigorous (bool): Faux si un élément personnalisé a été borné par échantillonnage
    """

    box: BoxK
    proc: EvalProcedure
    enclosures: tuple[Interval, ...]
    betas: np.ndarray
    gammas: np.ndarray
    beta_F: float
    gamma_F: float
    rigorous: bool

    def lipschitz_bound(self, x: VectorLike, x_tilde: VectorLike) -> float:
        """β_F ||x - x̃||."""
        return self.beta_F * _distance(x, x_tilde)

    def approximation_bound(self, x: VectorLike, xlo: VectorLike, xhi: VectorLike | None = None) -> float:
        """½ γ_F ||x - x̌|| ||x - x̂|| (tangent : x̌ = x̂ = x̊)."""
        xhi = xlo if xhi is None else xhi
        return 0.5 * self.gamma_F * _distance(x, xlo) * _distance(x, xhi)

    def model_shift_bound(
        self, x: VectorLike, ylo: VectorLike, yhi: VectorLike, zlo: VectorLike, zhi: VectorLike
    ) -> float:
        """Borne de ||◊_y F(x) - ◊_z F(x)|| entre deux modèles sécants (ou tangents si lo = hi)."""
        upper_shift = _distance(zhi, yhi) * max(_distance(x, ylo), _distance(x, zlo))
        lower_shift = _distance(zlo, ylo) * max(_distance(x, yhi), _distance(x, zhi))
        return self.gamma_F * max(upper_shift, lower_shift)

    def increment_shift_bound(
        self, dx: VectorLike, ylo: VectorLike, yhi: VectorLike, zlo: VectorLike, zhi: VectorLike
    ) -> float:
        """Borne de ||Δ_z F(Δx) - Δ_y F(Δx)|| entre les parties incrémentales."""
        ylo, yhi, zlo, zhi = (np.asarray(v, dtype=float) for v in (ylo, yhi, zlo, zhi))
        centers = _distance(0.5 * (zlo + zhi), 0.5 * (ylo + yhi))
        spread_y, spread_z = _distance(yhi, ylo), _distance(zhi, zlo)
        step = inf_norm(dx)
        return (
            2.0 * self.beta_F * centers
            + 0.5 * self.gamma_F * (centers + max(spread_y, spread_z)) ** 2
            + self.gamma_F * (centers + 0.5 * (spread_y + spread_z)) * step
        )

    def refinement_bound(self, x: VectorLike, y: VectorLike, zlo: VectorLike, zhi: VectorLike) -> float:
        """Borne de ||◊_{ž}^{ẑ} F(x) - ◊_{ẙ} F(x)|| exprimée en distances à ẙ."""
        upper, lower = _distance(zhi, y), _distance(zlo, y)
        return self.gamma_F * (max(upper, lower) * _distance(x, y) + 0.5 * upper * lower)

    def check_lipschitz(self, proc: EvalProcedure, x: VectorLike, x_tilde: VectorLike, *models: PLModel) -> bool:
        """Vérifie la borne de Lipschitz pour F (x, x̃ dans K) et pour chaque modèle donné."""
        bound = self.lipschitz_bound(x, x_tilde)
        gaps = [_distance(evaluate(proc, x)[0], evaluate(proc, x_tilde)[0])]
        gaps += [_distance(model.eval_model(x), model.eval_model(x_tilde)) for model in models]
        return all(_holds(gap, bound) for gap in gaps)

    def check_approximation(self, model: PLModel, x: VectorLike) -> bool:
        """Vérifie ||F(x) - ◊F(x)|| <= ½ γ_F ||x - x̌|| ||x - x̂|| pour x dans K."""
        gap = _distance(evaluate(model.proc, x)[0], model.eval_model(x))
        return _holds(gap, self.approximation_bound(x, model.lower, model.upper))

    def check_model_shift(self, first: PLModel, second: PLModel, x: VectorLike) -> bool:
        gap = _distance(first.eval_model(x), second.eval_model(x))
        return _holds(gap, self.model_shift_bound(x, first.lower, first.upper, second.lower, second.upper))

    def check_increment_shift(self, first: PLModel, second: PLModel, dx: VectorLike) -> bool:
        gap = _distance(first.eval_increment(dx), second.eval_increment(dx))
        return _holds(gap, self.increment_shift_bound(dx, first.lower, first.upper, second.lower, second.upper))

    def check_refinement(self, tangent_model: PLModel, secant_model: PLModel, x: VectorLike) -> bool:
        gap = _distance(secant_model.eval_model(x), tangent_model.eval_model(x))
        return _holds(gap, self.refinement_bound(x, tangent_model.center, secant_model.lower, secant_model.upper))

    def to_document(self) -> CertDocument:
        return {
            "K": self.box.to_document(),
            "per_node": [
                {"lo": enclosure.lo, "hi": enclosure.hi, "beta": float(beta), "gamma": float(gamma)}
                for enclosure, beta, gamma in zip(self.enclosures, self.betas, self.gammas)
            ],
            "beta_F": self.beta_F,
            "gamma_F": self.gamma_F,
            "rigorous": self.rigorous,
        }


def beta_gamma(proc: EvalProcedure, K: BoxK) -> LipschitzCerts:
    """
    Constantes β_v, γ_v de chaque noeud et β_F, γ_F sur K.

    Récurrences : entrées (1, 0), constantes (0, 0), additions sommées, valeur absolue
    transparente, univariés β_v = L β_u et γ_v = L γ_u + L' β_u² avec L = sup|phi'|
    et L' = sup|phi''| sur l'enclosure de l'argument.

    Args:
        proc (EvalProcedure): Procédure (Min/Max et produits sont réécrits au préalable)
        K (BoxK): Boîte

    Returns:
        LipschitzCerts: Certificats

    Raises:
        DomainError: Enclosure hors domaine
        CertError: Constante non bornée ou non finie
    """
    reduced = multiplication_lowering(lower_minmax(proc))
    enclosures = interval_evaluate(reduced, K)
    count = len(reduced.nodes)
    betas, gammas = np.zeros(count), np.zeros(count)
    rigorous = True
    for index, node in enumerate(reduced.nodes):
        op = node.op
        args = node.args
        match op.kind:
            case OpKind.INPUT:
                betas[index] = 1.0
            case OpKind.CONST:
                pass
            case OpKind.ADD | OpKind.SUB:
                betas[index] = betas[args[0]] + betas[args[1]]
                gammas[index] = gammas[args[0]] + gammas[args[1]]
            case OpKind.MUL:
                # Après réécriture, un des deux facteurs est constant
                const_side = 0 if reduced.nodes[args[0]].op.kind is OpKind.CONST else 1
                if reduced.nodes[args[const_side]].op.kind is not OpKind.CONST:
                    raise CertError(f"Noeud {index} : produit de deux variables non réécrit")
                factor = abs(reduced.nodes[args[const_side]].op.value)
                betas[index] = factor * betas[args[1 - const_side]]
                gammas[index] = factor * gammas[args[1 - const_side]]
            case OpKind.ABS:
                betas[index] = betas[args[0]]
                gammas[index] = gammas[args[0]]
            case OpKind.CUSTOM:
                bounds = _custom_bounds(reduced.customs[op.elemental_id], tuple(enclosures[a] for a in args))
                rigorous = rigorous and bounds.rigorous
                betas[index] = sum(bound * betas[a] for bound, a in zip(bounds.lipschitz, args))
                gammas[index] = sum(bound * gammas[a] for bound, a in zip(bounds.lipschitz, args))
                gammas[index] += bounds.curvature * sum(betas[a] for a in args) ** 2
            case _:
                first, second = _sup_derivatives(op.kind, enclosures[args[0]], op.exponent)
                betas[index] = first * betas[args[0]]
                gammas[index] = first * gammas[args[0]] + second * betas[args[0]] ** 2
        if not (math.isfinite(betas[index]) and math.isfinite(gammas[index])):
            raise CertError(f"Noeud {index} ({op.label()}) : constante non finie")
    outputs = list(reduced.outputs)
    certs = LipschitzCerts(
        box=K,
        proc=reduced,
        enclosures=tuple(enclosures),
        betas=betas,
        gammas=gammas,
        beta_F=float(np.max(betas[outputs])),
        gamma_F=float(np.max(gammas[outputs])),
        rigorous=rigorous,
    )
    _logger.info(f"Certificats : beta_F = {certs.beta_F:.6g}, gamma_F = {certs.gamma_F:.6g}, rigoureux = {rigorous}")
    return certs


def stability_radius(anf: AbsNormalForm, certs: LipschitzCerts, cap: int = ENUMERATION_CAP) -> tuple[float, float]:
    """
    rho_F = min sur les pièces de 1/||A_σ^-1||, et rayon rho_F/γ_F de degré constant.

    Args:
        anf (AbsNormalForm): Forme abs-normale carrée
        certs (LipschitzCerts): Certificats fournissant γ_F
        cap (int): Limite d'énumération sur s

    Returns:
        tuple[float, float]: (rho_F, rayon), rayon infini (non borné) si γ_F = 0

    Raises:
        SingularPiece: Une pièce a une matrice singulière
        EnumerationCapExceeded: s dépasse la limite
    """
    if anf.n != anf.m:
        raise ValueError(f"Forme non carrée : n = {anf.n}, m = {anf.m}")
    rho = math.inf
    for sigma in iter_signatures(anf.s, cap):
        matrix, _ = anf.piece(sigma)
        if np.linalg.cond(matrix) * np.finfo(float).eps >= 1.0:
            raise SingularPiece(sigma)
        rho = min(rho, 1.0 / float(np.linalg.norm(np.linalg.inv(matrix), ord=np.inf)))
    radius = math.inf if certs.gamma_F == 0.0 else rho / certs.gamma_F
    _logger.info(f"rho_F = {rho:.6g}, rayon = {'non borné' if math.isinf(radius) else f'{radius:.6g}'}")
    return rho, radius

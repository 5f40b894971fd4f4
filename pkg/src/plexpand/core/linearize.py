#!/usr/bin/env python3
"""
Linéarisation affine par morceaux (modes tangent et sécant) et forme abs-normale

Auteur: Hugues Le Gendre
Date: 2025
"""

import json
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property
from typing import Optional

import numpy as np

from ..config import SERIES_KERNEL_ORDER
from ..utils.logging import LoggingUtils
from ..utils.vectors import VectorLike, as_vector
from .elementals import OpKind, unary_derivative
from .errors import DerivativeDomainError, DomainError
from .formats import AbsNormalDocument, AbsNormalDocument_check_type
from .kernels import MidRad, difference_slope, secant_abs, secant_binary, secant_unary, series_secant
from .tape import CustomElemental, EvalProcedure, evaluate

_logger = LoggingUtils.setup_simple_logger("Linearize")


class Mode(StrEnum):
    TANGENT = "tangent"
    SECANT = "secant"


@dataclass(frozen=True, slots=True)
class LinearNode:
    """
    Incrément Δv_i = somme des coefficients * Δv_arg ; une entrée porte son indice `slot`.
    """

    args: tuple[int, ...] = ()
    coefficients: tuple[float, ...] = ()
    slot: int | None = None


@dataclass(frozen=True, slots=True)
class AbsNode:
    """Incrément Δv_i = |anchor + Δv_arg| - anchor_value."""

    arg: int
    anchor: float
    anchor_value: float


ModelNode = LinearNode | AbsNode


@dataclass(frozen=True, eq=False)
class AbsNormalForm:
    """
    Forme abs-normale d'un modèle affine par morceaux :

        z  = c + Z Δx + L |z|      (L strictement triangulaire inférieure)
        Δy = b + J Δx + Y |z|

    avec y = offset + Δy et Δx = x - center.
    """

    center: np.ndarray
    offset: np.ndarray
    c: np.ndarray
    b: np.ndarray
    Z: np.ndarray
    L: np.ndarray
    J: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        n, m, s = self.n, self.m, self.s
        expected = {
            "offset": (m,),
            "c": (s,),
            "b": (m,),
            "Z": (s, n),
            "L": (s, s),
            "J": (m, n),
            "Y": (m, s),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} de forme {getattr(self, name).shape}, {shape} attendue")
        if np.any(np.triu(self.L) != 0.0):
            raise ValueError("L doit être strictement triangulaire inférieure")

    @property
    def n(self) -> int:
        return self.center.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[0]

    @property
    def s(self) -> int:
        return self.c.shape[0]

    def switching(self, dx: VectorLike) -> np.ndarray:
        """Variables de commutation z par balayage avant."""
        step = as_vector(dx, self.n, "Δx")
        z = self.c + self.Z @ step
        for k in range(self.s):
            z[k] += self.L[k, :k] @ np.abs(z[:k])
        return z

    def increment(self, dx: VectorLike) -> np.ndarray:
        step = as_vector(dx, self.n, "Δx")
        return self.b + self.J @ step + self.Y @ np.abs(self.switching(step))

    def evaluate(self, x: VectorLike) -> np.ndarray:
        """Valeur du modèle offset + Δy(x - center)."""
        return self.offset + self.increment(as_vector(x, self.n) - self.center)

    def signature(self, dx: VectorLike) -> tuple[int, ...]:
        """Signature de la pièce active en Δx (les zéros comptent comme +1)."""
        return tuple(1 if value >= 0.0 else -1 for value in self.switching(dx))

    def piece(self, sigma: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        """
        Fonction de sélection affine de la signature sigma, en variable Δx.

        Args:
            sigma: Signes dans {-1, +1}^s

        Returns:
            tuple[np.ndarray, np.ndarray]: (A, d) tels que Δy = d + A Δx sur la pièce
        """
        if len(sigma) != self.s or any(sign not in (-1, 1) for sign in sigma):
            raise ValueError(f"Signature invalide : {tuple(sigma)}")
        if self.s == 0:
            return self.J.copy(), self.b.copy()
        signs = np.asarray(sigma, dtype=float)
        # (I - L Σ) est unitriangulaire inférieure, donc inversible
        resolvent = np.linalg.solve(np.eye(self.s) - self.L * signs, np.column_stack([self.c, self.Z]))
        weighted = self.Y * signs
        return self.J + weighted @ resolvent[:, 1:], self.b + weighted @ resolvent[:, 0]

    def to_document(self) -> AbsNormalDocument:
        return {
            "n": self.n,
            "m": self.m,
            "s": self.s,
            "center": self.center.tolist(),
            "offset": self.offset.tolist(),
            "c": self.c.tolist(),
            "b": self.b.tolist(),
            "Z": self.Z.tolist(),
            "L": self.L.tolist(),
            "J": self.J.tolist(),
            "Y": self.Y.tolist(),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_document(), indent=indent)

    @classmethod
    def from_document(cls, document: AbsNormalDocument) -> "AbsNormalForm":
        n, m, s = document["n"], document["m"], document["s"]

        def matrix(name: str, rows: int, columns: int) -> np.ndarray:
            return np.asarray(document[name], dtype=float).reshape(rows, columns)

        return cls(
            center=as_vector(document["center"], n, "center"),
            offset=as_vector(document["offset"], m, "offset"),
            c=np.asarray(document["c"], dtype=float).reshape(s),
            b=as_vector(document["b"], m, "b"),
            Z=matrix("Z", s, n),
            L=matrix("L", s, s),
            J=matrix("J", m, n),
            Y=matrix("Y", m, s),
        )

    @classmethod
    def from_json(cls, data: str) -> Optional["AbsNormalForm"]:
        """
        Lit une forme abs-normale JSON ; None (et un message d'erreur) si le document est invalide.
        """
        document = json.loads(data)
        if not AbsNormalDocument_check_type(document):
            _logger.error(f"Forme abs-normale JSON invalide : {document}")
            return None
        try:
            return cls.from_document(document)
        except ValueError as e:
            _logger.error(f"Forme abs-normale JSON incohérente : {e}")
            return None


@dataclass(frozen=True, eq=False)
class PLModel:
    """
    Modèle affine par morceaux de F autour de x̊ (tangent) ou de la paire (x̌, x̂) (sécant).

    Attributes:
        mode (Mode): tangent ou sécant
        proc (EvalProcedure): Procédure linéarisée
        lower (np.ndarray): x̌ (égal à x̊ en mode tangent)
        upper (np.ndarray): x̂ (égal à x̊ en mode tangent)
        center (np.ndarray): x̊ = (x̌ + x̂)/2
        ref_output (np.ndarray): F̊ (F(x̊) en tangent, (F(x̌) + F(x̂))/2 en sécant)
        nodes (tuple[ModelNode, ...]): Règle d'incrément de chaque noeud
        mids (np.ndarray): v̊_i par noeud
        rads (np.ndarray): δv_i par noeud (nuls en mode tangent)
    """

    mode: Mode
    proc: EvalProcedure
    lower: np.ndarray
    upper: np.ndarray
    center: np.ndarray
    ref_output: np.ndarray
    nodes: tuple[ModelNode, ...]
    mids: np.ndarray
    rads: np.ndarray

    @property
    def n(self) -> int:
        return self.proc.n

    @property
    def m(self) -> int:
        return self.proc.m

    @property
    def s(self) -> int:
        return sum(1 for node in self.nodes if isinstance(node, AbsNode))

    def eval_increment(self, dx: VectorLike) -> np.ndarray:
        """ΔF(·; Δx), continue et affine par morceaux en Δx."""
        step = as_vector(dx, self.n, "Δx")
        increments = np.zeros(len(self.nodes))
        for index, node in enumerate(self.nodes):
            match node:
                case AbsNode(arg=arg, anchor=anchor, anchor_value=anchor_value):
                    increments[index] = abs(anchor + increments[arg]) - anchor_value
                case LinearNode(slot=slot) if slot is not None:
                    increments[index] = step[slot]
                case LinearNode(args=args, coefficients=coefficients):
                    increments[index] = sum(coef * increments[arg] for arg, coef in zip(args, coefficients))
        return increments[list(self.proc.outputs)]

    def eval_model(self, x: VectorLike) -> np.ndarray:
        """F̊ + ΔF(·; x - x̊)."""
        return self.ref_output + self.eval_increment(as_vector(x, self.n) - self.center)

    @cached_property
    def abs_normal(self) -> AbsNormalForm:
        return _accumulate_abs_normal(self)

    def jacobian_at(self, dx: VectorLike) -> np.ndarray:
        """Jacobienne de la pièce active en Δx."""
        form = self.abs_normal
        return form.piece(form.signature(dx))[0]


def _derivative_failure(index: int, error: Exception) -> DerivativeDomainError:
    detail = error.detail if isinstance(error, DomainError) else str(error)
    return DerivativeDomainError(index, f"pente non définie ({detail})")


def _tangent_coefficients(proc: EvalProcedure, index: int, values: np.ndarray) -> ModelNode:
    node = proc.nodes[index]
    op = node.op
    args = [float(values[arg]) for arg in node.args]
    match op.kind:
        case OpKind.INPUT:
            return LinearNode(slot=op.slot)
        case OpKind.CONST:
            return LinearNode()
        case OpKind.ABS:
            return AbsNode(node.args[0], args[0], abs(args[0]))
        case OpKind.ADD:
            coefficients = (1.0, 1.0)
        case OpKind.SUB:
            coefficients = (1.0, -1.0)
        case OpKind.MUL:
            coefficients = (args[1], args[0])
        case OpKind.DIV:
            coefficients = (1.0 / args[1], -args[0] / (args[1] * args[1]))
        case OpKind.CUSTOM:
            elemental = proc.customs[op.elemental_id]
            coefficients = tuple(float(partial(*args)) for partial in elemental.partials)
        case _:
            coefficients = (unary_derivative(op.kind, args[0], op.exponent),)
    if not all(math.isfinite(coef) for coef in coefficients):
        raise ValueError(f"coefficients non finis {coefficients}")
    return LinearNode(node.args, coefficients)


def tangent(proc: EvalProcedure, x0: VectorLike) -> PLModel:
    """
    Modèle tangent ΔF(x̊; Δx) : dérivées des éléments lisses en x̊, valeur absolue conservée.

    Args:
        proc (EvalProcedure): Procédure sans Min/Max
        x0: Point de développement x̊

    Returns:
        PLModel: Modèle tangent

    Raises:
        UnloweredTapeError: Procédure contenant encore Min/Max
        DomainError: Évaluation hors domaine en x̊
        DerivativeDomainError: Dérivée non définie (sqrt en 0, ...)
    """
    proc.require_lowered()
    point = as_vector(x0, proc.n, "x0")
    outputs, trace = evaluate(proc, point)
    nodes: list[ModelNode] = []
    for index in range(len(proc.nodes)):
        try:
            nodes.append(_tangent_coefficients(proc, index, trace.values))
        except (ArithmeticError, ValueError) as e:
            raise _derivative_failure(index, e) from e
    model = PLModel(
        mode=Mode.TANGENT,
        proc=proc,
        lower=point,
        upper=point.copy(),
        center=point.copy(),
        ref_output=outputs,
        nodes=tuple(nodes),
        mids=trace.values,
        rads=np.zeros_like(trace.values),
    )
    _logger.debug(f"Modèle tangent : n = {model.n}, m = {model.m}, s = {model.s}")
    return model


def _custom_secant(
    elemental: CustomElemental, args: list[MidRad], lower: float, upper: float
) -> tuple[MidRad, tuple[float, ...]]:
    mids = [arg.mid for arg in args]
    if elemental.arity == 1 and elemental.series_kernel:
        m = mids[0]
        derivatives = [elemental.value_fn(m), elemental.partials[0](m)]
        derivatives += [derivative(m) for derivative in elemental.higher_derivatives]
        result, slope = series_secant([float(d) for d in derivatives[: SERIES_KERNEL_ORDER + 1]], args[0].rad)
        return result, (slope,)
    result = MidRad.from_endpoints(lower, upper)
    if elemental.arity == 1:
        slope = difference_slope(lambda: (lower, upper), args[0], lambda: elemental.partials[0](mids[0]))
        return result, (slope,)
    # Chaque argument varie seul, les autres restant à leur milieu
    slopes = []
    for position, arg in enumerate(args):

        def endpoints(position: int = position, arg: MidRad = arg) -> tuple[float, float]:
            lower_point, upper_point = list(mids), list(mids)
            lower_point[position], upper_point[position] = arg.lower, arg.upper
            return elemental.value_fn(*lower_point), elemental.value_fn(*upper_point)

        def derivative(position: int = position) -> float:
            return elemental.partials[position](*mids)

        slopes.append(difference_slope(endpoints, arg, derivative))
    return result, tuple(slopes)


def _secant_node(
    proc: EvalProcedure, index: int, pairs: list[MidRad], lower_values: np.ndarray, upper_values: np.ndarray
) -> tuple[MidRad, ModelNode]:
    node = proc.nodes[index]
    op = node.op
    args = [pairs[arg] for arg in node.args]
    match op.kind:
        case OpKind.INPUT:
            return MidRad.from_endpoints(lower_values[index], upper_values[index]), LinearNode(slot=op.slot)
        case OpKind.CONST:
            return MidRad(op.value), LinearNode()
        case OpKind.ABS:
            result = secant_abs(args[0])
            return result, AbsNode(node.args[0], args[0].mid, result.mid)
        case OpKind.ADD | OpKind.SUB | OpKind.MUL | OpKind.DIV:
            result, coefficients = secant_binary(op.kind, *args)
        case OpKind.CUSTOM:
            elemental = proc.customs[op.elemental_id]
            result, coefficients = _custom_secant(elemental, args, lower_values[index], upper_values[index])
        case _:
            result, slope = secant_unary(op.kind, args[0], op.exponent)
            coefficients = (slope,)
    if not (math.isfinite(result.mid) and math.isfinite(result.rad) and all(math.isfinite(c) for c in coefficients)):
        raise ValueError(f"noyau sécant non fini {result}, {coefficients}")
    return result, LinearNode(node.args, tuple(float(c) for c in coefficients))


def secant(proc: EvalProcedure, xlo: VectorLike, xhi: VectorLike) -> PLModel:
    """
    Modèle sécant ΔF(x̌, x̂; Δx) par propagation milieu-rayon.

    Les deux extrémités sont d'abord évaluées (contrôle de domaine) ; les noeuds
    Abs sont ancrés au milieu de leur argument avec la valeur (|v̌_j| + |v̂_j|)/2.

    Args:
        proc (EvalProcedure): Procédure sans Min/Max
        xlo: x̌
        xhi: x̂

    Returns:
        PLModel: Modèle sécant, identique au modèle tangent lorsque x̌ = x̂

    Raises:
        UnloweredTapeError: Procédure contenant encore Min/Max
        DomainError: Évaluation hors domaine en x̌ ou x̂
        DerivativeDomainError: Pente sécante non définie
    """
    proc.require_lowered()
    lower = as_vector(xlo, proc.n, "x̌")
    upper = as_vector(xhi, proc.n, "x̂")
    _, lower_trace = evaluate(proc, lower)
    _, upper_trace = evaluate(proc, upper)
    pairs: list[MidRad] = []
    nodes: list[ModelNode] = []
    for index in range(len(proc.nodes)):
        try:
            pair, model_node = _secant_node(proc, index, pairs, lower_trace.values, upper_trace.values)
        except (ArithmeticError, ValueError) as e:
            raise _derivative_failure(index, e) from e
        pairs.append(pair)
        nodes.append(model_node)
    mids = np.array([pair.mid for pair in pairs])
    model = PLModel(
        mode=Mode.SECANT,
        proc=proc,
        lower=lower,
        upper=upper,
        center=0.5 * (lower + upper),
        ref_output=mids[list(proc.outputs)],
        nodes=tuple(nodes),
        mids=mids,
        rads=np.array([pair.rad for pair in pairs]),
    )
    _logger.debug(f"Modèle sécant : n = {model.n}, m = {model.m}, s = {model.s}")
    return model


def eval_increment(model: PLModel, dx: VectorLike) -> np.ndarray:
    return model.eval_increment(dx)


def eval_model(model: PLModel, x: VectorLike) -> np.ndarray:
    return model.eval_model(x)


def _accumulate_abs_normal(model: PLModel) -> AbsNormalForm:
    # Forme affine de chaque incrément : a0 + ax . Δx + az . |z|
    n, s = model.n, model.s
    count = len(model.nodes)
    a0 = np.zeros(count)
    ax = np.zeros((count, n))
    az = np.zeros((count, s))
    c, Z, L = np.zeros(s), np.zeros((s, n)), np.zeros((s, s))
    k = 0
    for index, node in enumerate(model.nodes):
        match node:
            case AbsNode(arg=arg, anchor=anchor, anchor_value=anchor_value):
                c[k] = anchor + a0[arg]
                Z[k] = ax[arg]
                L[k] = az[arg]
                a0[index] = -anchor_value
                az[index, k] = 1.0
                k += 1
            case LinearNode(slot=slot) if slot is not None:
                ax[index, slot] = 1.0
            case LinearNode(args=args, coefficients=coefficients):
                for arg, coef in zip(args, coefficients):
                    a0[index] += coef * a0[arg]
                    ax[index] += coef * ax[arg]
                    az[index] += coef * az[arg]
    outputs = list(model.proc.outputs)
    return AbsNormalForm(
        center=model.center.copy(),
        offset=model.ref_output.copy(),
        c=c,
        b=a0[outputs],
        Z=Z,
        L=L,
        J=ax[outputs],
        Y=az[outputs],
    )


def abs_normal(model: PLModel) -> AbsNormalForm:
    """
    Forme abs-normale (c, b, Z, L, J, Y) du modèle par accumulation avant.

    Args:
        model (PLModel): Modèle tangent ou sécant

    Returns:
        AbsNormalForm: Forme équivalente au modèle, L strictement triangulaire inférieure
    """
    return model.abs_normal

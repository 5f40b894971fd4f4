#!/usr/bin/env python3
"""
Procédures d'évaluation (bandes) de fonctions composites lisses par morceaux

Une procédure est un programme linéaire sans sauts : une liste ordonnée de
noeuds (opcode, prédécesseurs) où chaque prédécesseur précède strictement
le noeud. Les n premiers noeuds sont les entrées x1..xn.

Auteur: Hugues Le Gendre
Date: 2025
"""

import math
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from ..utils.logging import LoggingUtils
from ..utils.vectors import VectorLike, as_vector
from .elementals import BINARY, OpKind, fixed_arity, unary_value
from .errors import ArityError, DomainError, DuplicateElemental, UnloweredTapeError

_logger = LoggingUtils.setup_simple_logger("Tape")


@dataclass(frozen=True, slots=True)
class Opcode:
    """
    Opcode d'un noeud ; seuls les champs propres à son type sont renseignés.
    """

    kind: OpKind
    slot: int | None = None
    value: float | None = None
    exponent: int | None = None
    elemental_id: str | None = None

    def __post_init__(self):
        match self.kind:
            case OpKind.INPUT if self.slot is None or self.slot < 0:
                raise ValueError("Input exige un indice d'entrée positif ou nul")
            case OpKind.CONST if self.value is None or not math.isfinite(self.value):
                raise ValueError("Const exige une valeur finie")
            case OpKind.POWINT if self.exponent is None or self.exponent < 2:
                raise ValueError(f"PowInt exige un exposant entier >= 2, reçu {self.exponent}")
            case OpKind.CUSTOM if not self.elemental_id:
                raise ValueError("Custom exige un identifiant d'élément")

    def label(self) -> str:
        match self.kind:
            case OpKind.INPUT:
                return f"x{self.slot + 1}"
            case OpKind.CONST:
                return repr(self.value)
            case OpKind.POWINT:
                return f"pow(., {self.exponent})"
            case OpKind.CUSTOM:
                return str(self.elemental_id)
            case _:
                return self.kind.value


@dataclass(frozen=True, slots=True)
class CustomElemental:
    """
    Élément fourni par l'utilisateur, avec sa fonction et ses dérivées partielles.

    `higher_derivatives` (univariés seulement) liste phi'', phi''', ... ; avec
    `series_kernel=True` la pente sécante est obtenue par développement de Taylor
    au lieu du quotient différentiel.
    """

    elemental_id: str
    arity: int
    value_fn: Callable[..., float]
    partials: tuple[Callable[..., float], ...]
    lipschitz_hint: tuple[float, ...] | None = None
    higher_derivatives: tuple[Callable[[float], float], ...] = ()
    series_kernel: bool = False

    def __post_init__(self):
        if self.arity < 1:
            raise ArityError(f"Arité invalide pour {self.elemental_id!r} : {self.arity}")
        if len(self.partials) != self.arity:
            raise ArityError(f"{self.elemental_id!r} déclare {self.arity} argument(s) mais {len(self.partials)} dérivée(s)")
        if self.lipschitz_hint is not None and (
            len(self.lipschitz_hint) != self.arity or any(h < 0 for h in self.lipschitz_hint)
        ):
            raise ValueError(f"Indication de Lipschitz invalide pour {self.elemental_id!r}")
        if self.series_kernel and (self.arity != 1 or not self.higher_derivatives):
            raise ValueError("Le noyau par série exige un élément univarié avec dérivées d'ordre supérieur")


@dataclass(frozen=True, slots=True)
class Node:
    op: Opcode
    args: tuple[int, ...] = ()


@dataclass(frozen=True, slots=True)
class EvalTrace:
    """Valeurs v_i de tous les noeuds et sorties y."""

    values: np.ndarray
    outputs: np.ndarray


@dataclass(frozen=True, eq=False)
class EvalProcedure:
    """
    Procédure d'évaluation immuable de F : R^n -> R^m.

    Attributes:
        n (int): Dimension d'entrée
        nodes (tuple[Node, ...]): Noeuds en ordre topologique (les n premiers sont les entrées)
        outputs (tuple[int, ...]): Indices des m noeuds de sortie
        customs (Mapping[str, CustomElemental]): Éléments personnalisés référencés
    """

    n: int
    nodes: tuple[Node, ...]
    outputs: tuple[int, ...]
    customs: Mapping[str, CustomElemental] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "customs", MappingProxyType(dict(self.customs)))
        for index, node in enumerate(self.nodes):
            expected = fixed_arity(node.op.kind)
            if node.op.kind is OpKind.CUSTOM:
                elemental = self.customs.get(node.op.elemental_id)
                if elemental is None:
                    raise ArityError(f"Noeud {index} : élément personnalisé inconnu {node.op.elemental_id!r}")
                expected = elemental.arity
            if len(node.args) != expected:
                raise ArityError(f"Noeud {index} ({node.op.label()}) : {len(node.args)} argument(s), {expected} attendu(s)")
            if any(not 0 <= arg < index for arg in node.args):
                raise ValueError(f"Noeud {index} : prédécesseur hors ordre topologique {node.args}")
            if node.op.kind is OpKind.INPUT and node.op.slot >= self.n:
                raise ValueError(f"Noeud {index} : entrée x{node.op.slot + 1} au-delà de n = {self.n}")
        if not self.outputs:
            raise ValueError("Une procédure doit avoir au moins une sortie")
        if any(not 0 <= out < len(self.nodes) for out in self.outputs):
            raise ValueError(f"Indices de sortie invalides : {self.outputs}")

    @property
    def m(self) -> int:
        return len(self.outputs)

    @property
    def s(self) -> int:
        """Nombre de noeuds Abs."""
        return sum(1 for node in self.nodes if node.op.kind is OpKind.ABS)

    def count(self, *kinds: OpKind) -> int:
        return sum(1 for node in self.nodes if node.op.kind in kinds)

    def has_minmax(self) -> bool:
        return self.count(OpKind.MIN, OpKind.MAX) > 0

    def require_lowered(self) -> None:
        """
        Raises:
            UnloweredTapeError: Si la procédure contient encore Min/Max
        """
        if self.has_minmax():
            raise UnloweredTapeError("Procédure non abaissée : appeler lower_minmax avant de linéariser")

    def describe(self) -> list[str]:
        """Une ligne lisible par noeud, pour les traces."""
        return [f"v{index} = {node.op.label()}{list(node.args) if node.args else ''}" for index, node in enumerate(self.nodes)]


def _custom_value(elemental: CustomElemental, index: int, args: Sequence[float]) -> float:
    try:
        return float(elemental.value_fn(*args))
    except (ValueError, ZeroDivisionError, OverflowError) as e:
        raise DomainError(index, f"{elemental.elemental_id}{tuple(args)} hors domaine ({e})") from e


def node_value(proc: EvalProcedure, index: int, values: Sequence[float], x: np.ndarray) -> float:
    """
    Valeur du noeud `index` connaissant celles de ses prédécesseurs.

    Raises:
        DomainError: Élément hors domaine ou valeur non finie
    """
    node = proc.nodes[index]
    op = node.op
    args = [values[a] for a in node.args]
    try:
        match op.kind:
            case OpKind.INPUT:
                result = float(x[op.slot])
            case OpKind.CONST:
                result = op.value
            case OpKind.ADD:
                result = args[0] + args[1]
            case OpKind.SUB:
                result = args[0] - args[1]
            case OpKind.MUL:
                result = args[0] * args[1]
            case OpKind.DIV:
                result = args[0] / args[1]
            case OpKind.MIN:
                result = min(args[0], args[1])
            case OpKind.MAX:
                result = max(args[0], args[1])
            case OpKind.CUSTOM:
                result = _custom_value(proc.customs[op.elemental_id], index, args)
            case _:
                result = unary_value(op.kind, args[0], op.exponent)
    except (ValueError, ZeroDivisionError, OverflowError) as e:
        raise DomainError(index, f"{op.label()}{tuple(args)} hors domaine ({e})") from e
    if not math.isfinite(result):
        raise DomainError(index, f"{op.label()}{tuple(args)} produit une valeur non finie")
    return result


def evaluate(proc: EvalProcedure, x: VectorLike) -> tuple[np.ndarray, EvalTrace]:
    """
    Évalue la procédure en x, noeud par noeud.

    Args:
        proc (EvalProcedure): Procédure
        x: Point de R^n

    Returns:
        tuple[np.ndarray, EvalTrace]: Sorties y = F(x) et trace complète

    Raises:
        DomainError: Au premier noeud évalué hors domaine
    """
    point = as_vector(x, proc.n)
    values: list[float] = []
    for index in range(len(proc.nodes)):
        values.append(node_value(proc, index, values, point))
    trace_values = np.array(values)
    outputs = trace_values[list(proc.outputs)]
    return outputs.copy(), EvalTrace(values=trace_values, outputs=outputs)


class TapeBuilder:
    """
    Construction incrémentale d'une procédure avec partage des sous-expressions communes.

    Chaque méthode renvoie l'indice du noeud (existant ou créé).
    """

    def __init__(self, n: int, customs: Mapping[str, CustomElemental] | None = None):
        """
        Args:
            n (int): Dimension d'entrée ; les noeuds 0..n-1 sont les entrées
            customs: Éléments personnalisés déjà enregistrés
        """
        if n < 1:
            raise ValueError(f"Dimension d'entrée invalide : {n}")
        self.n = n
        self._nodes: list[Node] = []
        self._index: dict[Node, int] = {}
        self._customs: dict[str, CustomElemental] = dict(customs or {})
        for slot in range(n):
            self._push(Node(Opcode(OpKind.INPUT, slot=slot)))

    def __len__(self) -> int:
        return len(self._nodes)

    @property
    def customs(self) -> Mapping[str, CustomElemental]:
        return MappingProxyType(self._customs)

    def node(self, index: int) -> Node:
        return self._nodes[index]

    def _push(self, node: Node, shared: bool = True) -> int:
        existing = self._index.get(node) if shared else None
        if existing is not None:
            return existing
        if any(not 0 <= arg < len(self._nodes) for arg in node.args):
            raise ValueError(f"Prédécesseur inconnu {node.args} pour {node.op.label()}")
        self._nodes.append(node)
        if shared:
            self._index.setdefault(node, len(self._nodes) - 1)
        return len(self._nodes) - 1

    def register_custom(self, elemental: CustomElemental) -> str:
        """
        Enregistre un élément personnalisé.

        Returns:
            str: Identifiant de l'élément

        Raises:
            DuplicateElemental: Si l'identifiant est déjà utilisé
        """
        if elemental.elemental_id in self._customs:
            raise DuplicateElemental(f"Élément personnalisé déjà enregistré : {elemental.elemental_id!r}")
        self._customs[elemental.elemental_id] = elemental
        _logger.debug(f"Élément personnalisé enregistré : {elemental.elemental_id} (arité {elemental.arity})")
        return elemental.elemental_id

    def input(self, slot: int) -> int:
        if not 0 <= slot < self.n:
            raise ValueError(f"Entrée x{slot + 1} au-delà de n = {self.n}")
        return slot

    def const(self, value: float) -> int:
        return self._push(Node(Opcode(OpKind.CONST, value=float(value))))

    def unary(self, kind: OpKind, arg: int, exponent: int | None = None) -> int:
        if fixed_arity(kind) != 1:
            raise ArityError(f"{kind.value} n'est pas univarié")
        return self._push(Node(Opcode(kind, exponent=exponent), (arg,)))

    def binary(self, kind: OpKind, left: int, right: int) -> int:
        if kind not in BINARY:
            raise ArityError(f"{kind.value} n'est pas binaire")
        return self._push(Node(Opcode(kind), (left, right)))

    def add(self, left: int, right: int) -> int:
        return self.binary(OpKind.ADD, left, right)

    def sub(self, left: int, right: int) -> int:
        return self.binary(OpKind.SUB, left, right)

    def mul(self, left: int, right: int) -> int:
        return self.binary(OpKind.MUL, left, right)

    def abs(self, arg: int, shared: bool = True) -> int:
        """Noeud |arg| ; avec shared=False, toujours un nouveau noeud (une variable de commutation de plus)."""
        return self._push(Node(Opcode(OpKind.ABS), (arg,)), shared)

    def custom(self, elemental_id: str, *args: int) -> int:
        elemental = self._customs.get(elemental_id)
        if elemental is None:
            raise KeyError(f"Élément personnalisé non enregistré : {elemental_id!r}")
        if len(args) != elemental.arity:
            raise ArityError(f"{elemental_id} attend {elemental.arity} argument(s), reçu {len(args)}")
        return self._push(Node(Opcode(OpKind.CUSTOM, elemental_id=elemental_id), tuple(args)))

    def copy(self, node: Node, args: Sequence[int]) -> int:
        """Recopie un noeud d'une autre procédure avec de nouveaux prédécesseurs."""
        if node.op.kind is OpKind.INPUT:
            return self.input(node.op.slot)
        # Les Abs recopiés restent distincts : s est conservé
        return self._push(Node(node.op, tuple(args)), shared=node.op.kind is not OpKind.ABS)

    def build(self, outputs: Iterable[int]) -> EvalProcedure:
        return EvalProcedure(n=self.n, nodes=tuple(self._nodes), outputs=tuple(outputs), customs=self._customs)


def register_custom(builder: TapeBuilder, elemental: CustomElemental) -> str:
    """
    Enregistre un élément personnalisé dans un constructeur de procédure.

    Raises:
        DuplicateElemental: Si l'identifiant est déjà utilisé
    """
    return builder.register_custom(elemental)


RewriteRule = Callable[[TapeBuilder, Node, list[int]], int]


def rewrite(proc: EvalProcedure, rules: Mapping[OpKind, RewriteRule]) -> EvalProcedure:
    """
    Reconstruit une procédure en remplaçant certains opcodes.

    Args:
        proc (EvalProcedure): Procédure source
        rules: Pour chaque opcode concerné, fonction (builder, noeud, nouveaux arguments) -> indice

    Returns:
        EvalProcedure: Nouvelle procédure, entrées et éléments personnalisés conservés
    """
    builder = TapeBuilder(proc.n, proc.customs)
    mapping: list[int] = []
    for node in proc.nodes:
        args = [mapping[a] for a in node.args]
        rule = rules.get(node.op.kind)
        mapping.append(rule(builder, node, args) if rule else builder.copy(node, args))
    return builder.build(mapping[out] for out in proc.outputs)


def _lower_max(builder: TapeBuilder, node: Node, args: list[int]) -> int:
    u, w = args
    spread = builder.abs(builder.sub(u, w), shared=False)
    return builder.mul(builder.add(builder.add(u, w), spread), builder.const(0.5))


def _lower_min(builder: TapeBuilder, node: Node, args: list[int]) -> int:
    u, w = args
    spread = builder.abs(builder.sub(u, w), shared=False)
    return builder.mul(builder.sub(builder.add(u, w), spread), builder.const(0.5))


def lower_minmax(proc: EvalProcedure) -> EvalProcedure:
    """
    Remplace max(u,w) par (u+w+|u-w|)/2 et min(u,w) par (u+w-|u-w|)/2.

    Args:
        proc (EvalProcedure): Procédure éventuellement avec Min/Max

    Returns:
        EvalProcedure: Procédure sans Min/Max, s augmenté du nombre de noeuds abaissés
    """
    if not proc.has_minmax():
        return proc
    lowered = rewrite(proc, {OpKind.MAX: _lower_max, OpKind.MIN: _lower_min})
    _logger.debug(f"Min/Max abaissés : s = {proc.s} -> {lowered.s}")
    return lowered

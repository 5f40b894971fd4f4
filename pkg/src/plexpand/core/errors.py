#!/usr/bin/env python3
"""
Exceptions de la bibliothèque plexpand.

Toutes dérivent de PlexpandError ; les erreurs de lecture du langage de
description dérivent aussi de ValueError.
"""


class PlexpandError(Exception):
    """Erreur de base de la bibliothèque."""


class ParseError(PlexpandError, ValueError):
    """Texte non conforme à la grammaire, avec position (ligne, colonne) à partir de 1."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (ligne {line}, colonne {column})")
        self.line = line
        self.column = column


class UnknownIdentifier(ParseError):
    """Identifiant ou fonction inconnu."""

    def __init__(self, name: str, line: int, column: int):
        super().__init__(f"Identifiant inconnu : {name!r}", line, column)
        self.name = name


class ArityError(ParseError):
    """Nombre d'arguments incorrect pour une fonction ou un opcode."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(message, line, column)


class DomainError(PlexpandError, ArithmeticError):
    """Élément évalué hors de son domaine, ou valeur non finie."""

    def __init__(self, node_index: int | None, message: str):
        super().__init__(message if node_index is None else f"Noeud {node_index} : {message}")
        self.node_index = node_index
        self.detail = message


class DerivativeDomainError(DomainError):
    """Dérivée (ou pente sécante) non définie au point de référence."""


class DuplicateElemental(PlexpandError, KeyError):
    """Identifiant d'élément personnalisé déjà enregistré."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "Élément personnalisé déjà enregistré"


class UnloweredTapeError(PlexpandError, ValueError):
    """La procédure contient encore des noeuds Min/Max."""


class CertError(PlexpandError):
    """Constante de Lipschitz non bornée ou non finie sur la boîte K."""


class SingularPiece(PlexpandError, ArithmeticError):
    """Pièce linéaire de matrice singulière."""

    def __init__(self, sigma: tuple[int, ...]):
        super().__init__(f"Pièce singulière pour la signature {sigma}")
        self.sigma = sigma


class EnumerationCapExceeded(PlexpandError):
    """Trop de variables de commutation pour l'énumération exhaustive."""

    def __init__(self, s: int, cap: int):
        super().__init__(f"s = {s} dépasse la limite d'énumération {cap}")
        self.s = s
        self.cap = cap


class NoRoot(PlexpandError):
    """Le système affine par morceaux n'a aucune racine."""


class RegularityError(PlexpandError):
    """La valeur cible n'est pas régulière (racine sur une frontière de pièces)."""


class SingularJ(PlexpandError, ArithmeticError):
    """Matrice J singulière : l'itération du module est inapplicable."""


class InsufficientData(PlexpandError, ValueError):
    """Pas assez d'itérés admissibles pour estimer le taux de convergence."""

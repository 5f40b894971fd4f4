#!/usr/bin/env python3
"""
Utilitaires pour les vecteurs et les normes.
"""

from collections.abc import Sequence

import numpy as np

VectorLike = Sequence[float] | np.ndarray


def as_vector(values: VectorLike | float, size: int | None = None, name: str = "x") -> np.ndarray:
    """
    Convertit une valeur en vecteur flottant 1-D, en vérifiant sa dimension.

    Args:
        values: Scalaire, séquence ou tableau
        size (int | None): Dimension attendue, ou None pour ne pas vérifier
        name (str): Nom utilisé dans le message d'erreur

    Returns:
        np.ndarray: Copie flottante 1-D

    Raises:
        ValueError: Si la dimension ne correspond pas
    """
    vector = np.atleast_1d(np.asarray(values, dtype=float)).reshape(-1).copy()
    if size is not None and vector.shape[0] != size:
        raise ValueError(f"{name} doit être de dimension {size}, reçu {vector.shape[0]}")
    return vector


def inf_norm(values: VectorLike) -> float:
    """
    Norme infinie, nulle pour un vecteur vide.

    Args:
        values: Vecteur

    Returns:
        float: max |v_i|
    """
    array = np.asarray(values, dtype=float)
    return float(np.max(np.abs(array))) if array.size else 0.0

"""
plexpand - Linéarisation affine par morceaux de fonctions composites

Ce package construit des modèles affines par morceaux (tangents ou sécants) de
fonctions évaluées par une procédure faite d'éléments lisses et de valeurs absolues,
certifie leur précision par des constantes de Lipschitz et les résout par des
itérations de Newton généralisées.
"""

__version__ = "1.0.0"
__author__ = "Hugues Le Gendre"
__email__ = "hugues@ikivox.org"

from .core.linearize import secant, tangent
from .core.newton import newton_secant, newton_tangent
from .core.parser import parse_expression

__all__ = ["parse_expression", "tangent", "secant", "newton_tangent", "newton_secant"]

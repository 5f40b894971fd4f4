"""
Core modules for the plexpand package.

This module contains the evaluation procedures, the tangent and secant piecewise
linearizations, the Lipschitz certificates, the piecewise linear solvers and the
generalized Newton drivers.
"""

from .bench import RotationConfig, build_rotation, reproduce_tables
from .bounds import BoxK, LipschitzCerts, beta_gamma, multiplication_lowering, stability_radius
from .errors import (
    ArityError,
    CertError,
    DerivativeDomainError,
    DomainError,
    DuplicateElemental,
    EnumerationCapExceeded,
    InsufficientData,
    NoRoot,
    ParseError,
    PlexpandError,
    RegularityError,
    SingularJ,
    SingularPiece,
    UnknownIdentifier,
    UnloweredTapeError,
)
from .linearize import AbsNormalForm, Mode, PLModel, abs_normal, eval_increment, eval_model, secant, tangent
from .newton import NewtonOptions, NewtonReport, NewtonStatus, newton_secant, newton_tangent, rate_estimate
from .parser import parse_expression, parse_function_file
from .plsolve import PLSolver, RootSet, degree, enumerate_roots, min_norm_root, modulus_iteration
from .tape import CustomElemental, EvalProcedure, TapeBuilder, evaluate, lower_minmax, register_custom

__all__ = [
    "AbsNormalForm",
    "ArityError",
    "BoxK",
    "CertError",
    "CustomElemental",
    "DerivativeDomainError",
    "DomainError",
    "DuplicateElemental",
    "EnumerationCapExceeded",
    "EvalProcedure",
    "InsufficientData",
    "LipschitzCerts",
    "Mode",
    "NewtonOptions",
    "NewtonReport",
    "NewtonStatus",
    "NoRoot",
    "PLModel",
    "PLSolver",
    "ParseError",
    "PlexpandError",
    "RegularityError",
    "RootSet",
    "RotationConfig",
    "SingularJ",
    "SingularPiece",
    "TapeBuilder",
    "UnknownIdentifier",
    "UnloweredTapeError",
    "abs_normal",
    "beta_gamma",
    "build_rotation",
    "degree",
    "enumerate_roots",
    "eval_increment",
    "eval_model",
    "evaluate",
    "lower_minmax",
    "min_norm_root",
    "modulus_iteration",
    "multiplication_lowering",
    "newton_secant",
    "newton_tangent",
    "parse_expression",
    "parse_function_file",
    "rate_estimate",
    "register_custom",
    "reproduce_tables",
    "secant",
    "stability_radius",
    "tangent",
]

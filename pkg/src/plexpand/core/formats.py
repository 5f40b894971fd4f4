#!/usr/bin/env python3
"""
Documents JSON échangés par la bibliothèque et la ligne de commande

Chaque document est décrit par un TypedDict et un prédicat `*_check_type`
appliqué à la lecture ; un document invalide est journalisé puis rejeté.

Auteur: Hugues Le Gendre
Date: 2025
"""

import json
from typing import Any, NotRequired, Optional, TypedDict

from ..utils.logging import LoggingUtils


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_vector(value: Any, size: int | None = None) -> bool:
    return (
        isinstance(value, list) and (size is None or len(value) == size) and all(_is_number(item) for item in value)
    )


def _is_matrix(value: Any, rows: int, columns: int) -> bool:
    return isinstance(value, list) and len(value) == rows and all(_is_vector(row, columns) for row in value)


AbsNormalDocument = TypedDict(
    "AbsNormalDocument",
    {
        "n": int,
        "m": int,
        "s": int,
        "center": list[float],
        "offset": list[float],
        "c": list[float],
        "b": list[float],
        "Z": list[list[float]],
        "L": list[list[float]],
        "J": list[list[float]],
        "Y": list[list[float]],
    },
)


def AbsNormalDocument_check_type(data: Any) -> bool:
    if not (isinstance(data, dict) and all(isinstance(data.get(key), int) for key in ("n", "m", "s"))):
        return False
    n, m, s = data["n"], data["m"], data["s"]
    return (
        n >= 1
        and m >= 1
        and s >= 0
        and _is_vector(data.get("center"), n)
        and _is_vector(data.get("offset"), m)
        and _is_vector(data.get("c"), s)
        and _is_vector(data.get("b"), m)
        and _is_matrix(data.get("Z"), s, n)
        and _is_matrix(data.get("L"), s, s)
        and _is_matrix(data.get("J"), m, n)
        and _is_matrix(data.get("Y"), m, s)
    )


RootDocument = TypedDict("RootDocument", {"x": list[float], "sigma": list[int], "det_sign": int})


def RootDocument_check_type(data: Any) -> bool:
    return (
        isinstance(data, dict)
        and "x" in data
        and _is_vector(data["x"])
        and "sigma" in data
        and isinstance(data["sigma"], list)
        and all(sign in (-1, 1) for sign in data["sigma"])
        and "det_sign" in data
        and data["det_sign"] in (-1, 0, 1)
    )


class RootSetDocument(TypedDict):
    roots: list[RootDocument]
    degree: NotRequired[int]
    min_norm_root: NotRequired[list[float]]


def RootSetDocument_check_type(data: Any) -> bool:
    return (
        isinstance(data, dict)
        and "roots" in data
        and isinstance(data["roots"], list)
        and all(RootDocument_check_type(root) for root in data["roots"])
        and ("degree" not in data or isinstance(data["degree"], int))
        and ("min_norm_root" not in data or _is_vector(data["min_norm_root"]))
    )


BoxDocument = TypedDict("BoxDocument", {"lower": list[float], "upper": list[float]})

NodeCertDocument = TypedDict("NodeCertDocument", {"lo": float, "hi": float, "beta": float, "gamma": float})


def NodeCertDocument_check_type(data: Any) -> bool:
    return isinstance(data, dict) and all(_is_number(data.get(key)) for key in ("lo", "hi", "beta", "gamma"))


class CertDocument(TypedDict):
    K: BoxDocument
    per_node: list[NodeCertDocument]
    beta_F: float
    gamma_F: float
    rigorous: bool
    rho_F: NotRequired[float]
    radius: NotRequired[float | str]


def CertDocument_check_type(data: Any) -> bool:
    return (
        isinstance(data, dict)
        and isinstance(data.get("K"), dict)
        and _is_vector(data["K"].get("lower"))
        and _is_vector(data["K"].get("upper"), len(data["K"]["lower"]))
        and isinstance(data.get("per_node"), list)
        and all(NodeCertDocument_check_type(node) for node in data["per_node"])
        and _is_number(data.get("beta_F"))
        and _is_number(data.get("gamma_F"))
        and isinstance(data.get("rigorous"), bool)
    )


class NewtonReportDocument(TypedDict):
    mode: str
    status: str
    failed_at: int | None
    iterates: list[list[float]]
    residuals: list[float]
    rate_estimate: float | None


def NewtonReportDocument_check_type(data: Any) -> bool:
    return (
        isinstance(data, dict)
        and isinstance(data.get("mode"), str)
        and isinstance(data.get("status"), str)
        and "failed_at" in data
        and (data["failed_at"] is None or isinstance(data["failed_at"], int))
        and isinstance(data.get("iterates"), list)
        and all(_is_vector(x) for x in data["iterates"])
        and _is_vector(data.get("residuals"), len(data["iterates"]))
        and "rate_estimate" in data
        and (data["rate_estimate"] is None or _is_number(data["rate_estimate"]))
    )


def _load(data: str, check: Any, name: str) -> Optional[dict]:
    document = json.loads(data)
    if not check(document):
        LoggingUtils.setup_simple_logger("Formats").error(f"Document {name} invalide : {document}")
        return None
    return document


def RootSetDocument_load_from_json(data: str) -> Optional[RootSetDocument]:
    return _load(data, RootSetDocument_check_type, "RootSet")


def CertDocument_load_from_json(data: str) -> Optional[CertDocument]:
    return _load(data, CertDocument_check_type, "LipschitzCerts")


def NewtonReportDocument_load_from_json(data: str) -> Optional[NewtonReportDocument]:
    return _load(data, NewtonReportDocument_check_type, "NewtonReport")

#!/usr/bin/env python3
"""
Interface en ligne de commande de plexpand

Codes de sortie : 0 succès, 2 domaine, 3 pas de racine, 4 limite d'énumération,
5 non-convergence, 6 certificat, 64 usage.
"""

import argparse
import csv
import io
import json
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import NoReturn

import numpy as np

from .config import ENUMERATION_CAP, JOBS, NEWTON_MAX_ITERATIONS, NEWTON_RESIDUAL_TOLERANCE
from .core.bench import RotationConfig, build_rotation, reproduce_tables, residual_table_csv, residual_table_markdown, reports_json
from .core.bounds import BoxK, LipschitzCerts, beta_gamma, stability_radius
from .core.errors import (
    CertError,
    DomainError,
    EnumerationCapExceeded,
    NoRoot,
    ParseError,
    RegularityError,
    SingularPiece,
)
from .core.linearize import AbsNormalForm, Mode, secant, tangent
from .core.newton import NewtonOptions, NewtonReport, SolverPreference, newton_secant, newton_tangent
from .core.parser import parse_function_file
from .core.plsolve import PLSolver
from .core.tape import EvalProcedure, evaluate, lower_minmax
from .utils.logging import LoggingUtils

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_NO_ROOT = 3
EXIT_CAP = 4
EXIT_NO_CONVERGENCE = 5
EXIT_CERT = 6
EXIT_USAGE = 64

ROTATION = "rotation"

EPILOG = """
Exemples d'utilisation:
  plexpand eval f.pw --x 2 --trace        # Valeurs de F et de chaque noeud
  plexpand linearize f.pw --mode secant --x0 1 --x1 3
  plexpand solve modele.json --degree     # Racines, racine de norme minimale et degré
  plexpand newton rotation --mode secant -v
  plexpand bounds f.pw --lower -1 --upper 2 --check 200
  plexpand bench --noise --format csv
"""


class UsageError(Exception):
    """Options incohérentes détectées après l'analyse de la ligne de commande."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: erreur : {message}\n")


def parse_arguments(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """Parse command line arguments."""
    common = _ArgumentParser(add_help=False)
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="Niveau de verbosité (-v pour info, -vv pour debug)"
    )
    common.add_argument("--format", choices=["table", "json", "csv"], default="table", help="Format de sortie")
    common.add_argument("--out", type=Path, help="Fichier de sortie (sortie standard par défaut)")
    common.add_argument("--jobs", type=int, default=JOBS, help="Parallélisme de l'énumération (PLEXPAND_JOBS)")
    common.add_argument("--cap", type=int, default=ENUMERATION_CAP, help="Limite d'énumération sur s")
    common.add_argument("--seed", type=int, default=0, help="Graine des vérifications aléatoires")

    parser = _ArgumentParser(
        prog="plexpand",
        description="Linéarisation affine par morceaux, certificats et Newton généralisé",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    evaluate_cmd = commands.add_parser("eval", parents=[common], help="Évalue F en un point")
    evaluate_cmd.add_argument("file", help="Fichier de fonction, ou 'rotation'")
    evaluate_cmd.add_argument("--x", type=float, nargs="+", required=True, help="Point d'évaluation")
    evaluate_cmd.add_argument("--trace", action="store_true", help="Affiche la valeur de chaque noeud")
    evaluate_cmd.add_argument("--noise", action="store_true", help="Rotation : ajoute la perturbation")

    linearize_cmd = commands.add_parser("linearize", parents=[common], help="Forme abs-normale d'un modèle")
    linearize_cmd.add_argument("file", help="Fichier de fonction, ou 'rotation'")
    linearize_cmd.add_argument("--mode", choices=[str(mode) for mode in Mode], default=str(Mode.TANGENT))
    linearize_cmd.add_argument("--x0", type=float, nargs="+", required=True, help="x̊ (tangent) ou x̌ (sécant)")
    linearize_cmd.add_argument("--x1", type=float, nargs="+", help="x̂ (sécant)")
    linearize_cmd.add_argument("--noise", action="store_true", help="Rotation : ajoute la perturbation")

    solve_cmd = commands.add_parser("solve", parents=[common], help="Racines d'une forme abs-normale")
    solve_cmd.add_argument("anf", type=Path, help="Forme abs-normale JSON")
    solve_cmd.add_argument("--center", type=float, nargs="+", help="Centre du choix de norme minimale")
    solve_cmd.add_argument("--target", type=float, nargs="+", help="Valeur cible (0 par défaut)")
    solve_cmd.add_argument("--degree", action="store_true", help="Ajoute le degré")

    newton_cmd = commands.add_parser("newton", parents=[common], help="Itération de Newton généralisée")
    newton_cmd.add_argument("file", help="Fichier de fonction, ou 'rotation'")
    newton_cmd.add_argument("--mode", choices=[str(mode) for mode in Mode], default=str(Mode.TANGENT))
    newton_cmd.add_argument("--x0", type=float, nargs="+", help="Point de départ")
    newton_cmd.add_argument("--x1", type=float, nargs="+", help="Second point de départ (sécant)")
    newton_cmd.add_argument("--noise", action="store_true", help="Rotation : ajoute la perturbation")
    newton_cmd.add_argument("--max-iterations", type=int, default=NEWTON_MAX_ITERATIONS)
    newton_cmd.add_argument("--tol", type=float, default=NEWTON_RESIDUAL_TOLERANCE, help="Tolérance sur le résidu")
    newton_cmd.add_argument(
        "--solver", choices=[str(preference) for preference in SolverPreference], default=str(SolverPreference.ENUMERATION)
    )

    bounds_cmd = commands.add_parser("bounds", parents=[common], help="Certificats de Lipschitz sur une boîte")
    bounds_cmd.add_argument("file", help="Fichier de fonction, ou 'rotation'")
    bounds_cmd.add_argument("--lower", type=float, nargs="+", required=True)
    bounds_cmd.add_argument("--upper", type=float, nargs="+", required=True)
    bounds_cmd.add_argument("--radius", action="store_true", help="Rayon de stabilité rho_F/gamma_F (n = m)")
    bounds_cmd.add_argument("--x0", type=float, nargs="+", help="Point du modèle tangent pour --radius (milieu de K)")
    bounds_cmd.add_argument("--check", type=int, default=0, help="Nombre de vérifications aléatoires des bornes")
    bounds_cmd.add_argument("--noise", action="store_true", help="Rotation : ajoute la perturbation")

    bench_cmd = commands.add_parser("bench", parents=[common], help="Tables de résidus de l'application de rotation")
    bench_cmd.add_argument("--noise", action="store_true", help="Ajoute la perturbation")

    return parser.parse_args(argv)


def load_procedure(source: str, noise: bool = False) -> EvalProcedure:
    """
    Procédure d'un fichier de fonction (Min/Max abaissés) ou de l'application de rotation intégrée.
    """
    if source == ROTATION and not Path(source).exists():
        return build_rotation(RotationConfig(noise=noise))
    return lower_minmax(parse_function_file(source))


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out is None:
        print(text)
    else:
        args.out.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
        logging.info(f"Résultat écrit dans {args.out}")


def _csv(rows: Sequence[Sequence[object]]) -> str:
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerows(rows)
    return buffer.getvalue().rstrip("\n")


def _json_number(value: float) -> float | str:
    return value if math.isfinite(value) else ("inf" if value > 0 else "-inf")


def cmd_eval(args: argparse.Namespace) -> int:
    proc = load_procedure(args.file, args.noise)
    y, trace = evaluate(proc, args.x)
    if args.format == "json":
        document = {"y": y.tolist()}
        if args.trace:
            document["trace"] = trace.values.tolist()
        _emit(args, json.dumps(document, indent=2))
    elif args.format == "csv":
        rows = [["output", "value"], *[[f"y{i + 1}", repr(float(v))] for i, v in enumerate(y)]]
        if args.trace:
            rows += [[f"v{i}", repr(float(v))] for i, v in enumerate(trace.values)]
        _emit(args, _csv(rows))
    else:
        lines = [repr(float(value)) for value in y]
        if args.trace:
            lines += [f"{label:<40} {value!r}" for label, value in zip(proc.describe(), trace.values.tolist())]
        _emit(args, "\n".join(lines))
    return EXIT_OK


def cmd_linearize(args: argparse.Namespace) -> int:
    proc = load_procedure(args.file, args.noise)
    if args.mode == Mode.SECANT:
        if args.x1 is None:
            raise UsageError("le mode sécant exige --x0 et --x1")
        model = secant(proc, args.x0, args.x1)
    else:
        if args.x1 is not None:
            raise UsageError("le mode tangent n'accepte qu'un point (--x0)")
        model = tangent(proc, args.x0)
    _emit(args, model.abs_normal.to_json())
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    anf = AbsNormalForm.from_json(args.anf.read_text(encoding="utf-8"))
    if anf is None:
        raise UsageError(f"forme abs-normale invalide : {args.anf}")
    solver = PLSolver(anf, args.target, cap=args.cap, jobs=args.jobs)
    roots = solver.enumerate_roots()
    document = roots.to_document()
    document["min_norm_root"] = solver.min_norm_root(args.center, roots).tolist()
    if args.degree:
        document["degree"] = solver.degree(roots)
    if args.format == "json":
        _emit(args, json.dumps(document, indent=2))
    elif args.format == "csv":
        rows = [["sigma", "det_sign", *[f"x{i + 1}" for i in range(anf.n)]]]
        rows += [[" ".join(map(str, root.sigma)), root.det_sign, *map(repr, root.x.tolist())] for root in roots]
        _emit(args, _csv(rows))
    else:
        lines = [f"{list(root.x)}  σ = {root.sigma}  signe(det) = {root.det_sign:+d}" for root in roots]
        lines.append(f"racine de norme minimale : {document['min_norm_root']}")
        if args.degree:
            lines.append(f"degré : {document['degree']}")
        _emit(args, "\n".join(lines))
    return EXIT_OK


def _render_report(args: argparse.Namespace, report: NewtonReport) -> str:
    if args.format == "json":
        return report.to_json()
    if args.format == "csv":
        return report.to_csv().rstrip("\n")
    return report.to_table()


def cmd_newton(args: argparse.Namespace) -> int:
    proc = load_procedure(args.file, args.noise)
    opts = NewtonOptions(
        mode=Mode(args.mode),
        max_iterations=args.max_iterations,
        residual_tolerance=args.tol,
        enumeration_cap=args.cap,
        solver=SolverPreference(args.solver),
        jobs=args.jobs,
    )
    defaults = RotationConfig()
    if args.x0 is None:
        if args.file != ROTATION:
            raise UsageError("--x0 est requis")
        x0 = defaults.start_tangent if opts.mode == Mode.TANGENT else defaults.start_secant[0]
        x1 = defaults.start_secant[1]
    else:
        x0, x1 = args.x0, args.x1
    if opts.mode == Mode.SECANT:
        if x1 is None:
            raise UsageError("le mode sécant exige --x0 et --x1")
        report = newton_secant(proc, x0, x1, opts)
    else:
        report = newton_tangent(proc, x0, opts)
    _emit(args, _render_report(args, report))
    return EXIT_OK if report.converged else EXIT_NO_CONVERGENCE


def _check_bounds(args: argparse.Namespace, proc: EvalProcedure, K: BoxK, certs: LipschitzCerts) -> dict[str, int]:
    """Vérifie (i) et (ii) sur des points tirés dans K ; nombre de violations par borne."""
    rng = np.random.default_rng(args.seed)
    violations = {"lipschitz": 0, "approximation": 0}
    for _ in range(args.check):
        x, x_tilde, xlo, xhi = K.sample(rng, 4)
        if not certs.check_lipschitz(proc, x, x_tilde):
            violations["lipschitz"] += 1
        if not certs.check_approximation(secant(proc, xlo, xhi), x):
            violations["approximation"] += 1
    return violations


def cmd_bounds(args: argparse.Namespace) -> int:
    proc = load_procedure(args.file, args.noise)
    K = BoxK(np.asarray(args.lower, dtype=float), np.asarray(args.upper, dtype=float))
    certs = beta_gamma(proc, K)
    document = dict(certs.to_document())
    if args.radius:
        if proc.n != proc.m:
            raise UsageError("--radius exige n = m")
        center = 0.5 * (K.lower + K.upper) if args.x0 is None else args.x0
        rho, radius = stability_radius(tangent(proc, center).abs_normal, certs, args.cap)
        document["rho_F"] = rho
        document["radius"] = _json_number(radius)
    if args.check:
        document["violations"] = _check_bounds(args, proc, K, certs)
    if args.format == "json":
        _emit(args, json.dumps(document, indent=2))
    elif args.format == "csv":
        rows = [["node", "lo", "hi", "beta", "gamma"]]
        rows += [[i, node["lo"], node["hi"], node["beta"], node["gamma"]] for i, node in enumerate(document["per_node"])]
        _emit(args, _csv(rows))
    else:
        lines = [f"beta_F = {certs.beta_F!r}", f"gamma_F = {certs.gamma_F!r}", f"rigoureux = {certs.rigorous}"]
        if args.radius:
            radius = document["radius"]
            shown = "non borné" if radius == "inf" else repr(radius)
            lines += [f"rho_F = {document['rho_F']!r}", f"rayon = {shown}"]
        if args.check:
            lines.append(f"violations = {document['violations']}")
        _emit(args, "\n".join(lines))
    if args.check and any(document["violations"].values()):
        return EXIT_CERT
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    tangent_report, secant_report = reproduce_tables(
        RotationConfig(noise=args.noise), NewtonOptions(enumeration_cap=args.cap, jobs=args.jobs)
    )
    if args.format == "json":
        _emit(args, reports_json(tangent_report, secant_report))
    elif args.format == "csv":
        _emit(args, residual_table_csv(tangent_report, secant_report).rstrip("\n"))
    else:
        _emit(args, residual_table_markdown(tangent_report, secant_report))
    return EXIT_OK if tangent_report.converged and secant_report.converged else EXIT_NO_CONVERGENCE


COMMANDS = {
    "eval": cmd_eval,
    "linearize": cmd_linearize,
    "solve": cmd_solve,
    "newton": cmd_newton,
    "bounds": cmd_bounds,
    "bench": cmd_bench,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Fonction principale."""
    args = parse_arguments(argv)
    LoggingUtils.configure_verbosity(args.verbose)
    logging.debug(f"Commande : {args.command}, format : {args.format}, jobs : {args.jobs}")
    try:
        return COMMANDS[args.command](args)
    except ParseError as e:
        print(f"Erreur de lecture : {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, FileNotFoundError) as e:
        print(f"Erreur d'usage : {e}", file=sys.stderr)
        return EXIT_USAGE
    except (CertError, SingularPiece) as e:
        print(f"Certificat impossible : {e}", file=sys.stderr)
        return EXIT_CERT
    except DomainError as e:
        print(f"Erreur de domaine : {e}", file=sys.stderr)
        return EXIT_CERT if args.command == "bounds" else EXIT_DOMAIN
    except NoRoot as e:
        print(f"Aucune racine : {e}", file=sys.stderr)
        return EXIT_NO_ROOT
    except RegularityError as e:
        print(f"Valeur cible non régulière : {e}", file=sys.stderr)
        return EXIT_NO_ROOT
    except EnumerationCapExceeded as e:
        print(f"Limite d'énumération : {e}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as e:
        print(f"Erreur d'usage : {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

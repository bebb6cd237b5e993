"""Command-line interface: ``ghspace <command> ...``.

Exit codes: 0 on success (a certified interval counts as success), 1 on a
domain violation, 2 on a parse or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .constructions import (
    PROFILES,
    LabeledSpace,
    cantor_level,
    grid_ball_product,
    perfectify,
    random_space,
    spike,
)
from .covering import (
    bracket_check,
    box_dimension,
    covering_number,
    packing_number,
    scale_profile,
)
from .errors import GhspaceError, ParseError, ValidationError
from .experiment import genericity_frequencies
from .gh import gh_exact, gh_local, DEFAULT_BUDGET
from .io import format_matrix, parse_matrix_text
from .metric import DEFAULT_TOL, DistanceMatrix, codiameter, diameter, property_report, validate

EXIT_OK, EXIT_DOMAIN, EXIT_PARSE = 0, 1, 2


def fmt(x: float) -> str:
    return f"{x:.12g}"


def parse_real(text: str) -> float:
    """A decimal, a fraction ``a/b`` or a power ``b^e``."""
    text = text.strip()
    try:
        if "^" in text:
            base, exp = text.split("^", 1)
            return float(Fraction(base)) ** float(Fraction(exp))
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None


def positive_real(text: str) -> float:
    v = parse_real(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def scale_list(text: str) -> list[float]:
    return [positive_real(t) for t in text.split(",") if t.strip()]


class Output:
    """Collects text lines or a JSON payload and writes them once."""

    def __init__(self, args):
        self.json = args.json
        self.path = args.out

    def emit(self, lines: list[str], payload: dict) -> None:
        text = json.dumps(payload) + "\n" if self.json else "\n".join(lines) + "\n"
        if self.path:
            Path(self.path).write_text(text)
        else:
            sys.stdout.write(text)


def load(path: str, tol: float = DEFAULT_TOL) -> DistanceMatrix:
    return validate(parse_matrix_text(Path(path).read_text()), tol=tol)


# -- commands -----------------------------------------------------------------

def cmd_validate(args) -> int:
    raw = parse_matrix_text(Path(args.path).read_text())
    try:
        X = validate(raw, tol=args.tol)
    except ValidationError as exc:
        Output(args).emit([f"INVALID {type(exc).__name__}: {exc}"], {
            "valid": False, "error": type(exc).__name__, "message": str(exc),
            "indices": [getattr(exc, a) for a in ("i", "j", "k") if hasattr(exc, a)],
        })
        return EXIT_DOMAIN
    Output(args).emit([f"VALID n={X.n}"], {"valid": True, "n": X.n})
    return EXIT_OK


def _pairs_text(pairs) -> str:
    return " ".join(f"({a},{b})" for a, b in pairs)


def cmd_gh(args) -> int:
    X, Y = load(args.x), load(args.y)
    if args.method == "local":
        res = gh_local(X, Y)
        if res is None:
            Output(args).emit(
                ["INAPPLICABLE: permutation bound exceeds half the codiameter"],
                {"applicable": False},
            )
            return EXIT_DOMAIN
    else:
        res = gh_exact(X, Y, budget=0 if args.method == "bounds" else args.budget)
    lines = [
        f"lower={fmt(res.lower)}",
        f"upper={fmt(res.upper)}",
        f"exact={'true' if res.exact else 'false'}",
        f"witness={_pairs_text(res.witness.sorted_pairs())}",
    ]
    if not res.exact and args.method == "exact":
        lines.append(f"budget of {args.budget} nodes exhausted; interval is certified")
    payload = res.as_dict()
    payload["method"] = args.method
    Output(args).emit(lines, payload)
    return EXIT_OK


def cmd_props(args) -> int:
    X = load(args.path)
    deltas = args.delta if args.delta else ([codiameter(X) / 2] if X.n >= 2 else [])
    rep = property_report(X, epsilon=args.epsilon, deltas=deltas, tol=args.tol)
    triples = [list(t) for t in rep.collinear_triples]
    lines = [
        f"n={rep.n}",
        f"anisometric={'true' if rep.anisometric else 'false'}",
        f"collisions={len(rep.collisions)}",
        f"collinear_triples={len(triples)}"
        + (" " + " ".join(f"({i},{j},{k})" for i, j, k in rep.collinear_triples) if triples else ""),
        f"max_isolation={fmt(rep.max_isolation)}",
    ]
    for dl, c in rep.component_count_at.items():
        lines.append(f"components_at[{fmt(dl)}]={c}")
    if rep.min_cayley_menger is None:
        lines.append("min_cayley_menger=n/a")
    else:
        a, b, c, d = rep.cayley_menger_witness
        lines.append(f"min_cayley_menger={fmt(rep.min_cayley_menger)} at ({a},{b},{c},{d})")
    payload = {
        "n": rep.n,
        "anisometric": rep.anisometric,
        "collisions": [[list(p), list(q)] for p, q in rep.collisions],
        "collinear_triples": triples,
        "isolation_profile": rep.isolation_scale,
        "max_isolation": rep.max_isolation,
        "component_count_at": [[dl, c] for dl, c in rep.component_count_at.items()],
        "min_cayley_menger": rep.min_cayley_menger,
        "cayley_menger_witness": list(rep.cayley_menger_witness) if rep.cayley_menger_witness else None,
        "distance_set": rep.distance_set,
    }
    Output(args).emit(lines, payload)
    return EXIT_OK


def cmd_cover(args) -> int:
    X = load(args.path)
    res = covering_number(X, args.epsilon)
    Output(args).emit(
        [f"N={res.count}", "centers=" + " ".join(map(str, res.centers))],
        {"epsilon": args.epsilon, "N": res.count, "centers": list(res.centers)},
    )
    return EXIT_OK


def cmd_pack(args) -> int:
    X = load(args.path)
    res = packing_number(X, args.epsilon)
    Output(args).emit(
        [f"M={res.count}", "subset=" + " ".join(map(str, res.subset))],
        {"epsilon": args.epsilon, "M": res.count, "subset": list(res.subset)},
    )
    return EXIT_OK


def auto_scales(X: DistanceMatrix, steps: int) -> list[float]:
    """Geometric grid from the diameter down to the codiameter."""
    if X.n < 2:
        return [1.0, 0.5]
    hi, lo = diameter(X), codiameter(X)
    if hi <= lo:
        return [hi, hi / 2]
    return [float(s) for s in np.geomspace(hi, lo, steps)]


def cmd_dim(args) -> int:
    X = load(args.path)
    scales = args.scales if args.scales else auto_scales(X, args.steps)
    prof = scale_profile(X, scales, packing=True)
    ok = bracket_check(prof, X)
    est = box_dimension(prof, saturation_scale=codiameter(X) if X.n >= 2 else None)
    lines = ["scale N M"]
    lines += [f"{fmt(r['scale'])} {r['N']} {r['M']}" for r in prof.as_rows()]
    lines += [
        f"bracket={'true' if ok else 'false'}",
        f"lower_slope={fmt(est.lower_slope)}",
        f"upper_slope={fmt(est.upper_slope)}",
        f"fit_slope={fmt(est.fit_slope)}",
    ]
    payload = {
        "profile": prof.as_rows(),
        "bracket": ok,
        "lower_slope": est.lower_slope,
        "upper_slope": est.upper_slope,
        "fit_slope": est.fit_slope,
        "window": list(est.window),
        "saturation_scale": est.saturation_scale,
    }
    Output(args).emit(lines, payload)
    return EXIT_OK


def _emit_space(args, X: DistanceMatrix, labels=None) -> None:
    payload = {"n": X.n, "matrix": X.d.tolist()}
    if labels is not None:
        payload["labels"] = [list(lab) for lab in labels]
    Output(args).emit([format_matrix(X).rstrip("\n")], payload)


def cmd_construct(args) -> int:
    if args.kind == "cantor":
        _emit_space(args, cantor_level(args.depth))
        return EXIT_OK
    if not args.input:
        raise argparse.ArgumentTypeError(f"construct {args.kind} needs --input")
    F = load(args.input)
    eps = args.epsilon if args.epsilon is not None else (codiameter(F) / 2 if F.n >= 2 else 1.0)
    if args.kind == "perfectify":
        out: LabeledSpace = perfectify(F, eps, args.layers)
    elif args.kind == "spike":
        out = spike(F, args.base, eps)
    else:
        out = grid_ball_product(F, args.dim, eps, args.resolution)
    _emit_space(args, out.matrix, out.labels)
    return EXIT_OK


def cmd_random(args) -> int:
    base = load(args.input) if args.input else None
    X = random_space(args.n, args.seed, args.profile, base=base, amplitude=args.amplitude)
    _emit_space(args, X)
    return EXIT_OK


def cmd_experiment(args) -> int:
    table = genericity_frequencies(args.n, args.samples, args.seed, args.tol)
    rows = table.as_dict()
    lines = [f"n={table.n} samples={table.samples} seed={table.seed} tol={fmt(table.tol)}"]
    for key in (
        "anisometric_fraction",
        "collinear_fraction",
        "no_collinear_fraction",
        "negative_cayley_menger_fraction",
        "mean_components_at_half_cdm",
    ):
        lines.append(f"{key} {fmt(rows[key])}")
    Output(args).emit(lines, rows)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--out", metavar="PATH", help="write output to PATH")

    p = argparse.ArgumentParser(prog="ghspace", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check the metric axioms")
    s.add_argument("path")
    s.add_argument("--tol", type=parse_real, default=DEFAULT_TOL)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("gh", parents=[common], help="Gromov-Hausdorff distance")
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--method", choices=("exact", "bounds", "local"), default="exact")
    s.add_argument("--budget", type=positive_int, default=DEFAULT_BUDGET)
    s.set_defaults(func=cmd_gh)

    s = sub.add_parser("props", parents=[common], help="genericity predicates")
    s.add_argument("path")
    s.add_argument("--epsilon", type=parse_real, default=0.0, help="collinearity slack")
    s.add_argument("--delta", type=positive_real, action="append",
                   help="component scale (repeatable; default cdm/2)")
    s.add_argument("--tol", type=parse_real, default=DEFAULT_TOL)
    s.set_defaults(func=cmd_props)

    for name, func, what in (("cover", cmd_cover, "covering number"),
                             ("pack", cmd_pack, "packing number")):
        s = sub.add_parser(name, parents=[common], help=what)
        s.add_argument("path")
        s.add_argument("--epsilon", type=positive_real, required=True)
        s.set_defaults(func=func)

    s = sub.add_parser("dim", parents=[common], help="box-dimension slopes")
    s.add_argument("path")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--scales", type=scale_list, help="comma list, e.g. 1/3,1/9 or 3^-1,3^-2")
    g.add_argument("--auto-window", action="store_true", help="geometric grid from diam to cdm")
    s.add_argument("--steps", type=positive_int, default=6)
    s.set_defaults(func=cmd_dim)

    s = sub.add_parser("construct", parents=[common], help="build a space")
    s.add_argument("kind", choices=("perfectify", "spike", "product", "cantor"))
    s.add_argument("--input", metavar="PATH", help="base space F")
    s.add_argument("--epsilon", type=positive_real, help="default cdm(F)/2")
    s.add_argument("--layers", type=positive_int, default=1)
    s.add_argument("--base", type=int, default=0)
    s.add_argument("--dim", type=positive_int, default=1)
    s.add_argument("--resolution", type=positive_int, default=5)
    s.add_argument("--depth", type=int, default=3)
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("random", parents=[common], help="seeded random space")
    s.add_argument("--n", type=positive_int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--profile", choices=PROFILES, default="safe-band")
    s.add_argument("--input", metavar="PATH", help="base matrix for the perturbed profile")
    s.add_argument("--amplitude", type=parse_real)
    s.set_defaults(func=cmd_random)

    s = sub.add_parser("experiment", parents=[common], help="genericity frequencies")
    s.add_argument("--n", type=int, default=6)
    s.add_argument("--samples", type=positive_int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=parse_real, default=1e-12)
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (GhspaceError, ValueError, IndexError, argparse.ArgumentTypeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())

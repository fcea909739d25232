"""Command-line interface.

Subcommands compute the HTV of meshes (exact facet sums), of built-in
smooth functions (quadrature), and of sampled functions (grid oracle),
check transform invariance laws, sweep RBF kernel widths, and import
ReLU networks as meshes.  All numeric output carries 12 significant
digits and repeated invocations produce byte-identical output.

Exit codes: 0 success, 2 parse error, 3 invariant violation,
4 numerical failure.
"""

import argparse
import json
import math
import re
import sys

import numpy as np

from . import cpwl, matnorm, mesh_io, oracle, smooth, transforms
from .construct import mesh_from_relu_1d, relu_to_cpwl_2d
from .errors import InvariantViolation, NumericalError, ParseError
from .mixed_fields import BoxDomain
from .smooth import QuadratureSpec


def _fmt(x):
    return format(float(x), ".12g")


def _parse_order(text):
    text = text.strip().lower()
    if text in ("inf", "infinity", "+inf"):
        return math.inf
    try:
        p = float(text)
    except ValueError as exc:
        raise ParseError(f"cannot parse Schatten order {text!r}") from exc
    return matnorm.check_order(p)


def _parse_box(text):
    axes = []
    for part in text.split(","):
        pieces = part.split(":")
        if len(pieces) != 2:
            raise ParseError(f"box axis {part!r} must look like lo:hi")
        try:
            axes.append((float(pieces[0]), float(pieces[1])))
        except ValueError as exc:
            raise ParseError(f"cannot parse box axis {part!r}") from exc
    return BoxDomain(tuple(a for a, _ in axes), tuple(b for _, b in axes))


def _parse_params(tokens):
    params = {}
    for token in tokens or ():
        if "=" not in token:
            raise ParseError(f"parameter {token!r} must look like key=value")
        key, _, value = token.partition("=")
        parts = value.split(",")
        try:
            parsed = [float(v) for v in parts]
        except ValueError as exc:
            raise ParseError(f"cannot parse parameter {token!r}") from exc
        params[key] = parsed[0] if len(parsed) == 1 else tuple(parsed)
    return params


def _parse_angle(text):
    text = text.strip().lower()
    if text.endswith("deg"):
        return math.radians(float(text[:-3]))
    if text.endswith("rad"):
        return float(text[:-3])
    return float(text)


def _parse_transform(text, dim):
    """Grammar: ops separated by ';', each used at most once.

    rot:30deg[:i,j]  plane rotation (default plane 0,1)
    scale:2          scaling factor
    translate:x,y    shift vector
    """
    u = np.eye(dim)
    alpha = 1.0
    shift = np.zeros(dim)
    seen = set()
    for op in filter(None, (s.strip() for s in text.split(";"))):
        kind, _, rest = op.partition(":")
        if kind in seen:
            raise ParseError(f"transform op {kind!r} given twice")
        seen.add(kind)
        try:
            if kind == "rot":
                pieces = rest.split(":")
                theta = _parse_angle(pieces[0])
                i, j = (0, 1)
                if len(pieces) > 1:
                    i, j = (int(v) for v in pieces[1].split(","))
                u = transforms.rotation(dim, i, j, theta)
            elif kind == "scale":
                alpha = float(rest)
            elif kind == "translate":
                shift = np.array([float(v) for v in rest.split(",")])
            else:
                raise ParseError(f"unknown transform op {kind!r}")
        except (ValueError, IndexError) as exc:
            raise ParseError(f"cannot parse transform op {op!r}") from exc
    return transforms.DomainTransform(u, alpha, shift)


def _builtin(name, params):
    if name not in smooth.BUILTINS:
        raise ParseError(
            f"unknown function {name!r}; available: {', '.join(sorted(smooth.BUILTINS))}"
        )
    return smooth.BUILTINS[name](**params)


# -- subcommands -------------------------------------------------------


def _cmd_cpwl(args):
    mesh = mesh_io.read_mesh(args.mesh)
    p = _parse_order(args.p)
    value = cpwl.htv(mesh, p)
    regions = cpwl.region_count(mesh)
    if args.json:
        print(json.dumps({"htv": value, "regions": regions}, sort_keys=True))
    elif args.csv:
        print("htv,regions")
        print(f"{_fmt(value)},{regions}")
    else:
        print(f"htv {_fmt(value)}")
        print(f"regions {regions}")
    return 0


def _cmd_smooth(args):
    fn = _builtin(args.fn, _parse_params(args.params))
    box = _parse_box(args.box)
    spec = QuadratureSpec(box, args.nodes, args.rule)
    value, err = smooth.htv_quadrature(fn, spec, _parse_order(args.p))
    print(f"htv {_fmt(value)}")
    print(f"error_estimate {_fmt(err)}")
    return 0


def _cmd_oracle(args):
    if (args.fn is None) == (args.mesh is None):
        raise ParseError("oracle needs exactly one of --fn or --mesh")
    if args.fn is not None:
        if args.box is None:
            raise ParseError("--box is required with --fn")
        target = _builtin(args.fn, _parse_params(args.params))
        box = _parse_box(args.box)
    else:
        target = mesh_io.read_mesh(args.mesh)
        if args.box is not None:
            box = _parse_box(args.box)
        else:
            lo, hi = target.bounding_box()
            box = BoxDomain(tuple(lo), tuple(hi))
    p = _parse_order(args.p)
    if args.study is not None:
        try:
            resolutions = [int(n) for n in args.study.split(",")]
        except ValueError as exc:
            raise ParseError(f"cannot parse resolutions {args.study!r}") from exc
        rows = oracle.convergence_study(
            target, box, p, resolutions, reference=args.reference
        )
        lines = ["h,htv,relative_error"]
        lines += [
            f"{_fmt(h)},{_fmt(v)},{'' if e is None else _fmt(e)}" for h, v, e in rows
        ]
        text = "\n".join(lines) + "\n"
        if args.csv is not None:
            with open(args.csv, "w", encoding="utf-8") as fh:
                fh.write(text)
        sys.stdout.write(text)
        return 0
    grid = oracle.sample_function(target, box, args.nodes)
    value = oracle.grid_htv(grid, p, window=args.window)
    print(f"htv {_fmt(value)}")
    print(f"excluded_boundary_nodes {grid.boundary_count}")
    return 0


def _cmd_check_invariance(args):
    mesh = mesh_io.read_mesh(args.mesh)
    transform = _parse_transform(args.transform, mesh.dim)
    p = _parse_order(args.p)
    base = cpwl.htv(mesh, p)
    # HTV at rounding level (an affine mesh) leaves the factor undefined
    scale = max(1.0, float(np.linalg.norm(mesh.piece_gradients, axis=1).max()))
    if base <= 1e-12 * scale * (1.0 + float(np.sum(mesh.facet_measures))):
        raise NumericalError("mesh HTV is zero to rounding; the factor is undefined")
    moved = cpwl.htv(transforms.apply_to_cpwl(mesh, transform), p)
    predicted = transforms.predicted_factor(transform, mesh.dim)
    measured = moved / base
    print(f"predicted {_fmt(predicted)}")
    print(f"measured {_fmt(measured)}")
    print(f"relative_deviation {_fmt(abs(measured - predicted) / predicted)}")
    return 0


def _cmd_sweep_rbf(args):
    centers, weights = mesh_io.read_rbf_mixture(args.centers)
    try:
        widths = [float(w) for w in args.widths.split(",")]
    except ValueError as exc:
        raise ParseError(f"cannot parse widths {args.widths!r}") from exc
    box = _parse_box(args.box)
    spec = QuadratureSpec(box, args.nodes)
    rows = smooth.sweep_rbf_width(centers, weights, widths, spec, _parse_order(args.p))
    lines = ["sigma,htv,error_estimate"]
    lines += [f"{_fmt(s)},{_fmt(v)},{_fmt(e)}" for s, v, e in rows]
    text = "\n".join(lines) + "\n"
    if args.csv is not None:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0


def _cmd_import_relu(args):
    weights = mesh_io.read_mlp_weights(args.weights)
    if weights.input_dim == 1:
        if args.box is not None:
            box = _parse_box(args.box)
            mesh = mesh_from_relu_1d(weights, lo=box.lower[0], hi=box.upper[0])
        else:
            mesh = mesh_from_relu_1d(weights)
    elif weights.input_dim == 2:
        box = _parse_box(args.box) if args.box else BoxDomain((-1.0, -1.0), (1.0, 1.0))
        mesh = relu_to_cpwl_2d(weights, box, cells=args.nodes, method=args.method)
    else:
        raise InvariantViolation("only 1- and 2-input networks can be imported")
    mesh_io.write_mesh(mesh, args.out)
    print(f"wrote {args.out} ({mesh.meta.get('construction', 'mesh')}, "
          f"{mesh.num_simplices} simplices)")
    return 0


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # treat tokens like -1:1,-1:1 as values, not flags
        self._negative_number_matcher = re.compile(r"^-[\d.]")


def build_parser():
    parser = _Parser(
        prog="htv",
        description="Hessian-Schatten total variation of meshes, smooth "
        "functions and sampled grids.",
        epilog="CSV outputs: 'htv cpwl --csv' emits columns htv,regions; "
        "'htv sweep-rbf' emits columns sigma,htv,error_estimate. "
        "Box syntax: lo:hi per axis, comma separated, e.g. -2:2,-2:2. "
        "Transform syntax: 'rot:30deg;scale:2;translate:0.5,0.25'.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("cpwl", help="exact HTV and region count of a mesh file")
    c.add_argument("--mesh", required=True)
    c.add_argument("--p", default="1")
    fmt = c.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    c.set_defaults(func=_cmd_cpwl)

    s = sub.add_parser("smooth", help="HTV of a built-in function by quadrature")
    s.add_argument("--fn", required=True)
    s.add_argument("--params", nargs="*", metavar="K=V")
    s.add_argument("--box", required=True)
    s.add_argument("--nodes", type=int, default=64)
    s.add_argument("--rule", choices=[smooth.MIDPOINT, smooth.GAUSS2],
                   default=smooth.MIDPOINT)
    s.add_argument("--p", default="1")
    s.set_defaults(func=_cmd_smooth)

    o = sub.add_parser("oracle", help="grid-sampled finite-difference HTV estimate")
    o.add_argument("--fn")
    o.add_argument("--params", nargs="*", metavar="K=V")
    o.add_argument("--mesh")
    o.add_argument("--box")
    o.add_argument("--nodes", type=int, default=256)
    o.add_argument("--window", type=int, default=None,
                   help="aggregation window in nodes (default: automatic)")
    o.add_argument("--p", default="1")
    o.add_argument("--study", metavar="N1,N2,...", default=None,
                   help="emit a CSV convergence table over these resolutions")
    o.add_argument("--reference", type=float, default=None,
                   help="reference value for the study's error column")
    o.add_argument("--csv", default=None, metavar="OUT",
                   help="also write the study table to this file")
    o.set_defaults(func=_cmd_oracle)

    i = sub.add_parser("check-invariance",
                       help="measured vs predicted HTV factor under a transform")
    i.add_argument("--mesh", required=True)
    i.add_argument("--transform", required=True)
    i.add_argument("--p", default="1")
    i.set_defaults(func=_cmd_check_invariance)

    w = sub.add_parser("sweep-rbf", help="HTV of an RBF mixture across kernel widths")
    w.add_argument("--centers", required=True)
    w.add_argument("--widths", required=True)
    w.add_argument("--box", default="-2:2,-2:2")
    w.add_argument("--nodes", type=int, default=128)
    w.add_argument("--p", default="1")
    w.add_argument("--csv", default=None, metavar="OUT")
    w.set_defaults(func=_cmd_sweep_rbf)

    r = sub.add_parser("import-relu", help="convert ReLU network weights to a mesh")
    r.add_argument("--weights", required=True)
    r.add_argument("--box")
    r.add_argument("--nodes", type=int, default=64)
    r.add_argument("--method", choices=["auto", "exact", "approximate"],
                   default="auto")
    r.add_argument("--out", required=True)
    r.set_defaults(func=_cmd_import_relu)
    return parser


def _error_line(kind, exc):
    message = " ".join(str(exc).split())
    return f"error kind={kind} message={message!r}"


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(_error_line("parse", exc), file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(_error_line("invariant", exc), file=sys.stderr)
        return 3
    except (NumericalError, ArithmeticError) as exc:
        print(_error_line("numerical", exc), file=sys.stderr)
        return 4
    except ValueError as exc:
        print(_error_line("invariant", exc), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

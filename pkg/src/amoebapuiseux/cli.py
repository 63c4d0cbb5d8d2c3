"""Command-line pipeline: parse, discriminant, amoeba, components, monodromy, expansions.

Exit codes: 0 success, 2 parse or configuration error, 3 a numerical check
failed, 4 a pipeline stage failed.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import amoeba, monodromy as mono_mod, polyhedra, puiseux
from .laurent import ParseError, discriminant_y, newton_polytope, parse_polynomial

LOGGER = logging.getLogger("amoebapuiseux")

EXIT_OK, EXIT_CONFIG, EXIT_CHECK, EXIT_STAGE = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage, exc):
        super().__init__(f"[{stage}] {exc}")
        self.stage = stage


class CheckFailed(RuntimeError):
    pass


STAGE_ERRORS = (amoeba.AmoebaProximityError, amoeba.NumericalFailure, amoeba.ScheduleExhausted,
                amoeba.DegenerateSliceError, mono_mod.RootCollisionError,
                mono_mod.ContinuationError, mono_mod.MonodromyError,
                puiseux.SeamMismatchError, puiseux.HenselUnavailable,
                polyhedra.DimensionError, polyhedra.NotRegularError, RuntimeError)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except STAGE_ERRORS as exc:
        raise StageError(name, exc) from exc


# -- argument parsing -------------------------------------------------------------

def _read_poly_text(value):
    if value is None:
        raise ConfigError("a polynomial is required (-f/--poly)")
    if os.path.isfile(value):
        with open(value) as fh:
            return fh.read().strip()
    return value


def _parse_vars(value):
    if value is None:
        return None
    names = tuple(v.strip() for v in value.split(",") if v.strip())
    if not names:
        raise ConfigError("--vars is empty")
    return names


def _parse_int_vector(value, what):
    try:
        return tuple(int(a) for a in value.split(","))
    except ValueError:
        raise ConfigError(f"{what} must be comma-separated integers, got {value!r}") from None


def _parse_float_vector(value, what):
    try:
        return tuple(float(a) for a in value.split(","))
    except ValueError:
        raise ConfigError(f"{what} must be comma-separated numbers, got {value!r}") from None


def _parse_box(value, n):
    if value is None:
        return ((-4.0, 4.0),) * n
    try:
        box = tuple(tuple(float(a) for a in part.split(":")) for part in value.split(","))
    except ValueError:
        raise ConfigError(f"bad --box {value!r}; expected a:b,c:d") from None
    if any(len(b) != 2 or not b[0] < b[1] for b in box):
        raise ConfigError(f"bad --box {value!r}; every axis needs a:b with a < b")
    if len(box) == 1 and n > 1:
        box = box * n
    if len(box) != n:
        raise ConfigError(f"--box has {len(box)} axes, expected {n}")
    return box


def _positive(name):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if v <= 0:
            raise argparse.ArgumentTypeError(f"{name} must be positive")
        return v
    return conv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-f", "--poly", help="polynomial text or a file containing it")
    common.add_argument("--vars", help="comma-separated variable order; the last one is the fiber "
                                       "variable for discriminant-based commands")
    common.add_argument("--seed", type=int, default=0, help="master random seed")
    common.add_argument("-o", "--output", help="output path (default: stdout for JSON)")
    common.add_argument("-v", "--verbose", action="store_true")

    amoeba_opts = argparse.ArgumentParser(add_help=False)
    amoeba_opts.add_argument("--box", help="log-space box a:b,c:d (default -4:4 per axis)")
    amoeba_opts.add_argument("--res", type=_positive("--res"), default=200,
                             help="raster cells per axis")
    amoeba_opts.add_argument("--angles", type=_positive("--angles"), default=64,
                             help="torus angle samples per slice")
    amoeba_opts.add_argument("--tol-amoeba", type=float, default=None,
                             help="membership slack in log space (default two cells)")

    delta_opts = argparse.ArgumentParser(add_help=False)
    delta_opts.add_argument("--delta", help="override the discriminant (text in the base variables)")
    delta_opts.add_argument("--component", help="order vector i,j of the complement component")
    delta_opts.add_argument("--point", help="log-space base point instead of a searched representative")
    delta_opts.add_argument("--steps", type=_positive("--steps"), default=256,
                            help="continuation steps per loop")

    p = _Parser(prog="amoeba", description="Amoebas, discriminant monodromy and Puiseux expansions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("render", parents=[common, amoeba_opts],
                       help="draw the amoeba as SVG and write the order table")
    r.add_argument("--json", help="path for the JSON component table")
    r.add_argument("--discriminant", action="store_true",
                   help="draw the amoeba of the discriminant of F instead of F itself")

    o = sub.add_parser("orders", parents=[common, amoeba_opts], help="complement components as JSON")
    o.add_argument("--discriminant", action="store_true")

    sub.add_parser("cones", parents=[common, delta_opts],
                   help="vertex cones of the discriminant's Newton polytope")

    sub.add_parser("monodromy", parents=[common, amoeba_opts, delta_opts],
                   help="loop permutations and branch orbits over a component")

    s = sub.add_parser("solve", parents=[common, amoeba_opts, delta_opts],
                       help="Puiseux expansions over a component")
    s.add_argument("--grid", type=_positive("--grid"), default=128, help="torus grid size G per axis")
    s.add_argument("--weight", type=float, default=20, help="truncation bound w.I <= weight")
    s.add_argument("--tol-support", type=float, default=1e-8)
    s.add_argument("--tol-residual", type=float, default=1e-6)
    s.add_argument("--tol-refine", type=float, default=1e-9,
                   help="allowed change of coefficients when the grid is doubled")
    s.add_argument("--figure", help="optional SVG of the support of the first expansion")

    v = sub.add_parser("verify", help="re-check residual and support of a solve output")
    v.add_argument("expansion", help="JSON written by solve")
    v.add_argument("poly", nargs="?", help="polynomial text or file (or use -f)")
    v.add_argument("-f", "--poly", dest="poly_opt")
    v.add_argument("--vars")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=_positive("--samples"), default=64)
    v.add_argument("--depth", type=float, default=None,
                   help="sample depth along the recession direction (default: as recorded)")
    v.add_argument("--tol-support", type=float, default=1e-8)
    v.add_argument("--tol-residual", type=float, default=1e-6)
    v.add_argument("-o", "--output")
    v.add_argument("-v", "--verbose", action="store_true")
    return p


# -- pipeline pieces ----------------------------------------------------------------

def _load_poly(args):
    text = _read_poly_text(args.poly)
    return parse_polynomial(text, _parse_vars(args.vars))


def _discriminant(F, args):
    if F.nvars < 2:
        raise ConfigError("discriminant commands need at least one base variable and a fiber variable")
    base_vars = F.variables[:-1]
    if getattr(args, "delta", None):
        return parse_polynomial(_read_poly_text(args.delta), base_vars)
    delta = _stage("discriminant", discriminant_y, F)
    if delta.is_zero():
        raise StageError("discriminant", "F has a repeated factor in the fiber variable")
    return delta


def _write_json(data, path):
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _raster_components(f, args):
    box = _parse_box(args.box, f.nvars)
    np_ = newton_polytope(f)
    ras = _stage("amoeba", amoeba.raster, f, box, resolution=args.res, angles=args.angles,
                 tol=args.tol_amoeba, seed=args.seed)
    comps = _stage("components", amoeba.components, ras, np_)
    return ras, np_, comps


def _whole_space_component(delta):
    """Monomial discriminant: one component, support in the nonnegative orthant."""
    n = delta.nvars
    order = next(iter(delta.terms))
    rec = polyhedra.Cone.whole_space(n)
    return amoeba.ComplementComponent(tuple(order), (0.0,) * n, rec, polyhedra.Cone.orthant(n),
                                      bounded=False)


def _find_component(delta, args):
    if delta.is_monomial():
        print("warning: empty amoeba (monomial discriminant); using the nonnegative orthant "
              "as support cone", file=sys.stderr)
        comp = _whole_space_component(delta)
        if args.point:
            comp.representative = _parse_float_vector(args.point, "--point")
        return comp
    np_ = newton_polytope(delta)
    if args.component is None:
        raise ConfigError("--component i,j is required")
    order = _parse_int_vector(args.component, "--component")
    if len(order) != delta.nvars:
        raise ConfigError(f"--component needs {delta.nvars} entries")
    if order not in set(np_.lattice_points()):
        raise ConfigError(f"order {order} is not a lattice point of the discriminant's Newton polytope")
    if args.point:
        x = _parse_float_vector(args.point, "--point")
        found = _stage("order", amoeba.order_at, delta, x, seed=args.seed)
        if found != order:
            raise StageError("order", f"point {x} has order {found}, not {order}")
        return amoeba.make_component(np_, order, x)
    if np_.is_vertex(order):
        x = _stage("representative", amoeba.representative_for_vertex, delta, np_, order,
                   seed=args.seed)
        return amoeba.make_component(np_, order, x)
    _, _, comps = _raster_components(delta, args)
    for c in comps:
        if c.order == order:
            return c
    raise StageError("components", f"no complement component of order {order} in the box")


# -- commands --------------------------------------------------------------------------

def cmd_render(args):
    F = _load_poly(args)
    f = _discriminant(F, args) if args.discriminant else F
    if f.nvars not in (1, 2):
        raise ConfigError("render draws amoebas in one or two variables")
    if f.is_monomial():
        print("warning: empty amoeba (monomial)", file=sys.stderr)
    if not args.output:
        raise ConfigError("render needs -o path.svg")
    from .plotting import render_amoeba
    ras, np_, comps = _raster_components(f, args)
    render_amoeba(ras, args.output, comps)
    if args.json:
        _write_json(_order_table(comps), args.json)
    return EXIT_OK


def _order_table(comps):
    return [{"order": list(c.order), "representative": [round(float(a), 12) for a in c.representative],
             "bounded": c.bounded, "support_cone": c.support_cone.to_json(), "cells": c.cells}
            for c in comps]


def cmd_orders(args):
    F = _load_poly(args)
    f = _discriminant(F, args) if args.discriminant else F
    if f.is_monomial():
        print("warning: empty amoeba (monomial)", file=sys.stderr)
    _, _, comps = _raster_components(f, args)
    _write_json(_order_table(comps), args.output)
    return EXIT_OK


def cmd_cones(args):
    F = _load_poly(args)
    delta = _discriminant(F, args)
    np_ = newton_polytope(delta)
    out = {"discriminant": str(delta), "newton_polytope": np_.to_json(), "vertices": []}
    for v in np_.vertices:
        sp = polyhedra.sigma_p(np_, v)
        rec = polyhedra.recession_cone_of_order(np_, v)
        entry = {"order": list(v), "support_cone": sp.to_json(), "recession_cone": rec.to_json(),
                 "dual_generators": [list(g) for g in sp.dual_generators],
                 "strongly_convex": sp.is_strongly_convex,
                 "regular": polyhedra.is_regular(sp) if sp.is_strongly_convex else None}
        if sp.dim == 2 and sp.is_strongly_convex and len(sp.generators) == 2:
            entry["regular_subdivision"] = [c.to_json() for c in polyhedra.subdivide_regular_2d(sp)]
        out["vertices"].append(entry)
    _write_json(out, args.output)
    return EXIT_OK


def cmd_monodromy(args):
    F = _load_poly(args)
    delta = _discriminant(F, args)
    comp = _find_component(delta, args)
    res = _stage("monodromy", mono_mod.monodromy, F, comp.representative, steps=args.steps)
    out = res.to_json()
    out["order"] = list(comp.order)
    _write_json(out, args.output)
    return EXIT_OK


def cmd_solve(args):
    F = _load_poly(args)
    delta = _discriminant(F, args)
    comp = _find_component(delta, args)
    mono, exps, x = _stage("expansion", puiseux.solve_component, F, comp, grid=args.grid,
                           max_weight=args.weight, steps=args.steps, agree_tol=args.tol_refine,
                           seed=args.seed, variables=F.variables[:-1])
    records, failures = [], []
    for e in exps:
        rec = e.to_json()
        leak = e.stats["support_leak_translated"]
        rec["checks"] = {"residual_pass": rec["residual"] <= args.tol_residual,
                         "support_pass": leak <= args.tol_support,
                         "grid_refinement_pass": e.stats["grid_refinement_change"] <= args.tol_refine}
        for name, ok in rec["checks"].items():
            if not ok:
                failures.append(f"branch {e.branch_id}: {name[:-5]} check failed")
        records.append(rec)
    out = {"order": list(comp.order), "delta": str(delta), "vars": list(F.variables),
           "log_radius": list(x), "monodromy": mono.to_json(), "expansions": records}
    _write_json(out, args.output)
    if args.figure and exps and exps[0].dim == 2:
        from .plotting import render_support
        render_support(exps[0], args.figure)
    if failures:
        raise CheckFailed("; ".join(failures))
    return EXIT_OK


def _records(data):
    if isinstance(data, dict) and "expansions" in data:
        return data["expansions"]
    if isinstance(data, dict):
        return [data]
    if isinstance(data, list):
        return data
    raise ConfigError("expansion JSON must be a record, a list of records or a solve output")


def cmd_verify(args):
    try:
        with open(args.expansion) as fh:
            data = json.load(fh)
        records = [puiseux.PuiseuxExpansion.from_json(r) for r in _records(data)]
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot read expansion file: {exc}") from exc
    poly = args.poly or args.poly_opt
    variables = _parse_vars(args.vars)
    if variables is None and isinstance(data, dict) and data.get("vars"):
        variables = tuple(data["vars"])
    F = parse_polynomial(_read_poly_text(poly), variables)
    report, failed = [], False
    for e in records:
        if e.log_radius is None or not e.coefficients:
            raise ConfigError("record lacks log_radius or coefficients")
        if len(e.log_radius) != F.nvars - 1:
            raise ConfigError("record dimension does not match the polynomial")
        depth = args.depth
        if depth is None:
            depth = e.stats.get("residual_depth") or 0.0
        pts = puiseux.sample_points(e, args.samples, depth=depth, seed=args.seed)
        residual = puiseux.verify_residual(F, e, pts)
        literal = puiseux.check_support(e, tol=args.tol_support)
        shifted = puiseux.check_support(e, tol=args.tol_support, translate=True)
        row = {"branch_id": e.branch_id, "d": e.d, "residual": residual,
               "support_leak": literal.max_outside, "support_leak_translated": shifted.max_outside,
               "apex": list(shifted.apex), "residual_pass": residual <= args.tol_residual,
               "support_pass": shifted.passed, "offending": [list(I) for I in shifted.offending]}
        failed |= not (row["residual_pass"] and row["support_pass"])
        report.append(row)
        print(f"branch {e.branch_id}: residual {residual:.3e} "
              f"{'PASS' if row['residual_pass'] else 'FAIL'}, support leak "
              f"{shifted.max_outside:.3e} {'PASS' if row['support_pass'] else 'FAIL'}",
              file=sys.stderr)
    _write_json(report, args.output)
    if failed:
        raise CheckFailed("verification failed")
    return EXIT_OK


COMMANDS = {"render": cmd_render, "orders": cmd_orders, "cones": cmd_cones,
            "monodromy": cmd_monodromy, "solve": cmd_solve, "verify": cmd_verify}


def _join_negative_values(argv):
    """Let ``--box -6:8`` and ``--point -1,-1`` through argparse's dash detection."""
    out = []
    it = iter(argv)
    for a in it:
        if a in ("--box", "--point", "--component"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None):
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.seterr(all="ignore")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except StageError as exc:
        print(f"stage failure: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit status: 0 success, 1 input error, 2 certified negative (no balanced
hyperplane, impossible window), 3 solver failure (no convergence, degenerate
limit).
"""
import argparse
import os
import sys
from fractions import Fraction

from . import io
from .balanced import (NotFound, condition_ii_check, extreme_order_permutations, find_balanced_hyperplane,
                       inside_colors)
from .errors import DegenerateLimit, FraccutError, NoConvergence, NoRoot
from .geometry import to_rational

EXIT_OK, EXIT_INPUT, EXIT_NEGATIVE, EXIT_SOLVER = 0, 1, 2, 3


class InputError(FraccutError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _emit(args, text):
    if args.out:
        io.write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _points(path, check=True):
    return io.parse_points(io.read_text(path), path, check_general_position=check)


def _grids(paths, exact=False):
    return [io.parse_grid(io.read_text(p), p, exact=exact) for p in paths]


def _rational(text):
    try:
        return to_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _need_seed(args):
    if args.seed is None:
        raise InputError(f"{args.command} is randomized: --seed is required")


def _num_list(text):
    return ", ".join(io.fmt_number(v) for v in text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_balanced_find(args):
    s = _points(args.points)
    res = find_balanced_hyperplane(s)
    if isinstance(res, NotFound):
        _emit(args, io.format_not_found(res))
        return EXIT_NEGATIVE
    _emit(args, io.format_witness(res))
    return EXIT_OK


def _perm(p):
    return "".join(str(c) for c in p)


def cmd_condition_check(args):
    s = _points(args.points)
    if s.dim >= 3:
        _need_seed(args)
    rep = extreme_order_permutations(s, samples=args.samples, seed=args.seed or 0)
    cond = condition_ii_check(s, report=rep)
    relabel = "none" if cond.holds_after_relabeling is None else " ".join(map(str, cond.holds_after_relabeling))
    text = (f"realized: {' '.join(_perm(p) for p in sorted(rep.realized))}\n"
            f"missing: {' '.join(_perm(p) for p in sorted(rep.missing))}\n"
            f"approximate: {str(rep.approximate).lower()}\n"
            f"holds_as_labeled: {str(cond.holds_as_labeled).lower()} | relabeling: {relabel}\n")
    _emit(args, text)
    return EXIT_OK


def cmd_hull_check(args):
    s = _points(args.points)
    inside = inside_colors(s)
    _emit(args, f"inside_colors: {' '.join(map(str, inside))} | holds: {str(bool(inside)).lower()}\n")
    return EXIT_OK


def cmd_hamcut(args):
    from .sandwich import Charge, find_charge_bisection, odd_map
    charges = [Charge(g) for g in _grids(args.grids)]
    u, H = find_charge_bisection(charges, tol=args.tol)
    P = odd_map(charges, u)
    _emit(args, f"u: {' '.join(repr(float(v)) for v in u.u)} | odd-map: {' '.join(repr(float(v)) for v in P)}\n")
    return EXIT_OK


def _continuation_cfg(args):
    from .sandwich import ContinuationConfig
    return ContinuationConfig(s0=args.s0, gamma=args.gamma, s_min=args.smin, zero_tol=args.tol,
                              epsilon=args.epsilon)


def _order(text, k):
    if text is None:
        return None
    try:
        order = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise InputError(f"--order must be comma-separated integers, got {text!r}") from None
    if sorted(order) != list(range(k)):
        raise InputError(f"--order must be a permutation of 0..{k - 1}")
    return order


def cmd_fraction_cut(args):
    from .sandwich import find_equal_fraction_halfspace
    grids = [g.normalized() for g in _grids(args.grids)]
    res = find_equal_fraction_halfspace(grids, _continuation_cfg(args), order=_order(args.order, len(grids)))
    _emit(args, io.format_fraction_cut(res.u.u, res.fractions, res.common_fraction, res.residual))
    return EXIT_OK


def cmd_probe(args):
    from .sandwich import epsilon_not_permuted_probe
    grids = [g.normalized() for g in _grids(args.grids)]
    rep = epsilon_not_permuted_probe(grids, args.epsilon, budget=args.budget)
    lines = [f"samples: {rep.samples} | violations: {rep.violation_count}",
             f"realized: {' '.join(_perm(p) for p in sorted(rep.realized_perms))}"]
    for H, fr in rep.violations:
        lines.append(io.format_halfspace(H, fr).rstrip("\n"))
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_anchored_cut(args):
    from .sandwich import halfspace_fractions, point_anchored_equal_cut
    grids = [g.normalized() for g in _grids(args.grids)]
    try:
        p = tuple(to_rational(t) for t in args.point.split(","))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"--point must read x,y, got {args.point!r}") from None
    H = point_anchored_equal_cut(grids, p, tol=args.tol)
    _emit(args, io.format_halfspace(H, halfspace_fractions(grids, H)))
    return EXIT_OK


def cmd_window1d(args):
    from .window import find_interval_window
    m0, m1 = _grids(args.grids, exact=True)
    w = find_interval_window(m0, m1, args.alpha)
    _emit(args, io.format_interval(w))
    return EXIT_OK


def cmd_window1d_ce(args):
    from .window import verify_interval_counterexample
    m0, m1 = _grids(args.grids, exact=True)
    rep = verify_interval_counterexample(m0, m1, args.alpha)
    _emit(args, f"impossible: {str(rep.impossible).lower()} | min: {io.fmt_rational(rep.min_m1_over_family)}"
                f" | max: {io.fmt_rational(rep.max_m1_over_family)}\n")
    return EXIT_NEGATIVE if rep.impossible else EXIT_OK


def _gv_cfg(args):
    from .window import GVConfig
    return GVConfig(tol=args.tol, subsample=args.subsample, seed=args.seed)


def cmd_gv_partition(args):
    from .window import gv_equipartition
    _need_seed(args)
    grids = [g.normalized() for g in _grids(args.grids)]
    p = gv_equipartition(grids, args.m, _gv_cfg(args))
    _emit(args, io.format_partition(p))
    return EXIT_OK


def cmd_convex_window(args):
    from .window import convex_window
    _need_seed(args)
    grids = [g.normalized() for g in _grids(args.grids)]
    w = convex_window(grids, args.m, _gv_cfg(args))
    _emit(args, io.format_window(w))
    return EXIT_OK


FIXTURES = ("bereg-kano", "hull-inside", "triangle-rays", "interval-ce", "simplex-ce")


def cmd_gen_fixture(args):
    from . import fixtures as fx
    from .window import build_interval_counterexample, build_simplex_counterexample
    kind = args.kind
    if kind in ("bereg-kano", "hull-inside") or (kind == "triangle-rays" and not args.continuous):
        _need_seed(args)
    os.makedirs(args.out_dir, exist_ok=True)
    files = {}
    if kind == "bereg-kano":
        files["points.txt"] = io.format_points(fx.bereg_kano(args.n, args.seed))
    elif kind == "hull-inside":
        if args.continuous:
            grids, _ = fx.remark13_triple(args.seed, size=args.size)
            files.update({f"measure_{i}.grid": io.format_grid(g) for i, g in enumerate(grids)})
        else:
            if args.d not in (2, 3):
                raise InputError("hull-inside point sets need --d 2 or --d 3")
            files["points.txt"] = io.format_points(fx.hull_inside_points(args.d, args.n, args.seed))
    elif kind == "triangle-rays":
        if args.continuous:
            grids = fx.triangle_rays_measures(size=args.size, width=args.width)
            files.update({f"measure_{i}.grid": io.format_grid(g) for i, g in enumerate(grids)})
        else:
            files["points.txt"] = io.format_points(fx.triangle_rays_points(args.n, args.seed))
    elif kind == "interval-ce":
        if args.alpha is None:
            raise InputError("interval-ce needs --alpha")
        eps = args.eps_len if args.eps_len is not None else (args.alpha - Fraction(1, args.n + 1)) / 2
        m0, m1 = build_interval_counterexample(args.n, args.alpha, eps)
        files.update({"measure_0.grid": io.format_grid(m0), "measure_1.grid": io.format_grid(m1)})
    else:
        if args.alpha is None:
            raise InputError("simplex-ce needs --alpha")
        grids = build_simplex_counterexample(args.n, args.alpha, width=args.width, size=args.size)
        files.update({f"measure_{i}.grid": io.format_grid(g) for i, g in enumerate(grids)})
    for name, text in sorted(files.items()):
        io.write_atomic(os.path.join(args.out_dir, name), text)
    sys.stdout.write("".join(f"{os.path.join(args.out_dir, n)}\n" for n in sorted(files)))
    return EXIT_OK


def cmd_render(args):
    from . import svg
    if args.points:
        s = _points(args.points, check=False)
        w = None
        if args.witness:
            w = io.parse_witness(io.read_text(args.witness), args.witness)
            if isinstance(w, NotFound):
                w = None
        text = svg.render_points(s, w)
    elif args.grids:
        grids = _grids(args.grids)
        H = io.parse_halfspace(io.read_text(args.halfspace), args.halfspace)[0] if args.halfspace else None
        part = io.parse_partition(io.read_text(args.partition), args.partition) if args.partition else None
        win = io.parse_window(io.read_text(args.window), args.window) if args.window else None
        text = svg.render_grids(grids, halfspace=H, partition=part, window=win)
    else:
        raise InputError("render needs --points or --grids")
    if not args.out:
        raise InputError("render needs --out")
    io.write_atomic(args.out, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="fraccut", description="Equal-fraction cuts, balanced hyperplanes and convex windows.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help="output file (written atomically); stdout if omitted")
        return sp

    sp = add("balanced-find", cmd_balanced_find, "balanced hyperplane of a colored point set")
    sp.add_argument("points")
    sp = add("condition-check", cmd_condition_check, "extreme-order permutations and the missing-order condition")
    sp.add_argument("points")
    sp.add_argument("--samples", type=int, default=20000)
    sp.add_argument("--seed", type=int)
    sp = add("hull-check", cmd_hull_check, "colors lying strictly inside the hull of the others")
    sp.add_argument("points")

    sp = add("hamcut", cmd_hamcut, "halfspace bisecting d charges in R^d")
    sp.add_argument("grids", nargs="+")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp = add("fraction-cut", cmd_fraction_cut, "halfspace cutting one common fraction of d+1 measures")
    sp.add_argument("grids", nargs="+")
    sp.add_argument("--s0", type=float, default=0.25)
    sp.add_argument("--gamma", type=float, default=0.5)
    sp.add_argument("--smin", type=float, default=1e-6)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.add_argument("--order", help="comma-separated relabeling: measure order[k] plays the role of mu_k")
    sp.add_argument("--seed", type=int, help="accepted for uniformity; the solver is deterministic")
    sp = add("not-permuted-probe", cmd_probe, "sampled search for small halfspaces with ascending fractions")
    sp.add_argument("grids", nargs="+")
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.add_argument("--budget", type=int, default=100000)
    sp.add_argument("--seed", type=int, help="accepted for uniformity; the scan grid is deterministic")
    sp = add("anchored-cut", cmd_anchored_cut, "equal-fraction halfplane with a given point on its boundary")
    sp.add_argument("grids", nargs="+")
    sp.add_argument("--point", required=True, help="x,y")
    sp.add_argument("--tol", type=float, default=1e-9)

    for name, func, help_ in (("window1d", cmd_window1d, "interval with fraction 1/m of two 1D measures"),
                              ("window1d-counterexample", cmd_window1d_ce,
                               "exact check that no interval carries alpha of both 1D measures")):
        sp = add(name, func, help_)
        sp.add_argument("grids", nargs=2)
        sp.add_argument("--alpha", type=_rational, required=True)
    for name, func, help_ in (("gv-partition", cmd_gv_partition, "generalized Voronoi equipartition, m in {2,3,5}"),
                              ("convex-window", cmd_convex_window, "convex region with 1/m of every measure")):
        sp = add(name, func, help_)
        sp.add_argument("grids", nargs="+")
        sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--tol", type=float, default=1e-3)
        sp.add_argument("--subsample", type=int, default=4)
        sp.add_argument("--seed", type=int)

    sp = sub.add_parser("gen-fixture", help="write a generated instance")
    sp.set_defaults(func=cmd_gen_fixture)
    sp.add_argument("kind", choices=FIXTURES)
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--alpha", type=_rational)
    sp.add_argument("--eps-len", type=_rational)
    sp.add_argument("--width", type=float, default=0.02)
    sp.add_argument("--size", type=int, default=48)
    sp.add_argument("--continuous", action="store_true", help="emit density grids instead of points")

    sp = sub.add_parser("render", help="SVG of a planar instance and result")
    sp.set_defaults(func=cmd_render)
    sp.add_argument("--points")
    sp.add_argument("--witness")
    sp.add_argument("--grids", nargs="+")
    sp.add_argument("--halfspace")
    sp.add_argument("--partition")
    sp.add_argument("--window")
    sp.add_argument("--out")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NoConvergence, DegenerateLimit) as e:
        print(f"fraccut: solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except NoRoot as e:
        print(f"fraccut: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (FraccutError, ValueError, OSError) as e:
        print(f"fraccut: input error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

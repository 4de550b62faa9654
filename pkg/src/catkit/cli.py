"""``catkit`` command line.

Exit status: 0 success, 2 input error, 3 cap reached or germ outside the
classification table, 4 numerical failure.  Data goes to stdout (or
``--output``); diagnostics go to stderr, with verbosity set by ``CATKIT_LOG``.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .classify import BEYOND, ClassificationError, classify_germ
from .io import InputError, load_germ_file, load_params_file, load_unfolding_file, parse_box
from .jets import Jet, format_jet, format_monomial
from .local_algebra import DEFAULT_CAP, UNDETERMINED, NotInvariantError, codimension, determinacy_order
from .unfolding import UndecidableError, Unfolding, is_transversal, universal_unfolding

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_NUMERIC = 0, 2, 3, 4

log = logging.getLogger("catkit")


class CapReached(Exception):
    def __init__(self, report):
        super().__init__("cap reached")
        self.report = report


def _num(x):
    """JSON value for a coefficient or modulus: ints stay ints, rationals become floats."""
    if x is None:
        return None
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    if isinstance(x, int):
        return x
    return float(x)


def _exact(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return None


# --- subcommands -------------------------------------------------------------

def cmd_codim(args):
    f, act, names = load_germ_file(args.germ, args.action, args.order)
    rep = codimension(f, act, cap=args.cap)
    sigma = determinacy_order(f, act, cap=args.cap)
    out = {
        "value": rep.value,
        "order_used": rep.order_used,
        "certified": rep.certified,
        "complement": [format_monomial(e, names) for e in rep.complement] if rep.finite else [],
        "sigma": sigma,
    }
    if not rep.finite:
        raise CapReached(out)
    return out


def cmd_determine(args):
    f, act, names = load_germ_file(args.germ, args.action, args.order)
    sigma = determinacy_order(f, act, cap=args.cap)
    out = {"sigma": sigma, "certified": sigma != UNDETERMINED, "cap": args.cap}
    if sigma == UNDETERMINED:
        raise CapReached(out)
    return out


def cmd_transversal(args):
    f, alphas, params, act, names = load_unfolding_file(args.unfolding, args.action)
    U = Unfolding(f, alphas, params)
    try:
        rep = is_transversal(U, act, cap=args.cap)
    except UndecidableError as exc:
        raise CapReached({"transversal": None, "order_used": args.cap, "missing": [], "minimal": False,
                          "codim": "infinite-suspected", "params": params, "error": str(exc)}) from None
    return {
        "transversal": rep.transversal,
        "order_used": rep.order_used,
        "missing": [format_monomial(e, names) for e in rep.missing],
        "minimal": rep.minimal,
        "codim": rep.codim,
        "params": params,
    }


def cmd_unfold(args):
    f, act, names = load_germ_file(args.germ, args.action, args.order)
    rep = codimension(f, act, cap=args.cap)
    if not rep.finite:
        raise CapReached({"germ": format_jet(f, names), "codim": rep.value, "params": [], "alphas": [],
                          "unfolding": None})
    U = universal_unfolding(f, act, codim=rep)
    return {
        "germ": format_jet(f, names),
        "codim": rep.value,
        "params": list(U.params),
        "alphas": [format_jet(a, names) for a in U.alphas],
        "unfolding": U.format(names),
    }


def _normal_form_string(res, names, kernel_names):
    if res.family == "morse":
        # nondegenerate: the quadratic part with its signature, over all variables
        names = names or [f"x{i + 1}" for i in range(len(res.quad_signature))]
        terms = [("-" if s < 0 else "+") + f" {v}^2" for v, s in zip(names, res.quad_signature)]
        text = " ".join(terms)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]
    if res.normal_form is None:
        return None
    return format_jet(res.normal_form, kernel_names)


def classification_json(res, names=None) -> dict:
    kn = None
    if names is not None and res.kernel:
        kn = [names[i] for i in res.kernel]
    out = {
        "corank": res.corank,
        "family": res.family,
        "sign": res.sign,
        "k": res.k,
        "modulus": _num(res.modulus),
        "modulus_exact": _exact(res.modulus),
        "modulus_name": res.modulus_name,
        "cod_z2": res.cod_z2,
        "sigma": res.sigma,
        "quad_signature": list(res.quad_signature),
        "kernel_vars": kn,
        "normal_form": _normal_form_string(res, names, kn),
        "unfolding": res.unfolding.format(kn, base_symbol="f") if res.unfolding is not None else None,
        "presentations": [{"family": fam, "modulus": _num(v), "modulus_exact": _exact(v)}
                          for fam, v in res.presentations],
        "diagnostic": res.diagnostic,
    }
    return out


def cmd_classify(args):
    f, act, names = load_germ_file(args.germ, args.action, args.order)
    try:
        res = classify_germ(f, act)
    except ClassificationError as exc:
        raise InputError(str(exc)) from None
    out = classification_json(res, names)
    if res.family == BEYOND:
        raise CapReached(out)
    return out


def _model_from_args(args):
    from .meanfield.models import make_model

    kind, params, box = load_params_file(args.params)
    if getattr(args, "box", None):
        box = parse_box(args.box)
    try:
        model = make_model(kind, params)
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None
    if box is not None and len(box) != model.dim:
        raise InputError(f"box has {len(box)} intervals, model has {model.dim} order parameters")
    return kind, model, box


def cmd_critical(args):
    from .meanfield.analysis import classify_critical_point
    from .meanfield.critical import find_critical_points, tune_degenerate, tune_strong_coupling
    from .meanfield.models import PairingModel, StrongCouplingModel

    kind, model, box = _model_from_args(args)
    tuned = None
    if args.tune:
        if kind == "pairing":
            p = model.params
            try:
                tp = tune_degenerate(beta=p.beta, h=p.h, mu=p.mu, lam=p.lam)
            except ValueError as exc:
                raise NumericFailure(str(exc)) from None
            model = PairingModel(tp.params)
        else:
            tp = tune_strong_coupling()
            model = StrongCouplingModel(tp.params)
        tuned = {"params": tp.params.to_json(), "point": list(tp.point)}
    pts = find_critical_points(model, box, seeds=args.seeds, threshold=args.threshold)
    if tuned is not None:
        from .meanfield.critical import annotate

        extra = annotate(model, tuned["point"], args.threshold)
        if not any(max(abs(a - b) for a, b in zip(extra.c, p.c)) < 1e-6 for p in pts):
            pts = [extra] + pts
    if not pts:
        raise NumericFailure("no critical point found in the box")
    out_pts = []
    for p in pts:
        entry = p.to_json()
        if p.degenerate:
            cc = classify_critical_point(model, p.c, threshold=args.threshold)
            cj = classification_json(cc.result, list(model.names))
            cj["symmetry_residual"] = cc.taylor.residual
            cj["symmetric"] = cc.taylor.symmetric
            cj["transversal"] = cc.transversal
            cj["unfolding_params"] = list(cc.unfolding_params)
            cj["taylor"] = format_jet(cc.taylor.partial, list(model.names))
            entry["classification"] = cj
        out_pts.append(entry)
    return {"model": kind, "params": model.params.to_json(), "tuned": tuned, "points": out_pts}


class NumericFailure(Exception):
    pass


def cmd_phase_diagram(args):
    from .meanfield.phase import SweepError, parse_sweep, phase_diagram, write_outputs

    kind, model, box = _model_from_args(args)
    try:
        sweep = parse_sweep(args.sweep)
        pd = phase_diagram(model, sweep, box=box, jobs=args.jobs, grid=args.grid)
    except SweepError as exc:
        raise InputError(str(exc)) from None
    if args.out is None:
        return pd.to_csv()
    out = Path(args.out)
    summary_path = Path(args.summary) if args.summary else out.with_suffix(".json")
    png_path = None if args.no_plot else (Path(args.plot) if args.plot else out.with_suffix(".png"))
    summary = write_outputs(pd, out, summary_path, png_path)
    summary["csv"] = str(out)
    summary["figure"] = str(png_path) if png_path else None
    return summary


# --- plumbing ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="catkit", description="Equivariant singularity invariants and mean-field phase diagrams.")
    p.add_argument("--version", action="version", version=f"catkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, germ=True):
        if germ:
            sp.add_argument("germ", help="germ JSON file")
            sp.add_argument("--order", type=int, help="override the file's truncation order")
        sp.add_argument("--action", help="full | overall | trivial | JSON action (overrides the file)")
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest jet order tried (default %(default)s)")
        sp.add_argument("-o", "--output", help="write the report here instead of stdout")

    sp = sub.add_parser("codim", help="equivariant codimension and complement basis")
    common(sp)
    sp.set_defaults(func=cmd_codim)
    sp = sub.add_parser("determine", help="determinacy order")
    common(sp)
    sp.set_defaults(func=cmd_determine)
    sp = sub.add_parser("transversal", help="transversality of an unfolding")
    sp.add_argument("unfolding", help="unfolding JSON file")
    common(sp, germ=False)
    sp.set_defaults(func=cmd_transversal)
    sp = sub.add_parser("unfold", help="universal unfolding")
    common(sp)
    sp.set_defaults(func=cmd_unfold)
    sp = sub.add_parser("classify", help="normal form, moduli and unfolding of an even germ")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("critical", help="critical points of a mean-field objective")
    sp.add_argument("params", help="params JSON file")
    sp.add_argument("--box", help="search box, e.g. -1:1,-0.5:2.5")
    sp.add_argument("--seeds", type=int, default=21, help="Newton seeds per axis (default %(default)s)")
    sp.add_argument("--threshold", type=float, default=1e-6, help="degeneracy threshold on |eigenvalue|")
    sp.add_argument("--tune", action="store_true", help="tune the couplings to the most degenerate point first")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_critical)

    sp = sub.add_parser("phase-diagram", help="sweep two couplings and label phases")
    sp.add_argument("params", help="params JSON file")
    sp.add_argument("--sweep", required=True, help='e.g. "lam=0:2:0.1,delt=-1:1:0.1" (stop inclusive)')
    sp.add_argument("--out", help="CSV path (stdout when omitted)")
    sp.add_argument("--summary", help="JSON summary path (default: next to --out)")
    sp.add_argument("--plot", help="PNG figure path (default: next to --out)")
    sp.add_argument("--no-plot", action="store_true")
    sp.add_argument("--box", help="order-parameter box, e.g. -1:1,-0.5:2.5")
    sp.add_argument("--grid", type=int, help="coarse minimisation grid points per axis")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes (results merged in row-major order)")
    sp.add_argument("-o", "--output", help="where to print the summary (with --out)")
    sp.set_defaults(func=cmd_phase_diagram)
    return p


def _emit(payload, path):
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    level = os.environ.get("CATKIT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="catkit: %(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    out_path = getattr(args, "output", None)
    try:
        payload = args.func(args)
    except CapReached as exc:
        _emit(exc.report, out_path)
        log.warning("cap reached or germ outside the table")
        return EXIT_CAP
    except (InputError, NotInvariantError) as exc:
        print(f"catkit: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericFailure, ArithmeticError, FloatingPointError) as exc:
        print(f"catkit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(payload, out_path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Reading and writing the JSON file formats."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .groups import GroupError, SignAction
from .jets import FLOAT, KINDS, RATIONAL, Jet, default_names, format_coeff, glex_key
from .local_algebra import NotInvariantError, check_invariant

DEFAULT_ACTION = "full"
DEFAULT_ORDER = 8


class InputError(ValueError):
    """Malformed or inconsistent input; reported with exit status 2."""


def read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object at top level")
    return data


def _coeff(raw, kind):
    if kind == RATIONAL:
        if isinstance(raw, bool) or not isinstance(raw, (str, int)):
            raise InputError(f"rational coefficient must be an integer or a 'p/q' string, got {raw!r}")
        try:
            return Fraction(str(raw).strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"cannot parse rational coefficient {raw!r}") from None
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise InputError(f"float coefficient must be a JSON number, got {raw!r}")
    return float(raw)


def parse_germ(data: dict, order_override: int | None = None):
    """Germ JSON -> ``(Jet, variable names)``."""
    if not isinstance(data, dict):
        raise InputError("germ must be a JSON object")
    names = data.get("vars")
    if not isinstance(names, list) or not names or not all(isinstance(v, str) and v for v in names):
        raise InputError("germ needs a non-empty 'vars' list of names")
    if len(set(names)) != len(names):
        raise InputError("variable names must be distinct")
    kind = data.get("coeff_kind", RATIONAL)
    if kind not in KINDS:
        raise InputError(f"coeff_kind must be one of {KINDS}")
    order = data.get("order", DEFAULT_ORDER)
    if order_override is not None:
        order = order_override
    if not isinstance(order, int) or isinstance(order, bool) or order < 0:
        raise InputError("order must be a nonnegative integer")
    terms_raw = data.get("terms")
    if not isinstance(terms_raw, list):
        raise InputError("germ needs a 'terms' list")
    n = len(names)
    terms = {}
    for t in terms_raw:
        if not isinstance(t, dict) or "exp" not in t or "coeff" not in t:
            raise InputError("each term needs 'exp' and 'coeff'")
        exp = t["exp"]
        if (not isinstance(exp, list) or len(exp) != n
                or not all(isinstance(p, int) and not isinstance(p, bool) and p >= 0 for p in exp)):
            raise InputError(f"exponent {exp!r} must list {n} nonnegative integers")
        e = tuple(exp)
        if sum(e) > order:
            raise InputError(f"term of degree {sum(e)} exceeds the declared order {order}")
        terms[e] = terms.get(e, 0) + _coeff(t["coeff"], kind)
    return Jet(n, order, terms, kind), list(names)


def parse_action(spec, n: int) -> SignAction:
    try:
        return SignAction.from_spec(spec, n)
    except (GroupError, json.JSONDecodeError, TypeError) as exc:
        raise InputError(f"bad action: {exc}") from None


def resolve_action(cli_spec, file_spec, n: int) -> SignAction:
    """Precedence: command line, then the file, then the default (``full``)."""
    spec = cli_spec if cli_spec is not None else (file_spec if file_spec is not None else DEFAULT_ACTION)
    return parse_action(spec, n)


def checked_invariant(f: Jet, action: SignAction, names):
    try:
        check_invariant(f, action)
    except NotInvariantError as exc:
        msg = str(exc)
        # re-render the offending monomial with the file's variable names
        from .groups import invariance_residual
        from .jets import format_monomial

        res = invariance_residual(f, action)
        if not res.is_zero():
            bad = sorted(res.terms, key=glex_key)[0]
            msg = f"germ is not invariant under the action: offending monomial {format_monomial(bad, names)}"
        raise InputError(msg) from None


def load_germ_file(path, action: str | None = None, order: int | None = None):
    data = read_json(path)
    f, names = parse_germ(data, order)
    act = resolve_action(action, data.get("action"), f.n)
    checked_invariant(f, act, names)
    return f, act, names


def load_unfolding_file(path, action: str | None = None):
    data = read_json(path)
    if "germ" not in data:
        raise InputError("unfolding needs a 'germ'")
    f, names = parse_germ(data["germ"])
    act = resolve_action(action, data.get("action", data["germ"].get("action")), f.n)
    checked_invariant(f, act, names)
    alphas = []
    for k, a in enumerate(data.get("alphas", [])):
        if isinstance(a, dict) and "vars" not in a:
            a = {**a, "vars": names}
        j, anames = parse_germ(a)
        if anames != names:
            raise InputError(f"alpha {k + 1} uses variables {anames}, germ uses {names}")
        try:
            check_invariant(j, act)
        except NotInvariantError as exc:
            raise InputError(f"alpha {k + 1}: {exc}") from None
        alphas.append(j)
    params = data.get("params") or [f"u{i + 1}" for i in range(len(alphas))]
    if len(params) != len(alphas):
        raise InputError(f"{len(params)} parameter names for {len(alphas)} alphas")
    return f, alphas, list(params), act, names


def germ_to_json(f: Jet, names=None) -> dict:
    names = names or default_names(f.n)
    terms = []
    for e, c in f:
        coeff = format_coeff(c) if f.kind == RATIONAL else float(c)
        terms.append({"exp": list(e), "coeff": coeff})
    return {"vars": list(names), "order": f.order, "coeff_kind": f.kind, "terms": terms}


MODEL_KEYS = {
    "pairing": ("beta", "h", "mu", "lam", "gam", "delt", "beta_on_shift"),
    "strong_coupling": ("u1", "u2"),
}


def load_params_file(path):
    """Params JSON -> ``(model kind, params dict, box or None)``."""
    data = read_json(path)
    kind = str(data.get("model", "pairing")).replace("-", "_")
    if kind not in MODEL_KEYS:
        raise InputError(f"unknown model {kind!r}; expected one of {sorted(MODEL_KEYS)}")
    params = {}
    for k, v in data.items():
        if k in ("model", "box"):
            continue
        if k not in MODEL_KEYS[kind]:
            raise InputError(f"unknown parameter {k!r} for model {kind}")
        if k == "beta_on_shift":
            if not isinstance(v, bool):
                raise InputError("beta_on_shift must be true or false")
        elif isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InputError(f"parameter {k} must be a number")
        params[k] = v
    box = data.get("box")
    if box is not None:
        box = parse_box(box)
    return kind, params, box


def parse_box(spec):
    """``"lo:hi,lo:hi"`` or ``[[lo, hi], ...]`` -> list of float pairs."""
    try:
        if isinstance(spec, str):
            box = [tuple(float(x) for x in part.split(":")) for part in spec.split(",")]
        else:
            box = [tuple(float(x) for x in pair) for pair in spec]
    except (TypeError, ValueError):
        raise InputError(f"cannot parse box {spec!r}") from None
    if not box or any(len(b) != 2 or not b[0] < b[1] for b in box):
        raise InputError(f"box {spec!r} must be intervals lo:hi with lo < hi")
    return box

"""
Batch command line: ``gradecalc <task> --config <path|-> [--out PATH]
[--weight-cap W] [--trunc D]``.

The config is INI text.  ``[ring]`` holds n_even, n_odd, even_weight,
odd_weight, trunc and laurent; ``[task]`` holds the payload keys of the
chosen task.  Results are JSON with sorted keys; every rational is written
as a "p/q" string.  Exit status: 0 ok, 1 invalid input, 2 integrity
failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from fractions import Fraction

from . import cech, cohomology, diffops, jets, lie, noncommutative as nc
from .core import Element, RingSpec
from .errors import GradecalcError, IntegrityError, ValidationError
from .forms import exterior_d, wedge
from .parser import parse, parse_derivation, parse_form, parse_operator

TASKS = ("eval", "d", "wedge", "cohomology", "lie", "cech", "op-order",
         "jets", "curvature", "universal", "filtration")


def q(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _int(section, key, default=None):
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise ValidationError(f"missing key {key!r}")
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{key} must be an integer, got {raw!r}") from None


def _bool(section, key, default=False):
    raw = section.get(key)
    if raw is None:
        return default
    if raw.strip().lower() in ("1", "true", "yes", "on"):
        return True
    if raw.strip().lower() in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"{key} must be a boolean, got {raw!r}")


def _str(section, key, default=None):
    raw = section.get(key, default)
    if raw is None:
        raise ValidationError(f"missing key {key!r}")
    raw = raw.strip()
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        raw = raw[1:-1]
    return raw


def _json(section, key, default=None):
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise ValidationError(f"missing key {key!r}")
        return default
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{key}: invalid JSON ({exc.msg}, column {exc.colno})") from None


def _weights(raw):
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if len(parts) == 1:
        return int(parts[0])
    return tuple(int(p) for p in parts)


def read_ring(cfg, trunc=None) -> RingSpec:
    if not cfg.has_section("ring"):
        raise ValidationError("config needs a [ring] section")
    s = cfg["ring"]
    try:
        return RingSpec(
            n_even=_int(s, "n_even", 0),
            n_odd=_int(s, "n_odd", 0),
            even_weight=_weights(s.get("even_weight", "2")),
            odd_weight=_weights(s.get("odd_weight", "1")),
            trunc=trunc if trunc is not None else _int(s, "trunc", 8),
            laurent=_bool(s, "laurent"),
        )
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad ring data: {exc}") from None


# -- value rendering ------------------------------------------------------------


def render(value) -> dict:
    if isinstance(value, Element):
        terms = {m.fmt() or "1": q(c) for m, c in value.terms.items()}
        return {"kind": "element", "value": str(value), "terms": terms, "truncated": value.truncated}
    terms = {}
    for (m, f), c in value.terms.items():
        key = "*".join(t for t in (m.fmt(), f.fmt()) if t) or "1"
        terms[key] = q(c)
    return {"kind": "form", "value": str(value), "terms": terms, "truncated": value.truncated}


# -- tasks -----------------------------------------------------------------------


def task_eval(cfg, args):
    ring = read_ring(cfg, args.trunc)
    return render(parse(ring, _str(cfg["task"], "expr")))


def task_d(cfg, args):
    ring = read_ring(cfg, args.trunc)
    return render(exterior_d(parse_form(ring, _str(cfg["task"], "expr"))))


def task_wedge(cfg, args):
    ring = read_ring(cfg, args.trunc)
    t = cfg["task"]
    out = wedge(parse_form(ring, _str(t, "left")), parse_form(ring, _str(t, "right")))
    return render(out)


def task_cohomology(cfg, args):
    ring = read_ring(cfg, args.trunc)
    t = cfg["task"]
    cap = args.weight_cap if args.weight_cap is not None else _int(t, "weight_cap", 6)
    if ring.laurent:
        raw = _json(t, "candidate", {"-1": 1})
        cand = {int(k): Fraction(str(v)) for k, v in raw.items()}
        window = _int(t, "window", cap)
        closed, exact = cohomology.laurent_h1_witness(window, cand)
        return {"laurent_witness": {"closed": closed, "exact": exact, "window": window,
                                    "candidate": {str(k): q(v) for k, v in sorted(cand.items())}}}
    total, per = cohomology.de_rham_betti(ring, cap)
    return {"betti": total.to_json(), "per_weight": {str(w): b.to_json() for w, b in per.items()},
            "weight_cap": cap}


def _lie_algebra(t) -> lie.LieAlgebra:
    name = _str(t, "structure", "custom").lower()
    if name == "sl2":
        return lie.LieAlgebra.sl2()
    if name == "heisenberg":
        return lie.LieAlgebra.heisenberg()
    if name.startswith("abelian"):
        return lie.LieAlgebra.abelian(_int(t, "dim"))
    if name != "custom":
        raise ValidationError(f"unknown structure {name!r}")
    dim = _int(t, "dim")
    brackets = {}
    for key, vec in _json(t, "brackets", {}).items():
        try:
            i, j = (int(x) - 1 for x in key.split(","))
        except ValueError:
            raise ValidationError(f"bracket key {key!r} must look like \"1,2\"") from None
        if not (0 <= i < dim and 0 <= j < dim):
            raise ValidationError(f"bracket key {key!r} out of range")
        brackets[(i, j)] = [Fraction(str(x)) for x in vec]
    return lie.LieAlgebra(dim, brackets)


def task_lie(cfg, args):
    t = cfg["task"]
    g = _lie_algebra(t)
    mod = _str(t, "module", "trivial").lower()
    if mod == "trivial":
        M = lie.LieModule.trivial(g)
    elif mod == "adjoint":
        M = lie.LieModule.adjoint(g)
    else:
        mats = _json(t, "module")
        dim = len(mats[0]) if mats else 0
        M = lie.LieModule(g, dim, [[[Fraction(str(x)) for x in r] for r in m] for m in mats])
    return {"betti": lie.lie_betti(g, M).to_json(), "dim": g.dim, "module_dim": M.dim}


def _tuple_key(key: str) -> tuple:
    try:
        return tuple(int(x) - 1 for x in key.split(","))
    except ValueError:
        raise ValidationError(f"bad index tuple {key!r}") from None


def task_cech(cfg, args):
    t = cfg["task"]
    n = _int(t, "n_opens")
    dims = {_tuple_key(k): int(v) for k, v in _json(t, "dims").items()}
    res = {}
    for key, mat in _json(t, "restrictions", {}).items():
        if "->" not in key:
            raise ValidationError(f"restriction key {key!r} must look like \"1->1,2\"")
        a, b = key.split("->")
        res[(_tuple_key(a), _tuple_key(b))] = [[Fraction(str(x)) for x in r] for r in mat]
    p_max = t.get("p_max")
    cp = cech.CoverPresheaf(n, dims, res, int(p_max) if p_max is not None else None)
    return {"betti": cech.cech_betti(cp).to_json()}


def task_op_order(cfg, args):
    ring = read_ring(cfg, args.trunc)
    t = cfg["task"]
    rank = _int(t, "rank", 1)
    op = parse_operator(ring, _str(t, "operator"), rank)
    s_max = _int(t, "s_max", 4)
    graded = _bool(t, "graded", True)
    order = diffops.order_of(op, s_max, graded=graded)
    out = {"order": order, "s_max": s_max, "parity": op.infer_parity()}
    if order is not None and order <= 1 and rank == 1:
        zero, u = diffops.first_order_split(op)
        out["split"] = {"zero_order": str(zero), "derivation": str(u)}
    return out


def task_jets(cfg, args):
    ring = read_ring(cfg, args.trunc)
    t = cfg["task"]
    cap = args.weight_cap if args.weight_cap is not None else _int(t, "weight_cap", 4)
    fact = None
    if t.get("operator"):
        fact = jets.factor_through_jet(parse_operator(ring, _str(t, "operator")))
    blocks = {}
    for w in range(cap + 1):
        J = jets.build_jet1(ring, w)
        row = {"dim": J.dim, "splitting": J.splitting_dim(),
               "isomorphism": jets.identification_is_isomorphism(J)}
        if fact is not None:
            row["factorises"] = fact.check_block(w) if J.ring == ring else None
        blocks[str(w)] = row
    return {"blocks": blocks, "weight_cap": cap}


def task_curvature(cfg, args):
    ring = read_ring(cfg, args.trunc)
    t = cfg["task"]
    rank = _int(t, "rank", 1)
    names = [f"x{i + 1}" for i in range(ring.n_even)] + [f"c{a + 1}" for a in range(ring.n_odd)]
    omegas = []
    for name in names:
        raw = _json(t, f"omega_{name}", [["0"] * rank for _ in range(rank)])
        if len(raw) != rank or any(len(r) != rank for r in raw):
            raise ValidationError(f"omega_{name} must be a {rank}x{rank} matrix")
        omegas.append([[parse(ring, str(e)) for e in r] for r in raw])
    conn = jets.Connection(ring, rank, omegas)
    u = parse_derivation(ring, _str(t, "u"))
    v = parse_derivation(ring, _str(t, "v"))
    R = jets.curvature(conn, u, v)
    order = diffops.order_of(R, 2)
    out = {"order": order}
    if order == 0:
        one = ring.one()
        cols = []
        for k in range(rank):
            e = tuple(one if j == k else ring.zero() for j in range(rank))
            cols.append(R.apply(e[0] if rank == 1 else e))
        if rank == 1:
            out["matrix"] = [[str(cols[0])]]
        else:
            out["matrix"] = [[str(cols[j][i]) for j in range(rank)] for i in range(rank)]
    return out


def _algebra(t) -> nc.FDAlgebra:
    name = _str(t, "algebra").lower()
    if name in ("q", "scalars"):
        return nc.FDAlgebra.scalars()
    if name in ("dual", "dual_numbers"):
        return nc.FDAlgebra.dual_numbers()
    if name.startswith("matrix"):
        return nc.FDAlgebra.matrix_algebra(int(name[6:] or 2))
    if name.startswith("grassmann"):
        return nc.FDAlgebra.grassmann(int(name[9:]))
    if name == "custom":
        table = _json(t, "table")
        unit = _json(t, "unit")
        conv = [[[Fraction(str(x)) for x in v] for v in row] for row in table]
        return nc.FDAlgebra(len(unit), conv, [Fraction(str(x)) for x in unit])
    raise ValidationError(f"unknown algebra {name!r}")


def task_universal(cfg, args):
    A = _algebra(cfg["task"])
    return {"algebra": A.name or "custom", "dim": A.dim,
            "omega1_dim": len(nc.universal_omega1(A)),
            "kernel_dim": nc.multiplication_kernel_dim(A),
            "relation_holds": nc.check_w265(A)}


def task_filtration(cfg, args):
    t = cfg["task"]
    A = _algebra(t)
    R = nc.Bimod.regular(A)
    side = _str(t, "side", "left").lower()
    r_max = _int(t, "r_max", 2)
    if side == "left":
        F = nc.left_order_filtration(A, R, R, r_max)
    elif side == "right":
        F = nc.right_order_filtration(A, R, R, r_max, mirror=_bool(t, "mirror"))
    elif side in ("two-sided", "two_sided"):
        F = nc.two_sided_filtration(A, R, R, min(r_max, 2))
    else:
        raise ValidationError(f"unknown side {side!r}")
    out = {"side": side, "dims": {str(r): d for r, d in enumerate(F.dims())}, "hom_dim": A.dim ** 2}
    if t.get("operator"):
        op = [[Fraction(str(x)) for x in r] for r in _json(t, "operator")]
        if len(op) != A.dim or any(len(r) != A.dim for r in op):
            raise ValidationError(f"operator must be a {A.dim}x{A.dim} matrix")
        out["order"] = F.order(op)
        out["two_sided_first_order"] = nc.two_sided_first_order(op, A, R, R)
    return out


HANDLERS = {
    "eval": task_eval, "d": task_d, "wedge": task_wedge, "cohomology": task_cohomology,
    "lie": task_lie, "cech": task_cech, "op-order": task_op_order, "jets": task_jets,
    "curvature": task_curvature, "universal": task_universal, "filtration": task_filtration,
}


def load_config(text: str) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser(interpolation=None)
    try:
        cfg.read_string(text)
    except configparser.Error as exc:
        raise ValidationError(f"bad config: {exc}") from None
    if not cfg.has_section("task"):
        cfg.add_section("task")
    return cfg


def run(task: str, text: str, weight_cap=None, trunc=None) -> dict:
    if task not in HANDLERS:
        raise ValidationError(f"unknown task {task!r}")
    cfg = load_config(text)
    named = cfg["task"].get("name")
    if named is not None and named.strip() != task:
        raise ValidationError(f"config is for task {named.strip()!r}, not {task!r}")
    args = argparse.Namespace(weight_cap=weight_cap, trunc=trunc)
    result = HANDLERS[task](cfg, args)
    return {"task": task, "result": result}


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="gradecalc", description="Exact graded-commutative algebra and cohomology.")
    ap.add_argument("task", choices=TASKS)
    ap.add_argument("--config", required=True, help="INI config path, or - for stdin")
    ap.add_argument("--out", help="write JSON here instead of stdout")
    ap.add_argument("--weight-cap", type=int, dest="weight_cap")
    ap.add_argument("--trunc", type=int)
    ns = ap.parse_args(argv)
    try:
        if ns.config == "-":
            text = sys.stdin.read()
        else:
            with open(ns.config, encoding="utf-8") as fh:
                text = fh.read()
        report = run(ns.task, text, ns.weight_cap, ns.trunc)
    except IntegrityError as exc:
        print(f"gradecalc: integrity error: {exc}", file=sys.stderr)
        return 2
    except (GradecalcError, OSError, ValueError) as exc:
        print(f"gradecalc: {exc}", file=sys.stderr)
        return 1
    out = dumps(report)
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())

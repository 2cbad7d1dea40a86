"""Command line interface: read a session file, run one operation, emit JSON.

Exit codes: 0 success, 2 flattening unresolved, 3 input not flat on the
good open, 4 parse or validation error, 5 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
import warnings

from . import __version__
from .cakernel import Ideal
from .errors import InputError, PhiflatError, Unresolved
from .philocal import INF

MATRIX_NOTE = "Module presentations: rows are generators, columns are relations"


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------

def jvalue(v):
    return "inf" if v is INF else list(v)


def jideal(I):
    return [str(g) for g in I.gens]


def jvec(v):
    return [str(p) for p in v]


def jmodule(M):
    return {
        "ring": str(M.ring),
        "generators": M.ngens,
        "relations": [jvec(c) for c in M.relations],
    }


def emit_report(report, path="-"):
    text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _supports(sess, args):
    return sess.select("supports", args.supports).value


def _module(sess, args):
    return sess.select("module", args.module).value


def _ideal(sess, args):
    return sess.select("ideal", args.ideal).value


def _valuation(sess, args):
    return sess.select("valuation", args.valuation)


def cmd_groebner(sess, args):
    if args.module is not None:
        M = _module(sess, args)
        gb = M.submodule.groebner()
        return {"basis": [jvec(c) for c in gb.columns], "ring": str(M.ring)}
    I = _ideal(sess, args)
    gb = I.groebner()
    return {"basis": jideal(gb), "ring": str(I.ring)}


def cmd_admissible(sess, args):
    from .phiring import is_admissible

    A, I = _supports(sess, args), _ideal(sess, args)
    r = is_admissible(A, I)
    return {
        "admissible": r.admissible,
        "exponent": r.exponent,
        "witness": str(r.witness) if r.witness is not None else None,
    }


def cmd_purify(sess, args):
    from .depth import torsion_H0

    A, M = _supports(sess, args), _module(sess, args)
    t = torsion_H0(M, A)
    return {
        "torsion": [jvec(c) for c in t.generators()],
        "exponent": t.exponent,
        "purified": jmodule(t.purified),
    }


def cmd_close(sess, args):
    from .depth import closure

    A, M = _supports(sess, args), _module(sess, args)
    res = closure(M, A, max_steps=args.max_steps)
    return {
        "closure": jmodule(res.module),
        "structure": [jvec(v) for v in res.structure],
        "exponent": res.exponent,
        "regular": str(res.regular) if res.regular is not None else None,
    }


def cmd_deep(sess, args):
    from .depth import is_deep

    A, M = _supports(sess, args), _module(sess, args)
    v = is_deep(M, args.depth, A)
    return {
        "deep": v.deep,
        "depth": args.depth,
        "failure": v.failure,
        "ideal": jideal(v.ideal) if v.ideal is not None else None,
        "witness": jvec(v.witness) if v.witness is not None else None,
    }


def cmd_cech(sess, args):
    from .depth import cech_h

    M, I = _module(sess, args), _ideal(sess, args)
    r = cech_h(M, I, args.degree)
    return {
        "degree": r.degree,
        "is_zero": r.is_zero,
        "witness": jvec(r.witness) if r.witness is not None else None,
        "description": r.description or None,
    }


def _model(sess, args):
    from .philocal import PhiLocalModel

    vb = _valuation(sess, args)
    return PhiLocalModel(sess.ring_of(vb), vb.value, args.split)


def cmd_philocal(sess, args):
    from . import philocal as pl

    if args.action == "check":
        model = _model(sess, args)
        rep = pl.structure_check(model, _ideal(sess, args).gens)
        return {"ok": rep.ok, "checked": rep.checked, "violations": rep.violations}
    if args.action == "push":
        A = _supports(sess, args)
        S = _valuation(sess, args).value
        res = pl.push_valuation(A, S)
        return {
            "prime": jideal(res.prime),
            "split": res.split,
            "w0": jvalue(res.w0),
            "residue": res.residue.canonical(),
            "avoids_admissible": pl.push_avoids_admissible(A, S, res),
        }
    model = _model(sess, args)
    M = _module(sess, args)
    s_gen = list(_ideal(sess, args).gens) if args.ideal or sess.last("ideal") else []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        v = pl.flat_over_philocal(model, M, s_gen)
    return {
        "flat": v.flat,
        "reason": v.reason,
        "witness": v.witness,
        "torsion_complete": v.torsion_complete,
        "warnings": sorted({str(w.message) for w in caught}),
    }


def cmd_valuation(sess, args):
    from .valuative import ValuativePoint, point_is_admissible, select_chart, trace_through_blowups

    vb = _valuation(sess, args)
    pt = ValuativePoint(sess.ring_of(vb), vb.value)
    if args.action == "eval":
        out = {}
        if args.poly:
            out["values"] = {s: jvalue(pt.value(pt.ring.parse(s))) for s in args.poly}
        else:
            out["values"] = {str(g): jvalue(pt.value(g)) for g in _ideal(sess, args).gens}
        sb = sess.last("supports") if args.supports is None else sess.select("supports", args.supports)
        if sb is not None and sb.ring == vb.ring:
            out["admissible"] = point_is_admissible(pt, sb.value)
            out["support_value"] = jvalue(pt.ideal_value(sb.value.product))
        return out
    if args.action == "chart":
        I = _ideal(sess, args)
        i = select_chart(pt, I)
        return {"index": i, "generator": str(I.gens[i]), "value": jvalue(pt.value(I.gens[i]))}
    centers = [[s.strip() for s in c.split(",")] for c in args.center] or [_ideal(sess, args)]
    steps = trace_through_blowups(pt, centers)
    return {
        "trace": [
            {
                "chart_index": s.chart_index,
                "ring": str(s.ring),
                "weights": {n: jvalue(v) for n, v in s.weights.items()},
                "center_value": jvalue(s.center_value),
            }
            for s in steps
        ]
    }


def cmd_blowup(sess, args):
    from .blowup import rees_chart, strict_transform_module

    if args.module is not None or args.action == "strict":
        M = _module(sess, args)
        ring = M.ring
    else:
        M, ring = None, None
    I = _ideal(sess, args)
    chart = rees_chart(I.ring, I, args.index)
    out = chart.canonical()
    out["chart_vars"] = {n: j for n, j in sorted(chart.chart_vars.items())}
    if args.action == "strict":
        if ring != I.ring:
            raise InputError("module and center live over different rings")
        st = strict_transform_module(M, chart)
        out["strict_transform"] = jmodule(st)
        out["pruned"] = jmodule(st.pruned())
    return out


def _problem(sess, args, max_rounds):
    from .flatten import FlatteningProblem

    return FlatteningProblem(_supports(sess, args), _module(sess, args), max_rounds)


def cmd_flatten(sess, args):
    from .flatten import flatten

    prob = _problem(sess, args, args.max_rounds)
    cert = flatten(prob)
    return {"certificate": cert.to_dict()}


def cmd_verify(report, args):
    from .dsl import parse_session
    from .flatten import verify_certificate

    inner = report.get("report", report)
    cert = inner["result"]["certificate"]
    opts = inner.get("options", {})
    sess = parse_session(inner["session"], order=opts.get("order", "grevlex"),
                         degenerate_ok=opts.get("degenerate_ok", False))
    b = inner.get("bindings", {})
    ns = argparse.Namespace(supports=b.get("supports"), module=b.get("module"))
    prob = _problem(sess, ns, cert["max_rounds"])
    res = verify_certificate(cert, prob)
    return {"valid": res.valid, "divergence": res.divergence}


COMMANDS = {
    "groebner": cmd_groebner,
    "admissible": cmd_admissible,
    "purify": cmd_purify,
    "close": cmd_close,
    "deep": cmd_deep,
    "cech": cmd_cech,
    "philocal": cmd_philocal,
    "valuation": cmd_valuation,
    "blowup": cmd_blowup,
    "flatten": cmd_flatten,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="phiflat",
        description="Exact commutative algebra with constructible supports. " + MATRIX_NOTE + ".",
    )
    p.add_argument("--version", action="version", version=f"phiflat {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *selectors):
        sp.add_argument("--input", required=True, help="session file ('-' for stdin)")
        sp.add_argument("--out", default="-", help="report path ('-' for stdout)")
        sp.add_argument("--order", default="grevlex", choices=["grevlex", "lex"])
        sp.add_argument("--degenerate-ok", action="store_true", help="allow a zero support product")
        sp.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
        for s in selectors:
            sp.add_argument(f"--{s}", default=None, help=f"{s} binding (default: the last one)")
        return sp

    common(sub.add_parser("groebner", help="reduced Groebner basis"), "ideal", "module")
    common(sub.add_parser("admissible", help="admissibility of an ideal"), "supports", "ideal")
    common(sub.add_parser("purify", help="torsion and purification"), "supports", "module")
    c = common(sub.add_parser("close", help="closure (ideal transform)"), "supports", "module")
    c.add_argument("--max-steps", type=int, default=32)
    d = common(sub.add_parser("deep", help="1-deep / 2-deep test"), "supports", "module")
    d.add_argument("--depth", type=int, default=2, choices=[1, 2])
    e = common(sub.add_parser("cech", help="vanishing of H^0 or H^1 along an ideal"), "module", "ideal")
    e.add_argument("--degree", type=int, default=1, choices=[0, 1])

    pl = common(sub.add_parser("philocal", help="Phi-local model operations"),
                "supports", "module", "ideal", "valuation")
    pl.add_argument("action", choices=["check", "push", "flat"])
    pl.add_argument("--split", type=int, default=1, help="split index j of the model")

    va = common(sub.add_parser("valuation", help="valuative points"), "supports", "ideal", "valuation")
    va.add_argument("action", choices=["eval", "chart", "trace"])
    va.add_argument("--poly", action="append", default=[], help="polynomial to evaluate (repeatable)")
    va.add_argument("--center", action="append", default=[],
                    help="comma-separated center generators, one per blow-up (repeatable)")

    bu = common(sub.add_parser("blowup", help="blow-up charts and strict transforms"), "ideal", "module")
    bu.add_argument("action", choices=["chart", "strict"])
    bu.add_argument("--index", type=int, default=0, help="chart index (0-based generator position)")

    fl = common(sub.add_parser("flatten", help="flatten a module by admissible blow-ups"), "supports", "module")
    fl.add_argument("--max-rounds", type=int, default=5)

    ve = sub.add_parser("verify", help="replay a flattening certificate report")
    ve.add_argument("--input", required=True, help="report written by 'flatten'")
    ve.add_argument("--out", default="-")
    ve.add_argument("--timing", action="store_true")
    return p


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _bindings_used(args):
    return {k: getattr(args, k) for k in ("supports", "module", "ideal", "valuation") if getattr(args, k, None)}


def run(argv):
    """Run one command; returns (report dict, exit code)."""
    from .dsl import parse_session

    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    report = {"command": args.command, "version": __version__}
    if getattr(args, "action", None):
        report["action"] = args.action
    code = 0
    try:
        if args.command == "verify":
            try:
                src = json.loads(_read(args.input))
            except json.JSONDecodeError as e:
                raise InputError(f"certificate report is not valid JSON: {e}") from e
            report["result"] = cmd_verify(src, args)
            if not report["result"]["valid"]:
                code = 4
        else:
            sess = parse_session(_read(args.input), order=args.order, degenerate_ok=args.degenerate_ok)
            report["session"] = sess.to_text()
            report["options"] = {"order": args.order, "degenerate_ok": args.degenerate_ok}
            used = _bindings_used(args)
            if args.command == "flatten":
                used.setdefault("supports", sess.select("supports").name)
                used.setdefault("module", sess.select("module").name)
            report["bindings"] = used
            report["result"] = COMMANDS[args.command](sess, args)
        report["status"] = "ok"
    except Unresolved as e:
        report["status"] = "unresolved"
        report["error"] = {"code": e.code, "message": str(e)}
        cert = getattr(e, "certificate", None)
        if cert is not None:
            report["result"] = {"certificate": cert.to_dict()}
        code = e.exit_code
    except PhiflatError as e:
        report["status"] = "error"
        report["error"] = {"code": e.code, "message": str(e)}
        for attr in ("center", "witness"):
            val = getattr(e, attr, None)
            if val is not None:
                report["error"][attr] = jideal(val) if isinstance(val, Ideal) else str(val)
        code = e.exit_code
    except (KeyError, TypeError, ValueError) as e:
        report["status"] = "error"
        report["error"] = {"code": "input", "message": str(e)}
        code = 4
    except Exception as e:  # pragma: no cover - reported, not hidden
        report["status"] = "error"
        report["error"] = {"code": "internal", "message": f"{type(e).__name__}: {e}"}
        code = 5
    if getattr(args, "timing", False):
        report["seconds"] = round(time.perf_counter() - t0, 6)
    return report, code, args


def main(argv=None):
    report, code, args = run(sys.argv[1:] if argv is None else argv)
    emit_report(report, args.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

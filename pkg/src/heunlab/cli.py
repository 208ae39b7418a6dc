"""Command-line entry point: ``heunlab <subcommand> ...``."""

import argparse
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import josephson, monodromy, painleve, polysol, spectral
from .spectral import SurfaceSpec


def parse_complex(text):
    """Accept '1.5', '-3/4', '0.3+0.2i', '-1-2i', '2i' (also with 'j')."""
    t = text.strip().replace(" ", "").replace("i", "j")
    if "/" in t and "j" not in t:
        return complex(float(Fraction(t)))
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_float(text):
    try:
        return float(Fraction(text.strip())) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def parse_range(text):
    try:
        return josephson.parse_range(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must be lo:hi:step, got {text!r}") from None


def fmt_float(x):
    x = float(x)
    return repr(0.0 if x == 0 else x)


def fmt_complex(z):
    z = complex(z)
    im = 0.0 if z.imag == 0 else z.imag
    sign = "-" if np.signbit(im) else "+"
    return f"{fmt_float(z.real)}{sign}{fmt_float(abs(im))}i"


def _emit(text, out):
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj):
    return json.dumps(obj, indent=None, separators=(",", ":")) + "\n"


def _workers(args):
    w = getattr(args, "workers", None)
    return w if w else josephson.default_workers()


# subcommands

def cmd_surface(args):
    P = spectral.build_P(args.ell, args.sign)
    _emit(_dump(P.to_json()), args.out)
    return 0


def cmd_spectral(args):
    Q = spectral.to_uv(spectral.build_Q(args.ell))
    _emit(_dump(Q.to_json()), args.out)
    return 0


def cmd_multiplier(args):
    h = painleve.multiplier(SurfaceSpec(args.ell, args.sign))
    _emit(_dump(h.to_json()), args.out)
    return 0


def cmd_polysolve(args):
    spec = SurfaceSpec(args.ell, args.sign)
    pts = polysol.sample_surface(spec, args.chi, args.s)
    pts.sort(key=lambda p: (round(p.a.real, 9), round(p.a.imag, 9)))
    if not pts:
        print("error: no surface point on this slice", file=sys.stderr)
        return 1
    if not 0 <= args.index < len(pts):
        print(f"error: --index must be in [0, {len(pts) - 1}]", file=sys.stderr)
        return 2
    pt = pts[args.index]
    sol = polysol.solve_polynomial_solution(spec, pt)
    res = polysol.verify_solution(spec, pt, sol)
    out = {
        "ell": spec.ell, "sign": spec.sign,
        "chi": fmt_complex(pt.chi), "a": fmt_complex(pt.a), "s": fmt_complex(pt.s),
        "n_points": len(pts), "index": args.index,
        "coeffs": [fmt_complex(c) for c in sol.y2],
        "y1": [fmt_complex(c) for c in sol.y1],
        "membership": fmt_float(pt.membership()),
        "pivot_ratio": fmt_float(sol.pivot_ratio),
        "residual": fmt_float(res),
    }
    sys.stdout.write(_dump(out))
    return 0 if res < 1e-9 else 1


def cmd_flow(args):
    spec = SurfaceSpec(args.ell, args.sign)
    start = painleve.FlowState(args.chi0, args.a0, args.s0, args.ell)
    m0 = polysol.membership_residual(spec, start.chi, start.a, start.s)
    if m0 > polysol.MEMBERSHIP_TOL:
        print(f"warning: start point has relative |P| = {m0:.3g}", file=sys.stderr)
    try:
        traj = painleve.flow(start, args.s1, tol=args.tol, spec=spec)
        code = 0
    except painleve.FlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    mem = traj.membership()
    lines = ["s_re,s_im,chi_re,chi_im,a_re,a_im,membership_residual"]
    for s, c, a, m in zip(traj.s, traj.chi, traj.a, mem):
        lines.append(",".join(fmt_float(x) for x in (s.real, s.imag, c.real, c.imag, a.real, a.imag, m)))
    _emit("\n".join(lines) + "\n", args.out)
    return code


def cmd_monodromy(args):
    kind = args.system
    if kind == "extended":
        sys_spec = monodromy.LinearSystemSpec.extended(args.ell, args.chi, args.a, args.s)
    elif kind == "torus":
        sys_spec = monodromy.LinearSystemSpec.torus(args.ell, args.a, args.s)
    else:
        sys_spec = monodromy.LinearSystemSpec.psi()
    r = monodromy.monodromy_matrix(sys_spec, args.radius, args.tol)
    out = {
        "system": kind,
        "trace": fmt_complex(r.trace),
        "det": fmt_complex(r.det),
        "unipotence_gap": fmt_float(r.gap),
        "M": [[fmt_complex(x) for x in row] for row in r.M],
    }
    sys.stdout.write(_dump(out))
    return 0


def cmd_rho(args):
    est = josephson.rotation_number(josephson.TorusParams(args.B, args.A, args.omega), args.periods)
    out = {
        "omega": fmt_float(args.omega), "B": fmt_float(args.B), "A": fmt_float(args.A),
        "rho": fmt_float(est.rho), "bound": fmt_float(est.bound),
        "locked": est.locked, "n_periods": est.n_periods,
    }
    sys.stdout.write(_dump(out))
    return 0


def cmd_scan(args):
    rows = josephson.scan(args.B, args.A, args.omega, args.periods, workers=_workers(args))
    _emit(josephson.scan_csv(rows), args.out)
    return 0


# verification suite

def _suite_ell(ell):
    """All checks for one ell; returns list of (ok, line)."""
    lines = [(r.ok, r.line()) for r in spectral.identity_suite(ell)]
    if ell <= 8:
        for sg in ("plus", "minus"):
            try:
                painleve.multiplier(SurfaceSpec(ell, sg))
                lines.append((True, f"PASS tangency[{sg}] ell={ell}"))
            except spectral.InternalInconsistency as exc:
                lines.append((False, f"FAIL tangency[{sg}] ell={ell} {exc}"))
    rng = np.random.default_rng(ell)
    for sg in ("plus", "minus"):
        spec = SurfaceSpec(ell, sg)
        pt = polysol.random_surface_points(spec, 1, rng)[0]
        sol = polysol.solve_polynomial_solution(spec, pt)
        res = polysol.verify_solution(spec, pt, sol)
        ok = res < 1e-9 and sol.degree == ell
        lines.append((ok, f"{'PASS' if ok else 'FAIL'} polysol[{sg}] ell={ell} residual={res:.2e}"))
        if ell <= 4:
            r = monodromy.monodromy_matrix(monodromy.LinearSystemSpec.extended(ell, pt.chi, pt.a, pt.s))
            ok = abs(r.trace - 2) < 1e-6 and abs(r.det - 1) < 1e-8
            lines.append((ok, f"{'PASS' if ok else 'FAIL'} unipotent[{sg}] ell={ell} |trM-2|={abs(r.trace - 2):.2e}"))
    return lines


def _suite_global(ell_max):
    lines = []
    for ell in (1, 2):
        if ell <= ell_max:
            for sg in ("plus", "minus"):
                r = spectral.verify_display(ell, sg)
                lines.append((r.ok, r.line()))
    if ell_max >= 2:
        for sg in ("plus", "minus"):
            r = spectral.verify_l2_discriminant(sg, 1)
            ok = r.ok and np.allclose(r.extra["branch_points"], spectral.branch_points_closed_form(sg, 1), atol=1e-10)
            lines.append((ok, f"{'PASS' if ok else 'FAIL'} l2-branch-points[{sg}] s=1"))
    table = {ell: spectral.genus(ell) for ell in range(1, ell_max + 1)}
    lines.append((True, f"INFO genus {table}"))
    r = monodromy.monodromy_matrix(monodromy.LinearSystemSpec.extended(0.3, 0.4 + 0.2j, 1.1 - 0.3j, 0.8 + 0.5j))
    gap = abs(r.det - np.exp(2j * np.pi * 0.3))
    lines.append((gap < 1e-8, f"{'PASS' if gap < 1e-8 else 'FAIL'} det-law ell=0.3 |detM-e^(2 pi i ell)|={gap:.2e}"))
    c, r = monodromy.stokes_product_check()
    ok = abs(c + 4) < 1e-5 and r.gap > 0.1
    lines.append((ok, f"{'PASS' if ok else 'FAIL'} stokes-product c0c1={fmt_complex(c)}"))
    return lines


def cmd_verify(args):
    ells = list(range(1, args.ell_max + 1))
    workers = _workers(args)
    if workers > 1 and len(ells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            per_ell = list(ex.map(_suite_ell, ells))
    else:
        per_ell = [_suite_ell(ell) for ell in ells]
    lines = [x for chunk in per_ell for x in chunk] + _suite_global(args.ell_max)
    for _, text in lines:
        print(text)
    failed = sum(1 for ok, _ in lines if not ok)
    print(f"{len(lines) - failed} passed, {failed} failed")
    return 1 if failed else 0


def build_parser():
    p = argparse.ArgumentParser(prog="heunlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sign = dict(choices=["plus", "minus"], required=True)

    s = sub.add_parser("surface", help="surface polynomial as JSON")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--sign", **sign)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_surface)

    s = sub.add_parser("spectral", help="spectral-curve polynomial over (u, v) as JSON")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_spectral)

    s = sub.add_parser("multiplier", help="tangency multiplier as JSON")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--sign", **sign)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_multiplier)

    s = sub.add_parser("verify", help="run the identity, solution, tangency and monodromy checks")
    s.add_argument("--ell-max", type=int, required=True)
    s.add_argument("--workers", type=int)
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("polysolve", help="polynomial solution at a surface point")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--sign", **sign)
    s.add_argument("--chi", type=parse_complex, required=True)
    s.add_argument("--s", type=parse_complex, required=True)
    s.add_argument("--index", type=int, default=0)
    s.set_defaults(fn=cmd_polysolve)

    s = sub.add_parser("flow", help="isomonodromic flow to CSV")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--sign", **sign)
    s.add_argument("--chi0", type=parse_complex, required=True)
    s.add_argument("--a0", type=parse_complex, required=True)
    s.add_argument("--s0", type=parse_complex, required=True)
    s.add_argument("--s1", type=parse_complex, required=True)
    s.add_argument("--tol", type=parse_float, default=1e-10)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_flow)

    s = sub.add_parser("monodromy", help="monodromy trace, determinant and unipotence gap")
    s.add_argument("--system", choices=["extended", "torus", "psi"], default="extended")
    s.add_argument("--ell", type=parse_complex, default=0j)
    s.add_argument("--chi", type=parse_complex, default=0j)
    s.add_argument("--a", type=parse_complex, default=0j)
    s.add_argument("--s", type=parse_complex, default=1 + 0j)
    s.add_argument("--radius", type=parse_float, default=1.0)
    s.add_argument("--tol", type=parse_float, default=1e-12)
    s.set_defaults(fn=cmd_monodromy)

    s = sub.add_parser("rho", help="rotation number with certified bound")
    s.add_argument("--omega", type=parse_float, required=True)
    s.add_argument("--B", type=parse_float, required=True)
    s.add_argument("--A", type=parse_float, required=True)
    s.add_argument("--periods", type=int, default=200)
    s.set_defaults(fn=cmd_rho)

    s = sub.add_parser("scan", help="rotation numbers on a (B, A) grid to CSV")
    s.add_argument("--omega", type=parse_float, required=True)
    s.add_argument("--B", type=parse_range, required=True)
    s.add_argument("--A", type=parse_range, required=True)
    s.add_argument("--periods", type=int, default=200)
    s.add_argument("--workers", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_scan)
    return p


_NEG_VALUE = re.compile(r"^-[\d.]")


def _attach_negative_values(argv):
    """Rewrite '--B -1:1:0.5' as '--B=-1:1:0.5' so argparse does not read a flag."""
    out = []
    it = iter(argv)
    for tok in it:
        out.append(tok)
        if tok.startswith("--") and "=" not in tok:
            nxt = next(it, None)
            if nxt is None:
                break
            if _NEG_VALUE.match(nxt):
                out[-1] = f"{tok}={nxt}"
            else:
                out.append(nxt)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_negative_values(argv))
    try:
        return args.fn(args)
    except (ValueError, polysol.NotOnSurface, polysol.AmbiguousKernel) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``eisenkernel <subcommand> [flags]``.

Exit status: 0 on success, 1 when a verification fails (identity mismatch,
uncertified scan, no certified k0, a series that did not converge) and 2 on
usage or precondition errors.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__, continuation, kernel, lfunc, nonvanish, qexp, report
from .errors import CapabilityError, ConvergenceError, EisenKernelError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_IDENTITY_POINTS = (("0.5+0.5i", "-1.5-0.25i"), ("-0.7+0.3i", "-0.5+0.4i"), ("1.3-0.2i", "-1.9+0.1i"))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_complex(text: str) -> complex:
    """Accepts Python syntax with either i or j as the imaginary unit."""
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_point(text: str) -> tuple[complex, complex]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("a point is written S,W")
    return parse_complex(parts[0]), parse_complex(parts[1])


def _convention(name: str) -> lfunc.LStarConvention:
    return lfunc.LStarConvention(-1 if name == "minus" else 1)


def _metadata(args, truncation=None, tolerances=None) -> dict:
    conv = getattr(args, "convention", "minus")
    return {"version": __version__, "command": args.command, "convention": _convention(conv).tag,
            "truncation": truncation or {}, "tolerances": tolerances or {}}


def _pick_form(k: int, index: int, n_coeffs: int) -> qexp.Eigenform:
    forms = qexp.eigenforms(k, n_coeffs)
    if not forms:
        raise CapabilityError(f"S_{k} is zero: no eigenforms")
    if not 0 <= index < len(forms):
        raise UsageError(f"--index must lie in [0, {len(forms) - 1}] for weight {k}")
    return forms[index]


# --------------------------------------------------------------------------
# subcommands; each returns (report dict, exit status)
# --------------------------------------------------------------------------

def cmd_eigenbasis(args):
    forms = qexp.eigenforms(args.weight, args.n_coeffs)
    result = {"weight": args.weight, "dimension": qexp.cusp_dimension(args.weight),
              "forms": [{"coeffs": f.coeffs, "exact": f.exact, "hecke_prime": f.prime,
                         "hecke_eigenvalue": f.eigenvalue} for f in forms]}
    return result, _metadata(args, {"n_coeffs": args.n_coeffs}), EXIT_OK


def cmd_lvalue(args):
    f = _pick_form(args.weight, args.index, args.n_coeffs)
    value = lfunc.lstar(f, args.s, _convention(args.convention), tol=args.tol)
    result = {"weight": args.weight, "index": args.index, "s": args.s, "lstar": value}
    return result, _metadata(args, {"n_coeffs": args.n_coeffs}, {"tol": args.tol}), EXIT_OK


def cmd_norm(args):
    forms = qexp.eigenforms(args.weight, args.n_coeffs)
    norms = []
    for f in forms:
        ref = lfunc.petersson_refinement(f)
        norms.append({"norm": ref.value, "refinement": ref})
    result = {"weight": args.weight, "norms": norms}
    return result, _metadata(args, {"n_coeffs": args.n_coeffs}), EXIT_OK


def cmd_kernel_coeff(args):
    p = kernel.KernelPoint(args.s, args.w, args.weight)
    br = kernel.fourier_coefficient(p, args.m, rel_tol=args.rel_tol, c_cap=args.c_cap, n_cap=args.n_cap)
    result = {"point": p, "in_D": p.in_D, "breakdown": br, "completed": br.completed()}
    if args.spectral:
        result["spectral"] = kernel.spectral_coefficient(args.weight, p.s, p.w, args.m, _convention(args.convention))
    trunc = {"C_max": br.truncation.C_max, "N_max": br.truncation.N_max, "A_max": br.truncation.A_max,
             "c_cap": args.c_cap, "n_cap": args.n_cap}
    return result, _metadata(args, trunc, {"rel_tol": args.rel_tol}), EXIT_OK


def cmd_verify_identity(args):
    k = args.weight
    if args.point:
        points = args.point
    else:
        points = [(k / 2 + parse_complex(a), parse_complex(b)) for a, b in DEFAULT_IDENTITY_POINTS]
    rep = kernel.verify_identity(k, points, tuple(args.m), _convention(args.convention),
                                 tolerance=args.tolerance, rel_tol=args.rel_tol)
    result = {"report": rep, "max_rel_err": rep.max_rel_err, "passed": rep.passed}
    trunc = {"per_entry": [e.truncation for e in rep.entries]}
    meta = _metadata(args, trunc, {"tolerance": rep.tolerance, "rel_tol": rep.rel_tol})
    return result, meta, EXIT_OK if rep.passed else EXIT_FAIL


def cmd_continuation_eval(args):
    p = kernel.KernelPoint(args.s, args.w, args.weight, args.T, args.delta)
    if args.form == "prop-f":
        val = continuation.prop_f_rhs(p)
    else:
        val = continuation.lemma_f1_rhs(p, args.mode)
    result = {"point": p, "form": args.form, "value": val, "total_main": val.total_main}
    return result, _metadata(args, tolerances={"mode": args.mode}), EXIT_OK


def cmd_scan(args):
    spec = nonvanish.RegionSpec(args.region, args.weight, args.T, args.delta, args.grid_step)
    scan = nonvanish.scan_region(spec, args.mode, args.exact_check)
    meta = _metadata(args, {"grid_step": args.grid_step,
                            "remainder_cutoff": scan.exact_check.get("remainder_cutoff")},
                     {"exact_check_tol": nonvanish.EXACT_CHECK_TOL, "mode": args.mode})
    status = EXIT_OK if scan.certified else EXIT_FAIL
    if args.format == "csv":
        return report.scan_rows(scan), meta, status
    result = {"region": spec, "mode": scan.mode, "certified": scan.certified, "vacuous": scan.vacuous,
              "min_modulus": scan.min_modulus, "min_margin": scan.min_margin, "n_points": scan.n_points,
              "exact_check": scan.exact_check, "notes": scan.notes}
    if args.grid:
        result.update({"s": scan.s, "w": scan.w, "N": scan.N, "remainder_ratio": scan.remainder_ratio})
    return result, meta, status


def cmd_estimate_c(args):
    rep = nonvanish.estimate_C(args.T, args.delta, args.k_min, args.k_max, args.grid_step, args.mode, args.exact_check)
    exact_ok = all(v.get("agrees", True) for v in rep.exact_checks.values())
    meta = _metadata(args, {"grid_step": args.grid_step},
                     {"exact_check_tol": nonvanish.EXACT_CHECK_TOL, "mode": args.mode})
    result = {"report": rep, "exact_checks_agree": exact_ok}
    return result, meta, EXIT_OK if rep.k0 is not None and exact_ok else EXIT_FAIL


def cmd_assumption_check(args):
    rep = nonvanish.assumption_check(args.t0, args.z0, args.radius, args.k_list, args.n_grid)
    result = {"report": rep, "consistent": rep.consistent, "verdict": rep.verdict}
    return result, _metadata(args, {"n_grid": args.n_grid}), EXIT_OK


def cmd_theorem34(args):
    rows = []
    for k in args.k_list:
        val = nonvanish.theorem34_quantity(args.s, args.w, k)
        rows.append({"k": k, "value": val.value, "terms": val.terms,
                     "gamma_exponent_s": nonvanish.gamma_ratio_exponent(args.s, k)})
    result = {"s": args.s, "w": args.w, "rows": rows}
    return result, _metadata(args), EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _even_weight(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("weight must be an integer") from None
    if k % 2:
        raise argparse.ArgumentTypeError("weight must be even")
    return k


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eisenkernel", description="Double Eisenstein kernel numerics.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text, weight=True):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        if weight:
            sp.add_argument("--weight", "-k", type=_even_weight, required=True)
        sp.add_argument("--convention", choices=("minus", "plus"), default="minus",
                        help="sign of the (2 pi)^(-/+ s) factor in L*")
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        return sp

    sp = add("eigenbasis", cmd_eigenbasis, "normalized Hecke eigenforms")
    sp.add_argument("--n-coeffs", type=int, default=64)

    sp = add("lvalue", cmd_lvalue, "completed L-value L*(f, s)")
    sp.add_argument("--s", type=parse_complex, required=True)
    sp.add_argument("--index", type=int, default=0, help="eigenform index, ordered by Hecke eigenvalue")
    sp.add_argument("--n-coeffs", type=int, default=200)
    sp.add_argument("--tol", type=float, default=1e-14)

    sp = add("norm", cmd_norm, "Petersson norms of the eigenforms")
    sp.add_argument("--n-coeffs", type=int, default=64)

    sp = add("kernel-coeff", cmd_kernel_coeff, "m-th Fourier coefficient of the kernel")
    sp.add_argument("--s", type=parse_complex, required=True)
    sp.add_argument("--w", type=parse_complex, required=True)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--rel-tol", type=float, default=1e-6)
    sp.add_argument("--c-cap", type=int, default=128)
    sp.add_argument("--n-cap", type=int, default=1024)
    sp.add_argument("--spectral", action="store_true", help="also evaluate the eigenform side")

    sp = add("verify-identity", cmd_verify_identity, "Fourier route against the eigenform route")
    sp.add_argument("--point", type=parse_point, action="append",
                    help="S,W; repeatable. Default: three points with Re s near k/2 and Re w < 0")
    sp.add_argument("--m", type=int, nargs="+", default=[1, 2, 3])
    sp.add_argument("--tolerance", type=float, default=1e-4)
    sp.add_argument("--rel-tol", type=float, default=None, help="triple-sum stopping tolerance")

    sp = add("continuation-eval", cmd_continuation_eval, "continued kernel coefficient in the strip")
    sp.add_argument("--s", type=parse_complex, required=True)
    sp.add_argument("--w", type=parse_complex, required=True)
    sp.add_argument("--form", choices=("prop-f", "lemma-f1"), default="lemma-f1")
    sp.add_argument("--mode", choices=("heuristic", "empirical", "none"), default="heuristic")
    sp.add_argument("--T", type=float, default=1.0)
    sp.add_argument("--delta", type=float, default=0.25)

    sp = add("scan", cmd_scan, "certify main-term dominance on a grid")
    sp.add_argument("--region", choices=nonvanish.REGION_KINDS, default="R")
    sp.add_argument("--T", type=float, default=1.0)
    sp.add_argument("--delta", type=float, default=0.25)
    sp.add_argument("--grid-step", type=float, default=0.05)
    sp.add_argument("--mode", choices=("heuristic", "empirical"), default="heuristic")
    sp.add_argument("--exact-check", action=argparse.BooleanOptionalAction, default=None)
    sp.add_argument("--grid", action="store_true", help="include grid values in JSON output")

    sp = add("estimate-c", cmd_estimate_c, "smallest k0 with certified dominance up to k-max", weight=False)
    sp.add_argument("--T", type=float, default=1.0)
    sp.add_argument("--delta", type=float, default=0.25)
    sp.add_argument("--k-min", type=_even_weight, default=12)
    sp.add_argument("--k-max", type=_even_weight, default=300)
    sp.add_argument("--grid-step", type=float, default=0.05)
    sp.add_argument("--mode", choices=("heuristic", "empirical"), default="heuristic")
    sp.add_argument("--exact-check", action=argparse.BooleanOptionalAction, default=None)

    sp = add("assumption-check", cmd_assumption_check, "zeta-ratio range over a ball", weight=False)
    sp.add_argument("--t0", type=float, required=True)
    sp.add_argument("--z0", type=parse_complex, required=True)
    sp.add_argument("--radius", type=float, required=True)
    sp.add_argument("--k-list", type=_even_weight, nargs="+", default=[100, 200, 400])
    sp.add_argument("--n-grid", type=int, default=5)

    sp = add("theorem34", cmd_theorem34, "N in coordinates centred on the critical lines", weight=False)
    sp.add_argument("--s", type=parse_complex, required=True)
    sp.add_argument("--w", type=parse_complex, required=True)
    sp.add_argument("--k-list", type=_even_weight, nargs="+", default=[50, 100, 200, 400])
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.format == "csv" and args.command != "scan":
            raise UsageError("--format csv is only available for scan")
        result, meta, status = args.func(args)
        if args.format == "csv":
            payload = result
        else:
            payload = {"metadata": meta, "result": result}
        text = report.emit_report(payload, args.format, args.output)
        if args.output is None:
            sys.stdout.write(text if text.endswith("\n") else text + "\n")
        else:
            # csv output carries no metadata; write it alongside
            if args.format == "csv":
                report.emit_report(meta, "json", args.output + ".meta.json")
        return status
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (EisenKernelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

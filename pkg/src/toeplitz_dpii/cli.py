"""Command-line interface.

Exit codes: 0 success, 1 an identity or certification check failed,
2 usage error.  All numbers are written as decimal strings and the output
depends on the flags only.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

import mpmath

from .errors import DPIIError

log = logging.getLogger("toeplitz_dpii")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

DEFAULTS = {
    "N": 1,
    "theta": None,
    "bits": 256,
    "nmax": 40,
    "kmax": 64,
    "format": "text",
    "check": "all",
}


class UsageError(Exception):
    pass


class _JsonFormatter(logging.Formatter):
    def format(self, record):
        return json.dumps({"level": record.levelname, "message": record.getMessage()})


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_").lstrip("_")
        if key.lower() == "n":
            key = "N"
        out[key] = value.strip("\"'")
    return out


def _parse_thetas(text, big_n):
    if text is None:
        raise UsageError("--theta is required")
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if len(parts) != big_n:
        raise UsageError(f"--theta needs {big_n} values, got {len(parts)}")
    for p in parts:
        try:
            Fraction(p)
        except ValueError:
            raise UsageError(f"bad theta value {p!r}") from None
    return tuple(parts)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="toeplitz-dpii",
        description="Toeplitz determinants, OPUC and the discrete Painleve II hierarchy.")
    parser.add_argument("--config", help="key = value file; flags override it")
    parser.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    parser.add_argument("--json-logs", action="store_true", help="log as JSON lines on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, numeric=True):
        p.add_argument("--N", dest="N", type=int, default=None)
        if numeric:
            p.add_argument("--theta", default=None, help="comma separated theta_1..theta_N")
            p.add_argument("--bits", type=int, default=None)
        p.add_argument("--out", default=None, help="output file (default stdout)")

    p = sub.add_parser("coeffs", help="Fourier coefficients as JSON")
    common(p)
    p.add_argument("--kmax", type=int, default=None)

    for name, text in (("determinants", "Toeplitz determinants and gap probabilities (CSV)"),
                       ("opuc", "OPUC coefficients x_n and kappa_n^2 (CSV)"),
                       ("verify-recursion", "numeric check of the hierarchy on Toeplitz data"),
                       ("bessel-compare", "x_n against the (generalised) Bessel asymptotics (CSV)")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--nmax", type=int, default=None)

    p = sub.add_parser("hierarchy", help="print the N-th equation")
    common(p, numeric=False)
    p.add_argument("--format", choices=("text", "latex", "json"), default=None)

    p = sub.add_parser("lax", help="build and check the Lax matrices")
    common(p, numeric=False)
    p.add_argument("--check", choices=("all", "identities", "compatibility", "cj", "none"),
                   default=None)
    p.add_argument("--format", choices=("text", "latex", "json"), default=None)

    p = sub.add_parser("continuum", help="continuum limit ODE and cancellation ledger")
    common(p, numeric=False)
    p.add_argument("--format", choices=("text", "latex", "json"), default=None)
    return parser


def _settings(args):
    conf = read_config(args.config) if args.config else {}
    out = dict(DEFAULTS)
    for key, value in conf.items():
        out[key] = value
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "command"):
            out[key] = value
    try:
        for key in ("N", "bits", "nmax", "kmax"):
            out[key] = int(out[key])
    except (TypeError, ValueError):
        raise UsageError(f"{key} must be an integer") from None
    if out["N"] < 1:
        raise UsageError("--N must be >= 1")
    if out["bits"] < 64:
        raise UsageError("--bits must be >= 64")
    if out["nmax"] < 0 or out["kmax"] < 0:
        raise UsageError("--nmax and --kmax must be >= 0")
    return out


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        log.info("wrote %s", path)
    else:
        sys.stdout.write(text)


def _params(s):
    from .symbolcore import SymbolParams
    return SymbolParams(s["N"], _parse_thetas(s["theta"], s["N"]), s["bits"])


def cmd_coeffs(s):
    from .symbolcore import fourier_table
    table = fourier_table(_params(s), s["kmax"])
    _emit(table.to_json() + "\n", s.get("out"))
    return EXIT_OK


def _numeric_chain(s, extra=0):
    from .opuc import szego_sequence
    from .symbolcore import fourier_table
    from .toeplitz import determinant_sequence
    params = _params(s)
    n_top = s["nmax"] + extra
    table = fourier_table(params, n_top)
    return params, table, determinant_sequence(table, n_top), szego_sequence(table, n_top)


def cmd_determinants(s):
    from .toeplitz import determinants_csv
    _, _, seq, xs = _numeric_chain(s)
    _emit(determinants_csv(seq, x=xs), s.get("out"))
    return EXIT_OK


def cmd_opuc(s):
    from .opuc import opuc_csv
    _, _, _, xs = _numeric_chain(s)
    _emit(opuc_csv(xs), s.get("out"))
    return EXIT_OK


def cmd_verify_recursion(s):
    from .hierarchy import generate_equation, residual_trace
    from .toeplitz import recursion_residual
    big_n = s["N"]
    nmax = s["nmax"]
    params, _, seq, xs = _numeric_chain(s, extra=big_n)
    tol = mpmath.ldexp(1, -s["bits"] // 2)
    with mpmath.workprec(s["bits"]):
        rec = recursion_residual(seq, xs)[max(big_n, 1) - 1:nmax]
        ratios = [seq.ratio(n) for n in range(max(big_n, 1), nmax + 1)]
        rec_rel = max((abs(r) / q for r, q in zip(rec, ratios)), default=mpmath.mpf(0))
        eq = generate_equation(big_n)
        hier = residual_trace(eq, xs, range(big_n, nmax + 1), relative=True)
        hier_rel = max((abs(r) for r in hier), default=mpmath.mpf(0))
    ok = rec_rel < tol and hier_rel < tol
    lines = [
        f"N = {big_n}, n = {big_n}..{nmax}, bits = {s['bits']}",
        f"determinant recursion max relative residual: {mpmath.nstr(rec_rel, 6)}",
        f"hierarchy equation max relative residual: {mpmath.nstr(hier_rel, 6)}",
        f"tolerance: {mpmath.nstr(tol, 6)}",
        "PASS" if ok else "FAIL",
    ]
    _emit("\n".join(lines) + "\n", s.get("out"))
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_hierarchy(s):
    from .hierarchy import generate_equation
    eq = generate_equation(s["N"])
    fmt = s["format"]
    if fmt == "json":
        text = json.dumps(eq.to_json_obj())
    elif fmt == "latex":
        text = eq.to_latex()
    else:
        text = eq.to_text()
    _emit(text + "\n", s.get("out"))
    return EXIT_OK


def cmd_lax(s):
    from .hierarchy import equation_consistency
    from .lax import build_T, build_U, compatibility_residual, cresswell_joshi_map, verify_identities
    big_n = s["N"]
    T = build_T(big_n)
    U = build_U()
    check = s["check"]
    lines = []
    if check in ("all", "identities"):
        rep = verify_identities(T, big_n)
        lines.append("identities: " + ", ".join(rep["checks"]) + " ok")
        for i, a in rep["alphas"].items():
            lines.append(f"  alpha_{i} = {a.to_text()}")
    if check in ("all", "compatibility"):
        res = compatibility_residual(T, U, big_n)
        cons = equation_consistency(big_n)
        lines.append(f"compatibility: leftover relation has {len(res)} terms; "
                     f"matches the scalar route with sign {cons['sign']:+d}")
    if check in ("all", "cj"):
        L, M = cresswell_joshi_map(T, U)
        lines.append(f"cresswell-joshi: L_n = [[z, x[n]], [x[n], 1/z]], "
                     f"M_n traceless, z^{M.z_min}..z^{M.z_max}")
    fmt = s["format"]
    if fmt == "json":
        body = json.dumps({"checks": lines, "T": T.to_json_obj(), "U": U.to_json_obj()})
    elif fmt == "latex":
        body = "\n".join(lines + ["T = " + T.to_latex(), "U = " + U.to_latex()])
    else:
        body = "\n".join(lines + ["T:", T.to_text(), "U:", U.to_text()])
    _emit(body + "\n", s.get("out"))
    return EXIT_OK


def cmd_bessel_compare(s):
    from .asymptotics import compare_asymptotics, comparison_csv
    _, _, _, xs = _numeric_chain(s)
    rows = compare_asymptotics(xs)
    _emit(comparison_csv(rows, s["bits"]), s.get("out"))
    return EXIT_OK


def cmd_continuum(s):
    from .continuum import continuum_limit
    res = continuum_limit(s["N"])
    fmt = s["format"]
    if fmt == "json":
        text = res.to_json()
    elif fmt == "latex":
        text = res.ode.render(latex=True) + " = 0"
    else:
        lines = [f"N = {res.big_n}: {res.ode.render()} = 0",
                 f"normalisation factor: {res.normalization}"]
        for p in res.cancelled_orders:
            lines.append(f"  eps^{p} (theta^{res.theta_exponent(p)}): cancels")
        text = "\n".join(lines)
    _emit(text + "\n", s.get("out"))
    return EXIT_OK


COMMANDS = {
    "coeffs": cmd_coeffs,
    "determinants": cmd_determinants,
    "opuc": cmd_opuc,
    "verify-recursion": cmd_verify_recursion,
    "hierarchy": cmd_hierarchy,
    "lax": cmd_lax,
    "bessel-compare": cmd_bessel_compare,
    "continuum": cmd_continuum,
}


def _setup_logging(args):
    handler = logging.StreamHandler(sys.stderr)
    if args.json_logs:
        handler.setFormatter(_JsonFormatter())
    else:
        handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.WARNING if args.quiet else logging.INFO)
    log.propagate = False


def run(argv=None) -> int:
    """Run the CLI and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    _setup_logging(args)
    try:
        settings = _settings(args)
        return COMMANDS[args.command](settings)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except DPIIError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_VIOLATION


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

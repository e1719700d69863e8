"""Command-line front end: ``qsu2 verify | zeta | spectrum | hochschild | export-gns``.

Exit codes: 0 success, 1 a check failed, 2 configuration error.  Outputs are
deterministic for a fixed configuration (no timings, sorted keys) and carry
a ``schema_version`` field.  The worker count for tuple checks is read from
QSU2_WORKERS.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .reports import SCHEMA_VERSION, _jsonable
from .scalars import DivergenceError, PoleError, parse_rational

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def _exact_q(text: str) -> Fraction:
    try:
        q = parse_rational(text)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"--q must be an exact rational 'p/r' for this command: {exc}") from None
    return q


def _loose_q(text: str) -> Fraction:
    # zeta scans accept decimals; the decimal string is read exactly
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot read --q {text!r}: {exc}") from None


def _tolerances(items) -> dict:
    from .suites import DEFAULT_TOLERANCES

    tol = dict(DEFAULT_TOLERANCES)
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or name not in DEFAULT_TOLERANCES:
            raise ConfigError(f"bad --tol {item!r}; known names: {', '.join(sorted(DEFAULT_TOLERANCES))}")
        try:
            tol[name] = float(value)
        except ValueError:
            raise ConfigError(f"bad tolerance value in {item!r}") from None
    return tol


def make_config(args, exact: bool = True):
    from .suites import RunConfig

    q = _exact_q(args.q) if exact else _loose_q(args.q)
    try:
        return RunConfig(q=q, trunc=args.trunc, num_trunc=args.num_trunc, gauge_rho=args.gauge_rho,
                         seed=args.seed, tolerances=_tolerances(args.tol))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _dump_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    fields = list(rows[0])
    for r in rows[1:]:
        fields += [k for k in r if k not in fields]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["schema_version"] + fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({"schema_version": SCHEMA_VERSION,
                    **{k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()}})
    return buf.getvalue()


def _emit(args, payload, rows=None, default="json"):
    """Write `payload` (json) or `rows` (csv) to --out or stdout."""
    fmt = args.format or default
    if fmt == "csv":
        if rows is None:
            raise ConfigError("this command has no CSV form; use --format json")
        text = _dump_csv(rows)
    else:
        text = _dump_json({"schema_version": SCHEMA_VERSION, **payload})
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    from .suites import run_suites

    cfg = make_config(args)
    reports = run_suites([args.suite], cfg)
    passed = all(r["status"] == "pass" for reps in reports.values() for r in reps)
    rows = [{"suite": s, "check": r["check"], "status": r["status"],
             "max_error": r.get("max_error", ""), "checked": r.get("checked", "")}
            for s, reps in reports.items() for r in reps]
    for row in rows:
        print(f"{row['status'].upper():4} {row['suite']}: {row['check']}", file=sys.stderr)
    _emit(args, {"command": "verify", "config": cfg.as_dict(), "passed": passed, "suites": reports}, rows)
    return EXIT_OK if passed else EXIT_FAIL


def _complex_list(text: str) -> list[complex]:
    try:
        return [complex(t.replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"cannot read complex values from {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"cannot read numbers from {text!r}") from None


def _zeta_rows(z: complex, q: Fraction, l_max) -> list[dict]:
    from . import zeta

    rows, values = [], []
    for method in ("direct-sum", "closed-form"):
        base = {"q": str(q), "re_z": z.real, "im_z": z.imag, "method": method}
        try:
            ev = zeta.zeta_direct(z, q, l_max) if method == "direct-sum" else zeta.zeta_closed_form(z, q)
        except (PoleError, DivergenceError) as exc:
            rows.append({**base, "error": f"{type(exc).__name__}: {exc}"})
            continue
        row = {"q": str(q), **ev.row(), "error": ""}
        rows.append(row)
        values.append(ev.value)
    if len(values) == 2:
        rel = abs(values[0] - values[1]) / max(abs(values[1]), 1e-300)
        for r in rows:
            r["agreement_rel"] = rel
    return rows


def cmd_zeta(args) -> int:
    from . import zeta
    from .suites import ZETA_GRID

    cfg = make_config(args, exact=False)
    q = cfg.q
    if args.mode == "eval":
        rows = [r for z in _complex_list(args.z) for r in _zeta_rows(z, q, args.l_max)]
        _emit(args, {"command": "zeta eval", "rows": rows}, rows, default="csv")
    elif args.mode == "grid":
        res = _float_list(args.re) if args.re else list(ZETA_GRID["re"])
        ims = _float_list(args.im) if args.im else list(ZETA_GRID["im"])
        rows = [r for x in res for y in ims for r in _zeta_rows(complex(x, y), q, args.l_max)]
        _emit(args, {"command": "zeta grid", "rows": rows}, rows, default="csv")
    elif args.mode == "poles":
        rows = [zeta.pole_diagnostic(k, t, q).as_dict()
                for k in range(args.k_max + 1) for t in range(-args.t_max, args.t_max + 1)]
        ok = all(r["double_pole"] for r in rows)
        _emit(args, {"command": "zeta poles", "q": str(q), "rows": rows, "passed": ok}, rows)
        return EXIT_OK if ok else EXIT_FAIL
    else:
        s = _loose_q(args.s)
        if s <= 0:
            raise ConfigError("--s must be positive")
        if args.r_grid:
            grid = [_loose_q(t) for t in args.r_grid.split(",")]
        else:
            grid = [s / 2 + Fraction(d, 10) for d in (-3, -2, -1, 0, 1, 2, 3) if s / 2 + Fraction(d, 10) > 0]
        sweep = zeta.spectral_dimension_sweep(s, q, grid)
        _emit(args, {"command": "zeta dimension", **sweep.as_dict()}, sweep.rows)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    from .dirac_spectral import spectrum_rows

    cfg = make_config(args)
    rows = spectrum_rows(cfg.trunc, cfg.q)
    _emit(args, {"command": "spectrum", "config": cfg.as_dict(), "rows": rows}, rows, default="csv")
    return EXIT_OK


def _k2_report(tau, workers) -> dict:
    from . import hochschild as hs

    phi = hs.build_dirac_cochain(tau, 2)
    dec, _ = hs.dirac_decomposition(tau, 2)
    psi, _ = hs.dirac_transgression(tau, 2)
    t6 = hs.exhaustive_tuples(6, 1)
    checks = [hs.check_identity("k=2: phi = sum_w c_w phi_w", phi, dec, t6, workers),
              hs.check_identity("k=2: b_sigma(psi) = phi", hs.coboundary(psi), phi, t6, workers)]
    return {
        "tau_params": tau.describe(),
        "sigma_params": hs._auto_params(phi.sigma),
        "checks": [{"identity": r.check, "tuples_checked": r.checked, "status": r.status} for r in checks],
        "passed": all(r.passed for r in checks),
    }


def cmd_hochschild(args) -> int:
    from . import hochschild as hs

    cfg = make_config(args)
    if args.k not in (1, 2):
        raise ConfigError("--k must be 1 or 2")
    workers = hs.workers_from_env()
    payload = {"command": "hochschild", "config": cfg.as_dict(), "k": args.k}
    try:
        if args.tau == "counit":
            taus = [hs.counit_trace()]
        else:
            taus = [hs.haar_trace()] + [hs.haar_trace(twist=a) for a in hs.random_haar_twists(args.twists, cfg.seed)]
        certs = []
        for tau in taus:
            if args.k == 1:
                certs.append(hs.triviality_certificate(tau, seed=cfg.seed, workers=workers))
            else:
                tau.require()
                certs.append(_k2_report(tau, workers))
    except hs.PreconditionError as exc:
        payload.update({"passed": False, "error": {"kind": "precondition", "identity": exc.identity,
                                                   "witness": [str(w) for w in hs._as_tuple(exc.witness)]}})
        _emit(args, payload)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    passed = all(c["passed"] for c in certs)
    payload.update({"passed": passed, "certificates": certs})
    _emit(args, payload)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_export_gns(args) -> int:
    from .gns_rep import build_truncation

    cfg = make_config(args)
    space = build_truncation(cfg.trunc)
    rows = list(csv.DictReader(io.StringIO(space.labels_csv(cfg.q))))
    _emit(args, {"command": "export-gns", "config": cfg.as_dict(), "truncation": space.to_json()}, rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", default="1/2", help="deformation parameter as 'p/r' (default 1/2)")
    common.add_argument("--trunc", type=int, default=6, help="exact truncation N, 2l <= N (default 6)")
    common.add_argument("--num-trunc", type=int, default=12, help="numeric truncation N (default 12)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--gauge-rho", default="auto", help="'auto' or an exact q-power such as q^-1/2")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a named tolerance")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))

    p = argparse.ArgumentParser(prog="qsu2", description="Twisted spectral triple of quantum SU(2).")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run invariant suites")
    v.add_argument("suite", choices=("algebra", "action", "gns", "dirac", "zeta", "hochschild", "all"))
    v.set_defaults(func=cmd_verify)

    z = sub.add_parser("zeta", parents=[common], help="zeta evaluations, grids, poles, spectral dimension")
    z.add_argument("mode", choices=("eval", "grid", "poles", "dimension"))
    z.add_argument("--z", default="2", help="comma-separated complex points for eval, e.g. '2,0.75+4j'")
    z.add_argument("--re", help="comma-separated real parts for grid")
    z.add_argument("--im", help="comma-separated imaginary parts for grid")
    z.add_argument("--l-max", type=int, default=None, help="direct-sum cutoff (default: automatic)")
    z.add_argument("--k-max", type=int, default=2)
    z.add_argument("--t-max", type=int, default=1)
    z.add_argument("--s", default="1", help="weight exponent for dimension mode")
    z.add_argument("--r-grid", help="comma-separated r values for dimension mode")
    z.set_defaults(func=cmd_zeta)

    s = sub.add_parser("spectrum", parents=[common], help="labeled |D_q| spectrum with Psi weights")
    s.set_defaults(func=cmd_spectrum)

    h = sub.add_parser("hochschild", parents=[common], help="triviality certificates")
    h.add_argument("--tau", choices=("h", "counit"), default="h")
    h.add_argument("--twists", type=int, default=3, help="number of random diagonal twists of h")
    h.add_argument("--k", type=int, default=1, help="1 for the arity-4 cochain, 2 for the arity-6 smoke test")
    h.set_defaults(func=cmd_hochschild)

    g = sub.add_parser("export-gns", parents=[common], help="export the GNS truncation basis")
    g.set_defaults(func=cmd_export_gns)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

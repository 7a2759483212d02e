"""``kappa-causal`` command-line driver.

Exit codes: 0 success, 1 a check failed, 2 bad configuration or input.
``causal-test`` instead reports the verdict: 0 Causal, 3 NotCausal, 4 Unknown.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import algebra as alg
from .causality import (OrderConfig, TransportParams, VerdictKind, causal_order, cone_search_witness,
                        expectation_P, expectation_X, necessary_condition, phase_momentum_transport)
from .config import ConfigError, RunConfig, load_config
from .errors import KappaError
from .numerics import make_gaussian, make_grid
from .representation import StateVector, representation_grid
from .serialization import load_state
from .triple import CONVENTIONS, Spinor, verify_krein_antisymmetry, verify_triple

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
VERDICT_EXIT = {VerdictKind.CAUSAL: 0, VerdictKind.NOT_CAUSAL: 3, VerdictKind.UNKNOWN: 4}

# inner-derivation check: plateau half width and grids
INNER_WINDOW = 16.0


class InputError(ValueError):
    pass


# --------------------------------------------------------------------------
# output


def _envelope(command: str, cfg: RunConfig, passed: bool, body: dict) -> dict:
    return {"command": command, "config_hash": cfg.digest(), "conventions": dict(CONVENTIONS),
            "seed": cfg.seed, "passed": passed, **body}


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([[_fmt(x) for x in r] for r in rows])
    return buf.getvalue()


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return x


def _emit(args, cfg: RunConfig, name: str, report: dict, table: str | None = None):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    out = args.out or cfg.output_dir
    if out:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{name}.json").write_text(text)
        if table is not None:
            (d / f"{name}.csv").write_text(table)
    if args.json or not args.csv:
        sys.stdout.write(text)
    if args.csv and table is not None:
        sys.stdout.write(table)


def _rel(a: alg.AlgebraElement, b: alg.AlgebraElement) -> float:
    return (a - b).sup_norm() / max(b.sup_norm(), 1e-300)


# --------------------------------------------------------------------------
# verify-triple


def _random_spinors(grid, rng: np.random.Generator, count: int = 6) -> list[Spinor]:
    """Random superpositions of interior Gaussians, for the Monte-Carlo Krein check."""
    L = grid.half_width
    out = []
    for _ in range(count):
        comps = []
        for _ in range(2):
            v = np.zeros(grid.n_points, dtype=complex)
            for _ in range(3):
                c, w, k = rng.uniform(-0.3 * L, 0.3 * L), rng.uniform(0.06 * L, 0.12 * L), rng.uniform(-1, 1)
                v += complex(*rng.normal(size=2)) * make_gaussian(c, w, k, grid).values
            comps.append(v)
        out.append(Spinor.from_arrays(grid, *comps))
    return out


def cmd_verify_triple(args, cfg: RunConfig) -> int:
    grid = make_grid(cfg.grid.L, cfg.grid.N)
    gs, gp = representation_grid(cfg.grid.S_window, 256)
    gx = make_grid(20.0, 1024)
    elements = {"gaussian": alg.gaussian_mixed(gp, gx, 0.2, 0.3, 1.5, 0.6, 0.7, kappa=cfg.kappa),
                "unit": alg.unit_element(gp, gx, kappa=cfg.kappa)}
    report = verify_triple(grid, cfg.n_low, elements, gs)
    mc = verify_krein_antisymmetry(_random_spinors(grid, np.random.default_rng(cfg.seed)))
    ev = np.asarray(report.spectrum)
    spec_dev = float(np.max(np.abs(ev - (2.0 + 2.0 * np.arange(ev.size)))))
    checks = {
        "krein_antisym_residual": report.krein_antisym_residual <= cfg.tol("krein"),
        "krein_monte_carlo_residual": mc <= cfg.tol("krein"),
        "dt_commutator_residual": report.dt_commutator_residual <= cfg.tol("dt"),
        "spectrum_deviation": spec_dev <= cfg.tol("spectrum"),
        "spectrum_slope": abs(report.spectrum_slope - 2.0) <= 2.0 * cfg.tol("slope"),
        "commutators_bounded": all(np.isfinite(v) for v in report.commutator_norms.values()),
    }
    body = report.to_dict()
    body.update(krein_monte_carlo_residual=mc, spectrum_deviation=spec_dev, checks=checks)
    passed = all(checks.values())
    _emit(args, cfg, "verify_triple", _envelope("verify-triple", cfg, passed, body))
    return EXIT_OK if passed else EXIT_FAIL


# --------------------------------------------------------------------------
# algebra-check


def _law_residuals(kappa: float) -> dict[str, float]:
    gp, gx = make_grid(8.0, 256), make_grid(12.0, 512)
    f = alg.gaussian_mixed(gp, gx, 0.2, 0.25, 0.5, 0.7, 0.7, amplitude=1 + 0.5j, kappa=kappa)
    g = alg.gaussian_mixed(gp, gx, -0.1, 0.25, -0.3, 0.8, -0.4, kappa=kappa)
    h = alg.gaussian_mixed(gp, gx, 0.0, 0.3, 0.2, 0.6, 0.3, amplitude=0.5j, kappa=kappa)
    one = alg.unit_element(gp, gx, kappa=kappa)
    star, inv = alg.star, alg.involution
    return {
        "associativity": _rel(star(star(f, g), h), star(f, star(g, h))),
        "anti_homomorphism": _rel(inv(star(f, g)), star(inv(g), inv(f))),
        "double_involution": _rel(inv(inv(f)), f),
        "unit_left": _rel(star(one, f), f),
        "unit_right": _rel(star(f, one), f),
    }


def _space_pair(kappa: float, grid_x0, grid_x1):
    f = alg.gaussian_space(grid_x0, grid_x1, 0.3, 1.0, 0.5, 1.0, 0.4, 0.2, kappa=kappa)
    g = alg.gaussian_space(grid_x0, grid_x1, -0.2, 1.2, -0.3, 0.8, -0.3, 0.1, kappa=kappa)
    return f, g


def _twisted_residuals(kappa: float) -> dict[str, float]:
    gp, gx = make_grid(8.0, 256), make_grid(16.0, 1024)
    f = alg.gaussian_mixed(gp, gx, 0.2, 0.25, 0.5, 0.7, 0.7, amplitude=1 + 0.5j, kappa=kappa)
    g = alg.gaussian_mixed(gp, gx, -0.1, 0.25, -0.3, 0.8, -0.4, kappa=kappa)
    out = {}
    for gamma in (0.0, -0.5, 1.0):
        for which in ("X0", "X1"):
            out[f"leibniz[{which},{gamma:g}]"] = alg.twisted_leibniz_residual(f, g, which, gamma)
            out[f"reality[{which},{gamma:g}]"] = alg.twisted_reality_residual(f, which, gamma)
    return out


def cmd_algebra_check(args, cfg: RunConfig) -> int:
    laws = _law_residuals(cfg.kappa)
    twisted = _twisted_residuals(cfg.kappa)
    gx0, gx1 = make_grid(16.0, 128), make_grid(16.0, 256)
    rows = []
    for k in cfg.kappa_list:
        f, g = _space_pair(k, gx0, gx1)
        rows.append((float(k), alg.star_commutator_norm(f, g), alg.commutative_deviation(f, g)))
    f, _ = _space_pair(cfg.kappa, make_grid(2 * INNER_WINDOW, 256), gx1)
    inner = alg.inner_derivation_residual(f, INNER_WINDOW)
    distinct = len({r[0] for r in rows}) >= 2
    slope = alg.loglog_slope([r[0] for r in rows], [r[2] for r in rows]) if distinct else None
    comm_slope = alg.loglog_slope([r[0] for r in rows], [r[1] for r in rows]) if distinct else None
    checks = {f"law:{k}": v <= cfg.tol("algebra") for k, v in laws.items()}
    checks.update({f"twisted:{k}": v <= cfg.tol("twisted") for k, v in twisted.items()})
    checks["inner_derivation"] = inner <= cfg.tol("inner")
    checks["commutative_slope"] = slope is None or abs(slope + 1.0) <= cfg.tol("kappa_slope")
    body = {"kappa": cfg.kappa, "laws": laws, "twisted": twisted, "inner_derivation_residual": inner,
            "inner_window": INNER_WINDOW, "slope": slope, "commutator_slope": comm_slope,
            "sweep": [{"kappa": k, "sup_commutator_norm": c, "sup_product_deviation": d}
                      for k, c, d in rows], "checks": checks}
    passed = all(checks.values())
    table = _csv_text(["kappa", "sup_commutator_norm", "sup_product_deviation"], rows)
    _emit(args, cfg, "algebra_check", _envelope("algebra-check", cfg, passed, body), table)
    return EXIT_OK if passed else EXIT_FAIL


# --------------------------------------------------------------------------
# causal-test and transport-sweep


def _gaussian_from(cfg: RunConfig, params) -> StateVector:
    c, w, k = params
    if not w > 0:
        raise InputError("Gaussian width must be positive")
    grid = make_grid(cfg.grid.L, cfg.grid.N)
    try:
        return StateVector.gaussian(grid, c, w, k)
    except (KappaError, ValueError) as exc:
        raise InputError(f"Gaussian ({c}, {w}, {k}) does not fit the s grid: {exc}") from exc


def _parse_floats(text: str, n: int) -> tuple[float, ...] | None:
    parts = text.split(",")
    if len(parts) != n:
        return None
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        return None


def parse_state_spec(spec: str, cfg: RunConfig, base: StateVector | None = None) -> StateVector:
    """``c,w,k`` Gaussian, ``transport:alpha,t`` of ``base``, or a path to a saved state."""
    if spec.startswith("transport:"):
        if base is None:
            raise InputError("a transport spec needs a preceding state")
        at = _parse_floats(spec[len("transport:"):], 2)
        if at is None:
            raise InputError(f"bad transport spec {spec!r}; expected transport:alpha,t")
        try:
            return phase_momentum_transport(base, TransportParams(*at))
        except (KappaError, ValueError) as exc:
            raise InputError(str(exc)) from exc
    triple = _parse_floats(spec, 3)
    if triple is not None:
        return _gaussian_from(cfg, triple)
    path = Path(spec)
    if not path.is_file():
        raise InputError(f"state spec {spec!r} is neither c,w,k nor a readable file")
    try:
        return load_state(path)
    except (KappaError, ValueError, KeyError) as exc:
        raise InputError(f"cannot load state from {spec}: {exc}") from exc


def _order_config(cfg: RunConfig) -> OrderConfig:
    return OrderConfig(eps_list=tuple(cfg.epsilon_list), beta_bounds=tuple(cfg.beta_bounds),
                       fit_tol=cfg.tol("fit"), witness_tol=cfg.tol("witness"), sign=cfg.sign,
                       exhaustive=cfg.exhaustive)


def cmd_causal_test(args, cfg: RunConfig) -> int:
    phi1 = parse_state_spec(args.state1, cfg)
    phi2 = parse_state_spec(args.state2, cfg, base=phi1)
    if phi1.grid != phi2.grid:
        raise InputError("the two states live on different grids")
    verdict = causal_order(phi1, phi2, _order_config(cfg))
    body = {"verdict": verdict.to_dict(), "states": [args.state1, args.state2]}
    _emit(args, cfg, "causal_test", _envelope("causal-test", cfg, True, body))
    return VERDICT_EXIT[verdict.kind]


def cmd_transport_sweep(args, cfg: RunConfig) -> int:
    try:
        alphas = [float(a) for a in args.alpha.split(",") if a.strip()]
    except ValueError as exc:
        raise InputError(f"bad alpha list {args.alpha!r}") from exc
    if not alphas:
        raise InputError("alpha list is empty")
    if not args.t_max >= 0:
        raise InputError("t_max must be nonnegative")
    if args.steps < 0:
        raise InputError("steps must be nonnegative")
    base = _gaussian_from(cfg, cfg.state)
    oc = _order_config(cfg)
    rows, worst = [], 0.0
    for a in alphas:
        for i in range(1, args.steps + 1):
            t = args.t_max * i / args.steps
            try:
                phi = phase_momentum_transport(base, TransportParams(a, t))
            except KappaError as exc:
                raise InputError(f"transport (alpha={a}, t={t}) leaves the grid: {exc}") from exc
            _, margin = necessary_condition(base, phi)
            _, pairing = cone_search_witness(base, phi, oc.eps_list, oc.beta_bounds, oc.sign, oc.witness_tol)
            worst = max(worst, abs(margin - t * (1.0 - abs(a))))
            rows.append((a, t, expectation_X(phi), expectation_P(phi), margin, pairing))
    header = ["alpha", "t", "X", "P", "necessary_margin", "min_pairing"]
    passed = worst <= cfg.tol("margin")
    body = {"alpha_list": alphas, "t_max": args.t_max, "steps": args.steps,
            "rows": len(rows), "max_margin_deviation": worst,
            "checks": {"margin_closed_form": passed}}
    _emit(args, cfg, "transport_sweep", _envelope("transport-sweep", cfg, passed, body),
          _csv_text(header, rows))
    return EXIT_OK if passed else EXIT_FAIL


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value configuration file")
    common.add_argument("--out", metavar="DIR", help="directory for JSON/CSV reports")
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--csv", action="store_true", help="print CSV data where available")
    common.add_argument("--threads", type=int, metavar="K", help="BLAS/LAPACK thread limit")
    common.add_argument("--seed", type=int, metavar="INT", help="override the configured seed")

    p = argparse.ArgumentParser(prog="kappa-causal", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-triple", parents=[common], help="Krein, time-function and spectrum checks")
    sub.add_parser("algebra-check", parents=[common], help="algebra laws and the commutative-limit sweep")
    c = sub.add_parser("causal-test", parents=[common], help="decide the causal order of two states")
    c.add_argument("state1", help="c,w,k or a saved state file")
    c.add_argument("state2", help="c,w,k, transport:alpha,t or a saved state file")
    t = sub.add_parser("transport-sweep", parents=[common], help="phase-momentum transport as plot data")
    t.add_argument("--alpha", default="0.5,1,2", help="comma-separated alpha values")
    t.add_argument("--t-max", type=float, default=1.0)
    t.add_argument("--steps", type=int, default=10)
    return p


COMMANDS = {"verify-triple": cmd_verify_triple, "algebra-check": cmd_algebra_check,
            "causal-test": cmd_causal_test, "transport-sweep": cmd_transport_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.seed is not None:
            cfg = cfg.with_overrides(seed=args.seed)
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        with threadpool_limits(limits=args.threads):
            return COMMANDS[args.command](args, cfg)
    except (ConfigError, InputError) as exc:
        print(f"kappa-causal: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KappaError as exc:
        print(f"kappa-causal: check aborted: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

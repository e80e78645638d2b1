"""Command-line interface.

Every subcommand writes CSV data plus a JSON document whose ``metadata``
block echoes the version and the effective configuration. Wall times go to
a separate ``<name>.timings.json`` so the data files are byte-identical for
identical configurations.

Exit codes: 0 when every internal invariant held, 2 on an invariant failure
(a ``failure.json`` record is written), 64 on a usage or domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import io as sio
from .so3_kinematics import DomainError

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_USAGE = 64

ALPHA_KEYS = ("alpha", "rbar", "C", "r0")
K_INDEX = {"kM": 0, "kM-1": 1, "kM-2": 2}
# not part of the echoed config: they do not change any computed value
NOT_ECHOED = ("config", "out_dir", "func")


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- run bookkeeping ---------------------------------------------------------------


class Run:
    def __init__(self, name: str, cfg: dict):
        self.name = name
        self.cfg = cfg
        self.out = Path(cfg["out_dir"])
        self.timings: dict = {}
        self.failures: list = []
        self._t0 = time.perf_counter()

    def check(self, label: str, ok: bool, **detail):
        if not ok:
            self.failures.append(dict(detail, invariant=label))
        return ok

    def timed(self, label: str, fn, *a, **kw):
        t0 = time.perf_counter()
        res = fn(*a, **kw)
        self.timings[label] = time.perf_counter() - t0
        return res

    def metadata(self) -> dict:
        echo = {k: v for k, v in sorted(self.cfg.items()) if k not in NOT_ECHOED}
        return {"version": __version__, "config": echo, "timings": f"{self.name}.timings.json"}

    def csv(self, fname: str, header, rows):
        return sio.write_csv(self.out / fname, header, rows)

    def json(self, body: dict):
        doc = dict(body, metadata=self.metadata())
        return sio.write_json(self.out / f"{self.name}.json", doc)

    def finish(self) -> int:
        self.timings["total"] = time.perf_counter() - self._t0
        sio.write_json(self.out / f"{self.name}.timings.json", self.timings)
        if self.failures:
            rec = {"command": self.name, "failures": self.failures, "metadata": self.metadata()}
            sio.write_json(self.out / "failure.json", rec)
            sys.stderr.write(sio.dumps(rec))
            return EXIT_INVARIANT
        return EXIT_OK


# -- alpha specs ------------------------------------------------------------------------


def resolve_alpha(cfg: dict):
    """(alpha, regime hint) from exactly one alpha form."""
    from .params import alpha_from_c, alpha_from_rbar, alpha_r0

    given = [k for k in ALPHA_KEYS if cfg.get(k) not in (None, False)]
    if len(given) != 1:
        raise UsageError("give exactly one of --alpha, --rbar, --C, --r0")
    form = given[0]
    if form == "alpha":
        if cfg.get("k") is not None:
            raise UsageError("--k does not combine with --alpha")
        return float(cfg["alpha"]), None
    if cfg.get("k") is None:
        raise UsageError(f"--{form} needs --k")
    k = int(cfg["k"])
    if k < 1:
        raise UsageError("--k must be positive")
    if form == "rbar":
        return alpha_from_rbar(k, float(cfg["rbar"])), "C1"
    if form == "C":
        return alpha_from_c(k, float(cfg["C"])), "C2"
    return alpha_r0(k), "C3"


def _add_alpha(p):
    g = p.add_argument_group("alpha (exactly one form)")
    g.add_argument("--alpha", type=float, help="alpha directly")
    g.add_argument("--rbar", type=float, help="alpha = pi / (2 (k + rbar))")
    g.add_argument("--C", type=float, help="remainder r = C alpha")
    g.add_argument("--r0", action="store_true", default=None, help="remainder r = 0, alpha = pi / (2k)")
    g.add_argument("--k", type=int, help="integer part k used by --rbar, --C, --r0")


def _positive(name: str, x):
    if x is None or not (float(x) > 0.0):
        raise UsageError(f"{name} must be positive")
    return x


# -- commands ---------------------------------------------------------------------------


def cmd_front(cfg: dict) -> int:
    from .front_engine import ANALYTIC_LIMIT, extremal_front, front_residual, front_topology
    from .params import AlphaParam

    alpha, hint = resolve_alpha(cfg)
    ap = AlphaParam.from_alpha(alpha)
    k = ap.k_max - K_INDEX[cfg["k_index"]]
    run = Run("front", cfg)
    fr = run.timed("front", extremal_front, ap, k, int(cfg["n"]))
    verdict, polar = front_topology(fr)
    tol = _positive("--tol", cfg["tol"])
    run.check("glue", fr.glue_error() <= tol, value=fr.glue_error(), tol=tol)
    run.check("mirror", fr.mirror_error() <= tol, value=fr.mirror_error(), tol=tol)
    norms = np.abs(np.linalg.norm(fr.closed_curve(), axis=1) - 1.0).max()
    run.check("sphere_norm", norms <= tol, value=float(norms), tol=tol)
    body = {"front": fr.metadata(), "topology": verdict, "polar": polar, "regime_hint": hint,
            "k_max": ap.k_max, "glue_error": fr.glue_error(), "mirror_error": fr.mirror_error()}
    if k == ap.k_max and alpha <= ANALYTIC_LIMIT:
        body["series_residual"] = float(front_residual(ap.remainder, [alpha])[0])
        body["series_residual_ds"] = float(front_residual(ap.remainder, [alpha], derivative=True)[0])
    run.csv("front.csv", ["branch", "s", "x1", "x2", "x3", "t1", "t2", "t3"], fr.rows())
    run.json(body)
    return run.finish()


def cmd_switching_curves(cfg: dict) -> int:
    from .extremal_flow import switching_curve_points, switching_curve_verdict
    from .params import AlphaParam

    alpha, _ = resolve_alpha(cfg)
    ap = AlphaParam.from_alpha(alpha)
    k_top = ap.k_max - K_INDEX[cfg["k_index"]]
    tol = _positive("--tol", cfg["tol"])
    run = Run("switching_curves", cfg)
    s = np.linspace(0.0, np.pi, int(cfg["n"]))[1:]
    rows, summary = [], []
    for k in range(1, k_top + 1):
        for eps in (1, -1):
            p, dp, t = switching_curve_points(k, eps, s, alpha)
            err = float(np.abs(np.linalg.norm(p, axis=1) - 1.0).max())
            run.check("sphere_norm", err <= tol, k=k, eps=eps, value=err, tol=tol)
            run.check("tangent", float(np.abs(np.einsum("ij,ij->i", p, dp)).max()) <= tol, k=k, eps=eps)
            mid = switching_curve_verdict(k, eps, np.pi / 2, alpha)
            end = switching_curve_verdict(k, eps, np.pi, alpha)
            summary.append({"k": k, "eps": eps, "verdict_mid": mid, "verdict_end": list(end)})
            rows += [(k, eps, s[i], *p[i], *dp[i], t[i]) for i in range(len(s))]
    run.csv("switching_curves.csv", ["k", "eps", "s", "x1", "x2", "x3", "t1", "t2", "t3", "time"], rows)
    run.json({"alpha": alpha, "k_max": ap.k_max, "curves": summary})
    return run.finish()


def cmd_pendulum(cfg: dict) -> int:
    from . import oracle
    from .pendulum_synthesis import min_time, overlap_locus_residual, pendulum_synthesis, semicircle_verdicts

    rho = float(_positive("--rho", cfg["rho"]))
    tol = _positive("--tol", cfg["tol"])
    run = Run("pendulum", cfg)
    syn = run.timed("synthesis", pendulum_synthesis, rho, int(cfg["n"]))
    res = max(overlap_locus_residual(z, rho) for z in syn.z)
    run.check("overlap_locus", res <= tol, value=res, tol=tol)
    body = {
        "rho": rho,
        "origin_time": min_time(0j, rho),
        "locus_residual": res,
        "semicircles": [{"family": c.family, "center": c.center, "orient": c.orient, "optimal": c.optimal}
                        for c in syn.semicircles],
        "semicircle_verdicts": sorted(set(semicircle_verdicts(rho))),
    }
    run.csv("pendulum_overlap.csv", ["s", "s_prime", "t", "z1", "z2"], syn.rows())
    if cfg.get("grid_h"):
        h = float(_positive("--grid-h", cfg["grid_h"]))
        dt = float(_positive("--dt", cfg["dt"] or h))
        gm = run.timed("oracle", oracle.pendulum_grid_oracle, rho, h, dt)
        errs = oracle.pendulum_errors(gm, oracle.probe_points(rho, int(cfg["n_probe"]), int(cfg["seed"])))
        c = float(np.abs(errs).max() / (h + dt))
        body["oracle"] = {"h": h, "dt": dt, "max_error": float(np.abs(errs).max()), "c": c}
        run.check("oracle_finite", bool(np.isfinite(c)), value=c)
        run.csv("pendulum_value_map.csv", ["z1", "z2", "time", "control"], gm.rows())
    run.json(body)
    return run.finish()


def cmd_cutlocus(cfg: dict) -> int:
    from .cut_locus_solver import gamma_o_alpha
    from .params import alpha_from_rbar

    if not cfg.get("rbar"):
        raise UsageError("cutlocus needs --rbar (one or more values)")
    ks = [int(k) for k in cfg["k_list"]]
    run = Run("cutlocus", cfg)
    reports = []
    for rb in cfg["rbar"]:
        rb = float(rb)
        table = []
        for k in ks:
            a = alpha_from_rbar(k, rb)
            curve = run.timed(f"rbar={rb:g},k={k}", gamma_o_alpha, a)
            run.csv(f"cutlocus_rbar{rb:g}_k{k}.csv", ["s", "s_prime", "t", "z1", "z2", "residual", "iters"], curve.rows())
            table.append({"k": k, "alpha": a, "hausdorff": curve.hausdorff, "gaps": curve.gaps,
                          "endpoints": [complex(z) for z in curve.endpoints]})
        hd = [row["hausdorff"] for row in table]
        ok = all(hd[i] > hd[i + 1] for i in range(len(hd) - 1))
        run.check("hausdorff_decreasing", ok, rbar=rb, hausdorff=hd)
        ratios = [hd[i] / hd[i + 1] for i in range(len(hd) - 1)]
        reports.append({"rbar": rb, "table": table, "ratios": ratios, "decreasing": ok})
    run.json({"reports": reports})
    return run.finish()


def cmd_classify(cfg: dict) -> int:
    from .limit_case_analysis import classify

    alpha, hint = resolve_alpha(cfg)
    run = Run("classify", cfg)
    rep = run.timed("classify", classify, alpha, hint)
    run.json({"report": rep.to_dict()})
    return run.finish()


def cmd_oracle(cfg: dict) -> int:
    from . import oracle

    run = Run("oracle", cfg)
    seed = int(cfg["seed"])
    if cfg["kind"] == "pendulum":
        rho = float(_positive("--rho", cfg["rho"]))
        h = float(_positive("--grid-h", cfg["grid_h"] or oracle.DEFAULT_H))
        dt = float(_positive("--dt", cfg["dt"] or h))
        gm = run.timed("oracle", oracle.pendulum_grid_oracle, rho, h, dt)
        errs = oracle.pendulum_errors(gm, oracle.probe_points(rho, int(cfg["n_probe"]), seed))
        res = float(np.abs(errs).max())
        body = {"kind": "pendulum", "rho": rho, "h": h, "dt": dt, "max_error": res, "c": res / (h + dt)}
    else:
        from .cut_locus_solver import sigma_radius

        alpha, _ = resolve_alpha(cfg)
        h = float(_positive("--grid-h", cfg["grid_h"] or 0.02))
        rmax = float(np.max(sigma_radius(np.linspace(0, 2 * np.pi, 721), alpha)))
        box = oracle.CellBox.square(1.1 * rmax, h)
        gm = run.timed("oracle", oracle.sphere_family_oracle, alpha, box, int(cfg["n_si"]), int(cfg["n_sf"]))
        c_center, at_arg = oracle.sphere_probe_errors(gm, oracle.sphere_probe_points(alpha, int(cfg["n_probe"]), seed), alpha)
        c = float(np.max(np.abs(c_center)))
        body = {"kind": "sphere", "alpha": alpha, "cell": h, "c": c, "argmin_max_error": float(np.max(np.abs(at_arg))),
                "unreached_probes": int(np.isnan(c_center).sum())}
    body["stats"] = {k: v for k, v in gm.stats.items() if k not in ("backend", "threads")}
    run.timings["backend"] = gm.stats.get("backend")
    run.check("c_finite", bool(np.isfinite(body["c"])), value=body["c"])
    run.csv("value_map.csv", ["z1", "z2", "time", "control"], gm.rows())
    run.json(body)
    return run.finish()


def cmd_verify(cfg: dict) -> int:
    from . import acceptance

    run = Run("verify", cfg)
    results = acceptance.run_all(cfg.get("criteria"))
    out = []
    for r in results:
        print(r.line())
        run.timings[f"criterion_{r.number}"] = r.elapsed
        run.check(f"criterion_{r.number}", r.passed, checks=r.metrics.get("checks"))
        out.append({"number": r.number, "title": r.title, "passed": r.passed, "budget": r.budget,
                    "metrics": r.metrics})
    run.json({"criteria": out, "tolerances": acceptance.TOL})
    return run.finish()


# -- parser -----------------------------------------------------------------------------


def build_parser() -> Parser:
    p = Parser(prog="s2tos", description="Time-optimal synthesis for x' = (F + uG)x on the sphere.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, alpha=True):
        sp.add_argument("--config", help="JSON file of option values; flags override it")
        sp.add_argument("--out-dir", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized probe selection")
        sp.add_argument("--tol", type=float, default=1e-9, help="invariant tolerance")
        if alpha:
            _add_alpha(sp)

    sp = sub.add_parser("front", help="extremal front at k pi")
    common(sp)
    sp.add_argument("--k-index", choices=sorted(K_INDEX), default="kM")
    sp.add_argument("--n", type=int, default=2048, help="samples per branch")
    sp.set_defaults(func=cmd_front)

    sp = sub.add_parser("switching-curves", help="switching curves C_k^eps, k = 1 .. k-index")
    common(sp)
    sp.add_argument("--k-index", choices=sorted(K_INDEX), default="kM")
    sp.add_argument("--n", type=int, default=129)
    sp.set_defaults(func=cmd_switching_curves)

    sp = sub.add_parser("pendulum", help="limit pendulum synthesis")
    common(sp, alpha=False)
    sp.add_argument("--rho", type=float, default=1.0)
    sp.add_argument("--n", type=int, default=401)
    sp.add_argument("--grid-h", type=float, help="also run the grid oracle at this spacing")
    sp.add_argument("--dt", type=float)
    sp.add_argument("--n-probe", type=int, default=100)
    sp.set_defaults(func=cmd_pendulum)

    sp = sub.add_parser("cutlocus", help="overlap curves and Hausdorff table")
    common(sp, alpha=False)
    sp.add_argument("--rbar", type=float, nargs="+")
    sp.add_argument("--k-list", type=int, nargs="+", default=[10, 20, 40])
    sp.set_defaults(func=cmd_cutlocus)

    sp = sub.add_parser("classify", help="regime report")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("oracle", help="grid value map")
    common(sp)
    sp.add_argument("--kind", choices=("pendulum", "sphere"), default="pendulum")
    sp.add_argument("--rho", type=float, default=1.0)
    sp.add_argument("--grid-h", type=float)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--n-si", type=int, default=2000)
    sp.add_argument("--n-sf", type=int, default=500)
    sp.add_argument("--n-probe", type=int, default=100)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("verify", help="run the acceptance criteria")
    common(sp, alpha=False)
    sp.add_argument("--criteria", type=int, nargs="+", choices=range(1, 9), metavar="N")
    sp.set_defaults(func=cmd_verify)
    return p


def _load_config(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def effective_config(argv) -> dict:
    """Defaults, then the config file, then flags given on the command line."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    if not ns.config:
        return vars(ns)
    file_cfg = _load_config(ns.config)
    base = vars(ns)
    unknown = sorted(set(file_cfg) - set(base) - {"command"})
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    # a flag marks itself by differing from the parser default
    sub_defaults = vars(parser.parse_args([ns.command]))
    cli_alpha = any(base.get(k) != sub_defaults.get(k) for k in ALPHA_KEYS)
    cfg = dict(base)
    for key, val in file_cfg.items():
        if key == "command":
            continue
        if cli_alpha and key in ALPHA_KEYS:
            continue
        if base.get(key) == sub_defaults.get(key):
            cfg[key] = val
    return cfg


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = effective_config(argv)
        return cfg["func"](cfg)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, DomainError) as exc:
        sys.stderr.write(f"s2tos: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

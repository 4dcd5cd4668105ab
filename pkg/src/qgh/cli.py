"""Command-line front end: ``qgh <command> ...``.

Results go to stdout (or ``--out``) as sorted JSON or CSV; a short human
summary goes to stderr.  Every number carries a provenance tag:
"exact-lp" for LP-certified values, "window-lower-bound" for window
compressions and "sampled-estimate" for anything drawn from samples.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import DEFAULT
from .errors import CheckFailed, InputError, NumericalFailure, QGHError

EXACT, WINDOW, SAMPLED = "exact-lp", "window-lower-bound", "sampled-estimate"


def tagged(value, provenance: str) -> dict:
    return {"value": _plain(value), "provenance": provenance}


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if np.isfinite(v) else str(v)
    return v


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    tol: float = DEFAULT.tol_lp
    window_max: int = DEFAULT.window_max
    grid: int = DEFAULT.grid
    sphere_samples: int = DEFAULT.torus_directions
    seed: int = 0
    out: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError("--tol must be positive")
        if self.window_max < 1 or self.grid < 1 or self.sphere_samples < 1:
            raise InputError("window, grid and sample counts must be positive")


# ---------------------------------------------------------------------------
# input files


def _load(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc.msg})") from exc


def _metric(path: str):
    from .classical import FiniteMetricSpace

    return FiniteMetricSpace.from_json(_load(path))


def _quantum(path: str):
    """A metric space file, or ``{"space": {...}, "lip": {...}}`` with a polyhedral Lip-norm."""
    from . import lipnorm, ouspace
    from .classical import FiniteMetricSpace, embed_cqms

    doc = _load(path)
    if "dist" in doc:
        return embed_cqms(FiniteMetricSpace.from_json(doc))
    if "space" in doc and "lip" in doc:
        A = ouspace.from_json(doc["space"])
        return A, lipnorm.from_json(doc["lip"], A)
    raise InputError(f"{path}: expected a metric space or a space with a Lip-norm")


def _bridge(doc: dict, A, B):
    from .bridges import Bridge, make_bridge

    doc = dict(doc)
    recipe = doc.pop("recipe", None)
    if recipe is None:
        raise InputError("bridge file needs a 'recipe'")
    if recipe == "custom":
        return Bridge(A, B, np.asarray(doc["functionals"], float))
    if recipe == "to_scalars":
        return make_bridge(recipe, A, **doc)
    return make_bridge(recipe, A, B, **doc)


# ---------------------------------------------------------------------------
# commands


def cmd_appendix1(cfg: RunConfig):
    from .bridges import distq_lower, quotient_doubling_upper
    from .classical import appendix1_instance, embed_cqms, gh_distance
    from .lipnorm import dual_seminorm, radius_diameter, rho

    inst = appendix1_instance()
    L = inst.L
    y = np.eye(3)
    _, LZ = embed_cqms(inst.Z)
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(100):
        lam = rng.normal(size=3)
        lam -= lam.mean()
        worst = max(worst, abs(dual_seminorm(L, lam, cfg.tol) - abs(lam[0]) - abs(lam[2])))
    upper = quotient_doubling_upper(L, np.eye(3), inst.K1)
    lower = distq_lower(L, LZ)
    values = {
        "rho_Y(y1,y3)": (rho(L, y[0], y[2]), EXACT),
        "rho_Z(z1,z2)": (rho(LZ, np.eye(2)[0], np.eye(2)[1]), EXACT),
        "diam Y": (radius_diameter(L)[1], EXACT),
        "diam Z": (radius_diameter(LZ)[1], EXACT),
        "rho(w1,w2)": (rho(L, inst.w1, inst.w2), EXACT),
        "rho(y1,w1)": (rho(L, y[0], inst.w1), EXACT),
        "rho(y2,mid w)": (rho(L, y[1], (inst.w1 + inst.w2) / 2), EXACT),
        "dist_GH": (gh_distance(inst.Y, inst.Z).value, EXACT),
        "dist_q": (upper, EXACT),
    }
    checks = {k: bool(abs(v - inst.expected[k]) <= (1e-6 if k == "dist_q" else 1e-9)) for k, (v, _) in values.items()}
    checks["L' = |l1| + |l3|"] = bool(worst <= 1e-9)
    checks["dist_q lower"] = bool(abs(lower - 0.5) <= 1e-9)
    result = {
        "command": "appendix1",
        "values": {k: tagged(v, p) for k, (v, p) in values.items()},
        "dist_q_bracket": tagged([lower, upper], EXACT),
        "dual_seminorm_max_error": tagged(worst, EXACT),
        "checks": checks,
    }
    lines = [f"{'PASS' if ok else 'FAIL'}  {k}" for k, ok in checks.items()]
    lines.append(f"gh = {values['dist_GH'][0]:.12g}, dist_q in [{lower:.9g}, {upper:.9g}]")
    return result, lines, all(checks.values())


def cmd_gh(cfg: RunConfig):
    from .classical import EXACT_CAP, gh_distance

    X, Y = _metric(cfg.inputs[0]), _metric(cfg.inputs[1])
    res = gh_distance(X, Y, exact=len(X) * len(Y) <= EXACT_CAP, seed=cfg.seed)
    prov = EXACT if res.exact else SAMPLED
    result = {"command": "gh", "gh": tagged(res.value, prov), "exact": res.exact,
              "correspondence": [list(p) for p in sorted(res.correspondence)]}
    return result, [f"dist_GH = {res.value:.12g} ({'exact' if res.exact else 'local search'})"], True


def cmd_distq(cfg: RunConfig, bridge_path: str, validate: int):
    from .bridges import certify

    A, LA = _quantum(cfg.inputs[0])
    B, LB = _quantum(cfg.inputs[1])
    N = _bridge(_load(bridge_path), A, B)
    cert = certify(LA, LB, N, validate_samples=validate, seed=cfg.seed)
    diag = dict(cert.diagnostics)
    ok = diag.get("bridge_ok", True)
    result = {"command": "distq", "upper": tagged(cert.upper, EXACT), "lower": tagged(cert.lower, EXACT),
              "recipe": N.recipe, "gap": tagged(diag.pop("gap"), EXACT),
              "validation": {k: tagged(v, SAMPLED) if isinstance(v, float) else _plain(v)
                             for k, v in diag.items() if k != "recipe"}}
    lines = [f"dist_q in [{cert.lower:.9g}, {cert.upper:.9g}] via {N.recipe} bridge"]
    if not ok:
        lines.append("bridge failed validation")
    return result, lines, bool(ok)


def cmd_scv(cfg: RunConfig, eps: float, depth: int):
    from .statemetric import StateMetricContext, scv

    _, L = _quantum(cfg.inputs[0])
    b = scv(StateMetricContext(L), eps, depth=depth)
    result = {"command": "scv", "eps": eps, "upper": tagged(b.upper, EXACT), "lower": tagged(b.lower, EXACT),
              "candidates": b.candidates, "depth": depth}
    return result, [f"{b.lower} <= Scv(eps={eps:g}) <= {b.upper} (greedy net over {b.candidates} candidates)"], True


def cmd_fejer(cfg: RunConfig, d: int, n_max: int, length: str):
    from .fejer import fejer_table

    rows = fejer_table(d, n_max, length, cfg.grid)
    result = {"command": "fejer-table", "d": d, "length": length, "grid": cfg.grid,
              "rows": [{"n": r["n"], "support_size": r["support_size"], "delta": tagged(r["delta"], SAMPLED),
                        "residual": r["residual"]} for r in rows]}
    table = [["n", "support_size", "delta", "residual", "provenance"]]
    table += [[r["n"], r["support_size"], repr(r["delta"]), repr(r["residual"]), SAMPLED] for r in rows]
    lines = [f"n={r['n']:2d}  |G_n|={r['support_size']:4d}  delta={r['delta']:.6f} ± {r['residual']:.1e}" for r in rows]
    return result, lines, True, table


def cmd_torus(cfg: RunConfig, d, n, theta0, steps, step, eps, window):
    from .qtorus import torus_sweep

    samples = cfg.sphere_samples if cfg.sphere_samples != DEFAULT.torus_directions else 32
    rows = torus_sweep(d, n, theta0, steps, step, eps, window=window, sphere_samples=samples, seed=cfg.seed)
    result = {"command": "torus-sweep", "window": window, "sphere_samples": samples,
              "rows": [{k: (tagged(v, SAMPLED) if isinstance(v, float) and k not in ("theta", "psi", "eps") else _plain(v))
                        for k, v in r.items() if k != "provenance"} for r in rows]}
    keys = ["theta", "psi", "n", "eps", "residual", "certificate", "hausdorff_estimate", "density_residual",
            "full_chain", "bridge_valid"]
    table = [keys + ["provenance"]] + [[repr(r[k]) if isinstance(r[k], float) else r[k] for k in keys] + [SAMPLED]
                                        for r in rows]
    lines = [f"theta={r['theta']:.4f} psi={r['psi']:.4f}  estimate {r['certificate']:.6g}  "
             f"residual {r['residual']:+.3g}" for r in rows]
    return result, lines, True, table


def cmd_dirac(cfg: RunConfig, samples: int):
    from .dirac import dirac_check, from_json

    X, m = from_json(_load(cfg.inputs[0]))
    rep = dirac_check(X, m, samples=samples, seed=cfg.seed)
    result = {"command": "dirac-check", "points": rep.points, "samples": rep.samples,
              "max_gap_metric": tagged(rep.max_gap_metric, EXACT), "max_gap_dense": tagged(rep.max_gap_dense, EXACT),
              "self_adjoint_residual": tagged(rep.self_adjoint, EXACT), "ok": rep.ok}
    return result, [f"|[D,f]| vs Lipschitz constant: max gap {rep.max_gap_metric:.2e}; dense {rep.max_gap_dense:.2e}"], rep.ok


def random_base_pair(dim: int, vertices: int, scale: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Two bases on the hyperplane x₀ = 1, the second a perturbation of the first."""
    V = np.hstack([np.ones((vertices, 1)), rng.uniform(-1, 1, size=(vertices, dim - 1))])
    W = V.copy()
    W[:, 1:] += scale * rng.normal(size=(vertices, dim - 1))
    return V, W


def cmd_stability(cfg: RunConfig, dim: int, vertices: int, scale: float, trials: int):
    from .statemetric import base_norm_stability_check

    rng = np.random.default_rng(cfg.seed)
    reports = []
    for _ in range(trials):
        V, W = random_base_pair(dim, vertices, scale, rng)
        reports.append(base_norm_stability_check(V, W, samples=DEFAULT.stability_samples, seed=cfg.seed))
    ok = all(r.holds for r in reports)
    result = {"command": "stability-check", "dim": dim, "vertices": vertices, "scale": scale,
              "trials": [{"delta": tagged(r.delta, SAMPLED), "eps": tagged(r.eps, SAMPLED),
                          "hausdorff": tagged(r.hausdorff, EXACT), "holds": r.holds, "applicable": r.applicable}
                         for r in reports], "ok": ok}
    lines = [f"delta={r.delta:.4g} eps={r.eps:.4g} hausdorff={r.hausdorff:.4g} {'holds' if r.holds else 'VIOLATED'}"
             for r in reports]
    return result, lines, ok


# ---------------------------------------------------------------------------
# plumbing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT.tol_lp)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--window-max", type=int, default=DEFAULT.window_max)
    common.add_argument("--grid", type=int, default=DEFAULT.grid)
    common.add_argument("--sphere-samples", type=int, default=DEFAULT.torus_directions)
    common.add_argument("--out", default=None, help="write results here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")

    p = argparse.ArgumentParser(prog="qgh", description="Quantum Gromov-Hausdorff computations at desk scale.")
    p.add_argument("--version", action="version", version=f"qgh {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("appendix1", parents=[common], help="three-point versus two-point golden example")
    s = sub.add_parser("gh", parents=[common], help="classical Gromov-Hausdorff distance")
    s.add_argument("inputs", nargs=2)
    s = sub.add_parser("distq", parents=[common], help="dist_q bracket from a bridge")
    s.add_argument("inputs", nargs=2)
    s.add_argument("--bridge", required=True)
    s.add_argument("--validate", type=int, default=32, help="random directions for the bridge check")
    s = sub.add_parser("scv", parents=[common], help="bounds on the ε-covering size of the state space")
    s.add_argument("inputs", nargs=1)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--depth", type=int, default=2)
    s = sub.add_parser("fejer-table", parents=[common], help="δₙ table for the default character")
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--n-max", type=int, default=8)
    s.add_argument("--length", choices=("euclidean", "max", "l1"), default="euclidean")
    s = sub.add_parser("torus-sweep", parents=[common], help="torus bridge estimates as θ approaches ψ")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--theta0", type=float, default=0.30)
    s.add_argument("--steps", type=int, default=6)
    s.add_argument("--step", type=float, default=0.01)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--window", type=int, default=8)
    s = sub.add_parser("dirac-check", parents=[common], help="commutator norms against Lipschitz constants")
    s.add_argument("inputs", nargs=1)
    s.add_argument("--samples", type=int, default=50)
    s = sub.add_parser("stability-check", parents=[common], help="base-norm closeness against Hausdorff distance")
    s.add_argument("--dim", type=int, default=3)
    s.add_argument("--vertices", type=int, default=6)
    s.add_argument("--scale", type=float, default=0.01)
    s.add_argument("--trials", type=int, default=5)
    return p


def _dispatch(args, cfg: RunConfig):
    c = args.command
    if c == "appendix1":
        return cmd_appendix1(cfg)
    if c == "gh":
        return cmd_gh(cfg)
    if c == "distq":
        return cmd_distq(cfg, args.bridge, args.validate)
    if c == "scv":
        return cmd_scv(cfg, args.eps, args.depth)
    if c == "fejer-table":
        return cmd_fejer(cfg, args.d, args.n_max, args.length)
    if c == "torus-sweep":
        return cmd_torus(cfg, args.d, args.n, args.theta0, args.steps, args.step, args.eps, args.window)
    if c == "dirac-check":
        return cmd_dirac(cfg, args.samples)
    if c == "stability-check":
        return cmd_stability(cfg, args.dim, args.vertices, args.scale, args.trials)
    raise InputError(f"unknown command {c!r}")


def _flatten(prefix: str, v, rows: list):
    if isinstance(v, dict) and set(v) == {"value", "provenance"} and not isinstance(v["value"], (dict, list)):
        rows.append([prefix, v["value"], v["provenance"]])
    elif isinstance(v, dict):
        for k in sorted(v):
            _flatten(f"{prefix}.{k}" if prefix else str(k), v[k], rows)
    elif isinstance(v, list):
        for i, x in enumerate(v):
            _flatten(f"{prefix}[{i}]", x, rows)
    else:
        rows.append([prefix, v, ""])


def render(result: dict, fmt: str, table=None) -> str:
    if fmt == "json":
        return json.dumps(_plain(result), sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if table is None:
        table = [["key", "value", "provenance"]]
        _flatten("", _plain(result), table)
    w.writerows(table)
    return buf.getvalue()


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.command, list(getattr(args, "inputs", []) or []), args.tol, args.window_max,
                        args.grid, args.sphere_samples, args.seed, args.out, args.fmt)
        out = _dispatch(args, cfg)
        result, lines, ok = out[:3]
        table = out[3] if len(out) > 3 else None
        text = render(result, cfg.fmt, table)
        if cfg.out:
            Path(cfg.out).write_text(text)
        else:
            sys.stdout.write(text)
        for line in lines:
            print(line, file=sys.stderr)
        return 0 if ok else 1
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except (InputError, ValueError, KeyError, TypeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (NumericalFailure, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except QGHError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main(argv=None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()

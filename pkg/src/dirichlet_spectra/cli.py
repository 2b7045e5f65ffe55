"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 a checked
inequality was violated.

Examples::

    dspec spectrum --preset path:n=3
    dspec persson --preset path:n=2001 --max-radius 200 --format csv
    dspec bounds --preset two-vertex --B 1 --A 0 --t 1
    dspec mc --preset two-vertex --estimator killed --target-set 1 --start 0 --t 1
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import NumericalError, ValidationError
from .graphs import assemble, build_graph, graph_to_dict, load_graph, restrict
from .perturbations import (
    domination_check,
    make_perturbation,
    perturbed_bound_check,
    perturbed_system,
)
from .potential import equilibrium_potential
from .spectral import (
    DENSE_THRESHOLD,
    ball_exhaustion,
    bottom_of_spectrum,
    bound_check,
    persson_sweep,
    spectrum_dense,
    tail_bound_profile,
)
from .stochastic import (
    mc_feynman_kac_potential,
    mc_hitting_laplace,
    mc_killed_semigroup,
    mc_semigroup,
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_VIOLATION = 0, 2, 3, 4
COMMANDS = ("spectrum", "persson", "bounds", "capacity", "mc", "perturb", "build")


class InequalityViolation(Exception):
    """A checked mathematical bound failed; carries the report to emit."""

    def __init__(self, payload):
        super().__init__("inequality violated")
        self.payload = payload


# -- presets -----------------------------------------------------------------


def _parse_preset(text):
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValidationError(f"preset parameter {item!r} is not key=value")
        params[key.strip()] = val.strip()
    return name.strip(), params


def _take(params, allowed):
    extra = set(params) - set(allowed)
    if extra:
        raise ValidationError(f"unknown preset parameters {sorted(extra)}")
    return {k: allowed[k](params[k]) if k in params else None for k in allowed}


def preset_graph(text):
    """Build a preset graph from ``name:key=value,...``.

    Presets: ``two-vertex``, ``path:n,weight``, ``lattice:shape=AxB,weight``,
    ``fractional1d:n,alpha,h``, ``confining:n,p,center``.
    """
    name, params = _parse_preset(text)
    if name == "two-vertex":
        _take(params, {})
        return build_graph(2, [(0, 1, 1.0)])
    if name == "path":
        p = _take(params, {"n": int, "weight": float})
        return kernels.lattice_path(p["n"] or 3, p["weight"] or 1.0)
    if name == "lattice":
        p = _take(params, {"shape": lambda s: [int(v) for v in s.split("x")], "weight": float})
        return kernels.lattice_grid(p["shape"] or [10, 10], p["weight"] or 1.0)
    if name == "fractional1d":
        p = _take(params, {"n": int, "alpha": float, "h": float})
        n = p["n"] or 11
        grid = kernels.GridSpec(1, (n,), p["h"] or 1.0 / (n - 1 if n > 1 else 1))
        return kernels.fractional_graph(grid, p["alpha"] or 1.0)
    if name == "confining":
        p = _take(params, {"n": int, "p": float, "center": int})
        n = p["n"] or 2001
        center = n // 2 if p["center"] is None else p["center"]
        return kernels.confining_potential(kernels.lattice_path(n), center, p["p"] or 2.0)
    raise ValidationError(f"unknown preset {name!r}")


# -- configuration -------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    source: dict
    params: dict = field(default_factory=dict)
    output: str | None = None
    fmt: str = "json"
    seed: int = 0
    threads: int = 1


def _ints(text):
    if text is None or text == "":
        return []
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


def _floats(text):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--input", help="graph JSON file")
    g.add_argument("--preset", help="preset graph, e.g. path:n=101")
    g.add_argument("--config", help="JSON file with option values")
    g.add_argument("--output", help="output file (default stdout)")
    g.add_argument("--format", dest="fmt", choices=["json", "csv"])
    g.add_argument("--seed", type=int)
    g.add_argument("--threads", type=int)

    parser = argparse.ArgumentParser(prog="dspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="eigenvalues of the generator")
    p.add_argument("--k", type=int, help="number of smallest eigenvalues (default all)")
    p.add_argument("--remove", help="vertices to remove first (Dirichlet restriction)")

    p = sub.add_parser("persson", parents=[common], help="ground values along an exhaustion")
    p.add_argument("--root", type=int, help="centre of the ball exhaustion (default n // 2)")
    p.add_argument("--max-radius", type=int, help="radii 0..max-radius")
    p.add_argument("--sets", help="JSON file with an explicit list of nested vertex sets")
    p.add_argument("--remove", help="vertices removed before the sweep")

    p = sub.add_parser("bounds", parents=[common], help="restriction norm bound check")
    p.add_argument("--B", dest="B", help="removed set, comma separated")
    p.add_argument("--A", dest="A", help="observation set, comma separated")
    p.add_argument("--t", type=float)
    p.add_argument("--tail-n", help="tail-set levels n, comma separated")

    p = sub.add_parser("capacity", parents=[common], help="equilibrium potential and capacity")
    p.add_argument("--B", dest="B", help="vertex set, comma separated")

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo estimators")
    p.add_argument("--samples", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--start", type=int)
    p.add_argument("--target-set", dest="target_set")
    p.add_argument("--estimator", choices=["semigroup", "killed", "hitting", "fk"])
    p.add_argument("--f", help="payoff vector (default: indicator of the start vertex)")
    p.add_argument("--potential", help="potential W for the fk estimator")

    p = sub.add_parser("perturb", parents=[common], help="Schrodinger perturbations")
    p.add_argument("--perturbation", help="JSON file {plus, minus, alpha, override_admissibility}")
    p.add_argument("--plus")
    p.add_argument("--minus")
    p.add_argument("--alpha", type=float)
    p.add_argument("--override", action="store_true", default=None)
    p.add_argument("--B", dest="B")
    p.add_argument("--A", dest="A")
    p.add_argument("--t", type=float)

    p = sub.add_parser("build", parents=[common], help="write a graph JSON file")
    p.add_argument("--kernel-config", dest="kernel_config",
                   help='JSON {"grid": {...}, "kernel": {...}}')
    return parser


_GLOBAL = {"input", "preset", "config", "output", "fmt", "seed", "threads", "command"}


def make_config(args) -> RunConfig:
    """Merge ``--config`` values into the parsed arguments and validate."""
    values = vars(args).copy()
    if values.get("config"):
        try:
            data = json.loads(Path(values["config"]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise ValidationError("config must be a JSON object")
        data = {("fmt" if k == "format" else k.replace("-", "_")): v for k, v in data.items()}
        unknown = set(data) - (set(values) - {"command", "config"})
        if unknown:
            raise ValidationError(f"unknown config keys {sorted(unknown)}")
        for k, v in data.items():
            if values.get(k) is None:
                values[k] = v
    threads = values.get("threads") or 1
    if os.environ.get("DSPEC_THREADS"):
        try:
            threads = int(os.environ["DSPEC_THREADS"])
        except ValueError as exc:
            raise ValidationError("DSPEC_THREADS must be an integer") from exc
    if values.get("input") and values.get("preset"):
        raise ValidationError("use either --input or --preset, not both")
    params = {k: v for k, v in values.items() if k not in _GLOBAL}
    return RunConfig(
        command=values["command"],
        source={"input": values.get("input"), "preset": values.get("preset")},
        params=params,
        output=values.get("output"),
        fmt=values.get("fmt") or "json",
        seed=0 if values.get("seed") is None else int(values["seed"]),
        threads=max(1, int(threads)),
    )


def _graph(cfg):
    if cfg.source["input"]:
        return load_graph(cfg.source["input"])
    if cfg.source["preset"]:
        return preset_graph(cfg.source["preset"])
    raise ValidationError("a graph source is required: --input or --preset")


# -- commands ----------------------------------------------------------------


def _csv(header, rows):
    lines = [",".join(header)]
    lines += [",".join(repr(float(v)) if isinstance(v, (float, np.floating)) else str(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def cmd_spectrum(cfg):
    fs = assemble(_graph(cfg))
    system = restrict(fs, _ints(cfg.params.get("remove"))) if cfg.params.get("remove") else fs
    k = cfg.params.get("k")
    if k is None:
        summary = spectrum_dense(system.S, threshold=max(DENSE_THRESHOLD, system.n))
    else:
        k = int(k)
        if not 1 <= k <= system.n:
            raise ValidationError(f"--k must lie in 1..{system.n}")
        summary = bottom_of_spectrum(system.S, k)
    if cfg.fmt == "csv":
        rows = zip(range(len(summary.eigenvalues)), summary.eigenvalues.tolist(),
                   summary.residuals.tolist())
        return _csv(["index", "eigenvalue", "residual"], rows)
    return summary.to_dict()


def _exhaustion(cfg, graph):
    if cfg.params.get("sets"):
        try:
            sets = json.loads(Path(cfg.params["sets"]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read exhaustion sets: {exc}") from exc
        return [list(K) for K in sets]
    if cfg.params.get("max_radius") is None:
        return []
    root = cfg.params.get("root")
    root = graph.n // 2 if root is None else int(root)
    return ball_exhaustion(graph, root, range(int(cfg.params["max_radius"]) + 1))


def cmd_persson(cfg):
    g = _graph(cfg)
    system = assemble(g)
    if cfg.params.get("remove"):
        system = restrict(system, _ints(cfg.params["remove"]))
    sweep = persson_sweep(system, _exhaustion(cfg, g), workers=cfg.threads)
    summary = sweep.to_dict()
    if not sweep.monotone_flag:
        raise InequalityViolation(summary)
    if cfg.fmt == "csv":
        print(json.dumps({"lambda0": sweep.lambda0, "monotone": sweep.monotone_flag}),
              file=sys.stderr)
        return sweep.to_csv()
    summary["trace"] = [
        {"n": i, "size": len(K), "lambda_n": float(lam), "residual": float(res)}
        for i, (K, lam, res) in enumerate(zip(sweep.exhaustion, sweep.ground_values, sweep.residuals))
    ]
    return summary


def _require(cfg, key, conv=lambda v: v):
    val = cfg.params.get(key)
    if val is None:
        raise ValidationError(f"--{key.replace('_', '-')} is required")
    return conv(val)


def cmd_bounds(cfg):
    fs = assemble(_graph(cfg))
    B = _require(cfg, "B", _ints)
    A = _ints(cfg.params.get("A"))
    t = _require(cfg, "t", float)
    out = bound_check(fs, B, A, t).to_dict()
    ok = out["passed"]
    if cfg.params.get("tail_n"):
        ns = _ints(cfg.params["tail_n"])
        tails = tail_bound_profile(fs, B, t, ns)
        out["tail"] = [
            {"n": n, "lhs": lhs, "rhs": rhs, "pass": lhs <= rhs + 1e-10}
            for n, (lhs, rhs) in zip(ns, tails)
        ]
        ok = ok and all(row["pass"] for row in out["tail"])
    if not ok:
        raise InequalityViolation(out)
    return out


def cmd_capacity(cfg):
    fs = assemble(_graph(cfg))
    return equilibrium_potential(fs, _require(cfg, "B", _ints)).to_dict()


def cmd_mc(cfg):
    fs = assemble(_graph(cfg))
    est = cfg.params.get("estimator") or "semigroup"
    n = int(cfg.params.get("samples") or 10_000)
    x = int(_require(cfg, "start"))
    f = _floats(cfg.params.get("f"))
    if f is None:
        f = np.zeros(fs.n)
        if 0 <= x < fs.n:
            f[x] = 1.0
    B = _ints(cfg.params.get("target_set"))
    kw = {"workers": cfg.threads}
    if est == "hitting":
        res = mc_hitting_laplace(fs, B, x, n, cfg.seed, **kw)
    else:
        t = _require(cfg, "t", float)
        if est == "semigroup":
            res = mc_semigroup(fs, f, x, t, n, cfg.seed, **kw)
        elif est == "killed":
            res = mc_killed_semigroup(fs, B, f, x, t, n, cfg.seed, **kw)
        else:
            W = _floats(cfg.params.get("potential")) or np.zeros(fs.n)
            res = mc_feynman_kac_potential(fs, B, W, f, x, t, n, cfg.seed, **kw)
    d = res.to_dict()
    return {k: d[k] for k in ("mean", "std_error", "n", "seed")}


def cmd_perturb(cfg):
    fs = assemble(_graph(cfg))
    spec = {}
    if cfg.params.get("perturbation"):
        try:
            spec = json.loads(Path(cfg.params["perturbation"]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read perturbation: {exc}") from exc
        unknown = set(spec) - {"plus", "minus", "alpha", "override_admissibility"}
        if unknown:
            raise ValidationError(f"unknown perturbation keys {sorted(unknown)}")
    plus = _floats(cfg.params.get("plus")) or spec.get("plus")
    minus = _floats(cfg.params.get("minus")) or spec.get("minus")
    alpha = cfg.params.get("alpha") or spec.get("alpha", 1.0)
    override = bool(cfg.params.get("override") or spec.get("override_admissibility", False))
    pert = make_perturbation(fs, plus, minus, float(alpha))
    ps = perturbed_system(fs, pert, override=override)
    out = pert.to_dict()
    out["override"] = override
    out["lambda_min"] = float(bottom_of_spectrum(ps.S, 1).eigenvalues[0])
    ok = True
    if cfg.params.get("B"):
        B = _ints(cfg.params["B"])
        t = float(cfg.params.get("t") or 1.0)
        dom = domination_check(fs, B, pert, np.ones(fs.n), t)
        out["domination_max_violation"] = dom.max_violation
        ok = dom.passed
        if pert.admissible_flag:
            pb = perturbed_bound_check(fs, B, _ints(cfg.params.get("A")), pert, t)
            out["bound"] = pb.to_dict()
            ok = ok and pb.passed
    if not ok:
        raise InequalityViolation(out)
    return out


def cmd_build(cfg):
    if cfg.params.get("kernel_config"):
        try:
            data = json.loads(Path(cfg.params["kernel_config"]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read kernel config: {exc}") from exc
        if set(data) - {"grid", "kernel"}:
            raise ValidationError("kernel config needs exactly 'grid' and 'kernel'")
        g = kernels.kernel_from_config(data["grid"], data["kernel"])
    else:
        g = _graph(cfg)
    return graph_to_dict(g)


HANDLERS = {
    "spectrum": cmd_spectrum,
    "persson": cmd_persson,
    "bounds": cmd_bounds,
    "capacity": cmd_capacity,
    "mc": cmd_mc,
    "perturb": cmd_perturb,
    "build": cmd_build,
}


def _render(payload):
    if isinstance(payload, str):
        return payload
    return json.dumps(payload, indent=2) + "\n"


def _emit(text, output):
    if output is None:
        sys.stdout.write(text)
        return
    target = Path(output)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        cfg = make_config(args)
        payload = HANDLERS[cfg.command](cfg)
    except InequalityViolation as exc:
        _emit(_render(exc.payload), cfg.output)
        print("bound violated", file=sys.stderr)
        return EXIT_VIOLATION
    except (ValidationError, json.JSONDecodeError, FileNotFoundError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(_render(payload), cfg.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Subcommands: law, glogpd, model, distance, rate, fig1.  Scalar queries print
one JSON object; experiment reports are written as CSV/JSON/gnuplot text with
matplotlib PNG figures rendered alongside (disable with --no-figures).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

import numpy as np

from . import distances, experiments, figures
from .glogpd import (
    GLogParetoSpec,
    VonMisesSpec,
    density_table,
    glogpd_cdf,
    glogpd_pdf,
    vonmises_cdf,
    vonmises_pdf,
)
from .laws import (
    PMaxLawSpec,
    cdf,
    derive_norming,
    kth_limit_cdf,
    pdf,
    quantile,
    tabulated_norming,
)
from .models import ExactMaxLaw, exact_kth_cdf, exact_max_cdf, sample_top_k

_EXIT_OK = 0
_EXIT_ERROR = 1
_EXIT_NOT_CONVERGED = 2


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _law_spec(args) -> PMaxLawSpec:
    return PMaxLawSpec(args.family, args.alpha)


def _add_family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", type=int, required=True, help="family index 1..6")
    p.add_argument("--alpha", type=float, default=None, help="shape alpha (families 1, 2, 4, 5)")


def _add_base_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--base", default="zero", choices=experiments.BASE_CHOICES, help="base model")
    p.add_argument("--L", type=float, default=1.0, help="envelope scale L")
    p.add_argument("--delta", type=float, default=0.5, help="envelope exponent delta")
    p.add_argument("--x0", type=float, default=None, help="canonical truncation point in (0, 1)")
    p.add_argument("--sign", type=int, default=1, choices=(1, -1), help="sign of the envelope perturbation")


def _base_config(args) -> experiments.BaseConfig:
    return experiments.BaseConfig(
        g_choice=args.base,
        family=args.family,
        alpha=args.alpha,
        L=args.L,
        delta=args.delta,
        sign=args.sign,
        x0=args.x0,
    )


def _cmd_law(args) -> int:
    spec = _law_spec(args)
    out = {"family": spec.family, "alpha": spec.alpha, "op": args.op}
    if args.op == "norming":
        constants = derive_norming(spec, args.n) if args.source == "derived" else tabulated_norming(spec, args.n)
        out.update({"n": args.n, "source": args.source, "value": {"a_n": constants.a_n, "b_n": constants.b_n}})
    else:
        if args.x is None:
            raise SystemExit("--x is required for this operation")
        out["x"] = args.x
        if args.op == "cdf":
            out["value"] = float(cdf(spec, args.x))
        elif args.op == "pdf":
            out["value"] = float(pdf(spec, args.x))
        elif args.op == "quantile":
            out["value"] = float(quantile(spec, args.x))
        else:  # kcdf
            out["k"] = args.k
            out["value"] = float(kth_limit_cdf(spec, args.k, args.x))
    _emit(out)
    return _EXIT_OK


def _fig1_specs(start: float, end: float):
    if start >= 1.0:
        gammas = (0.25, 0.5, 1.0, 2.0)
        return [VonMisesSpec("v1", g) for g in gammas] + [GLogParetoSpec(3)]
    if end <= 0.0:
        gammas = (-0.25, -0.5, -1.0, -2.0)
        return [VonMisesSpec("v2", g) for g in gammas] + [GLogParetoSpec(6)]
    raise SystemExit("fig1 grid must lie either in x >= 1 (v1 side) or in x <= 0 (v2 side)")


def _write_fig1(args) -> int:
    grid = np.linspace(args.grid_start, args.grid_end, args.points)
    specs = _fig1_specs(args.grid_start, args.grid_end)
    rows = density_table(specs, grid)
    if getattr(args, "table_format", "csv") == "gnuplot":
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(experiments.density_table_text(rows))
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("label,x,density\n")
            for label, x, d in rows:
                fh.write(f"{label},{x!r},{d!r}\n")
    written = [args.out]
    if not args.no_figures:
        png = os.path.splitext(args.out)[0] + ".png"
        figures.render_density_figure(rows, png)
        written.append(png)
    _emit({"op": "fig1", "rows": len(rows), "files": written})
    return _EXIT_OK


def _cmd_glogpd(args) -> int:
    if args.op == "fig1":
        return _write_fig1(args)
    if args.op == "vonmises":
        spec = VonMisesSpec(args.branch, args.gamma)
        value = float(vonmises_cdf(spec, args.x)) if args.value == "cdf" else float(vonmises_pdf(spec, args.x))
        _emit({"branch": args.branch, "gamma": args.gamma, "op": "vonmises", "x": args.x, "value": value})
        return _EXIT_OK
    spec = GLogParetoSpec(args.family, args.alpha)
    value = float(glogpd_cdf(spec, args.x)) if args.op == "cdf" else float(glogpd_pdf(spec, args.x))
    _emit({"family": spec.family, "alpha": spec.alpha, "op": args.op, "x": args.x, "value": value})
    return _EXIT_OK


def _cmd_model(args) -> int:
    base = experiments.build_base(_base_config(args))
    handle = distances._base_handle(base)
    spec = PMaxLawSpec(args.family, args.alpha)
    constants = distances.resolve_norming(spec, args.n, args.norming)
    law = ExactMaxLaw(handle, args.n, constants, args.k)
    if args.op == "exactcdf":
        value = float(exact_max_cdf(law, args.x)) if args.k == 1 else float(exact_kth_cdf(law, args.x))
        _emit({"op": "exactcdf", "base": args.base, "family": args.family, "n": args.n, "k": args.k, "x": args.x, "value": value})
        return _EXIT_OK
    draws = sample_top_k(law, args.m, args.seed)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for row in draws:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    _emit({"op": "sample", "draws": int(draws.shape[0]), "k": int(draws.shape[1]), "out": args.out})
    return _EXIT_OK


def _cmd_distance(args) -> int:
    spec = PMaxLawSpec(args.family, args.alpha)
    base = experiments.build_base(_base_config(args))
    if args.op == "bound":
        from .models import normalized_handle

        constants = distances.resolve_norming(spec, args.n, args.norming)
        handle = distances._base_handle(base)
        f_norm = normalized_handle(handle, constants)
        x0 = args.x0_bound if args.x0_bound is not None else distances._bound_x0(base, spec, args.n)
        if args.which == "max":
            bound = distances.hellinger_upper_bound(f_norm, spec, x0, args.n, c=args.c)
        else:
            bound = distances.top_k_variational_bound(
                f_norm, spec, args.k, args.n, x0, c=args.c, mc_samples=args.mc_samples, seed=args.seed
            )
        _emit({"op": "bound", "which": args.which, "n": args.n, "k": args.k, **asdict(bound)})
        return _EXIT_OK if bound.converged else _EXIT_NOT_CONVERGED
    rep = distances.exact_vs_limit(
        args.op,
        base,
        spec,
        args.n,
        k=args.k,
        norming=args.norming,
        tol=args.tol,
        c=args.c,
        mc_samples=args.mc_samples,
        seed=args.seed,
    )
    _emit(asdict(rep))
    return _EXIT_OK if rep.converged else _EXIT_NOT_CONVERGED


def _cmd_rate(args) -> int:
    cfg = experiments.ExperimentConfig.from_json(args.config)
    env_seed = os.environ.get("PMAXEVT_SEED")
    if env_seed is not None:
        from dataclasses import replace

        cfg = replace(cfg, seed=int(env_seed))
    result = experiments.rate_experiment(cfg)
    fmt = args.format
    if fmt == "auto":
        ext = os.path.splitext(args.out)[1].lower()
        fmt = {"": "csv", ".csv": "csv", ".json": "json", ".dat": "gnuplot", ".txt": "gnuplot"}.get(ext, "csv")
    experiments.report_emit(result, args.out, fmt)
    written = [args.out]
    if not args.no_figures:
        png = os.path.splitext(args.out)[0] + ".png"
        figures.render_rate_figure(result, png)
        written.append(png)
    _emit(
        {
            "op": "rate",
            "rows": len(result.rows),
            "fits": [{"kind": f.kind, "k": f.k, "slope": f.slope, "r_squared": f.r_squared} for f in result.fits],
            "all_converged": result.all_converged,
            "files": written,
        }
    )
    return _EXIT_OK if result.all_converged else _EXIT_NOT_CONVERGED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmaxevt", description="power-normalized extreme-value laws and distance experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_law = sub.add_parser("law", help="evaluate the six max-stable laws")
    p_law.add_argument("op", choices=("cdf", "pdf", "quantile", "kcdf", "norming"))
    _add_family_args(p_law)
    p_law.add_argument("--k", type=int, default=1)
    p_law.add_argument("--x", type=float, default=None, help="evaluation point (probability for quantile)")
    p_law.add_argument("--n", type=int, default=10)
    p_law.add_argument("--source", choices=("tabulated", "derived"), default="derived")
    p_law.set_defaults(func=_cmd_law)

    p_gl = sub.add_parser("glogpd", help="generalized log-Pareto distributions")
    p_gl.add_argument("op", choices=("cdf", "pdf", "vonmises", "fig1"))
    p_gl.add_argument("--family", type=int, default=3)
    p_gl.add_argument("--alpha", type=float, default=None)
    p_gl.add_argument("--x", type=float, default=None)
    p_gl.add_argument("--branch", choices=("v1", "v2"), default="v1")
    p_gl.add_argument("--gamma", type=float, default=0.0)
    p_gl.add_argument("--value", choices=("cdf", "pdf"), default="cdf", help="what to report for vonmises")
    p_gl.add_argument("--grid-start", type=float, default=1.1, dest="grid_start")
    p_gl.add_argument("--grid-end", type=float, default=10.0, dest="grid_end")
    p_gl.add_argument("--points", type=int, default=200)
    p_gl.add_argument("--out", default="fig1.csv")
    p_gl.add_argument("--table-format", choices=("csv", "gnuplot"), default="csv", dest="table_format")
    p_gl.add_argument("--no-figures", action="store_true")
    p_gl.set_defaults(func=_cmd_glogpd)

    p_model = sub.add_parser("model", help="exact finite-n laws and samplers")
    p_model.add_argument("op", choices=("exactcdf", "sample"))
    _add_family_args(p_model)
    _add_base_args(p_model)
    p_model.add_argument("--n", type=int, required=True)
    p_model.add_argument("--k", type=int, default=1)
    p_model.add_argument("--x", type=float, default=0.5)
    p_model.add_argument("--m", type=int, default=1000)
    p_model.add_argument("--seed", type=int, default=20160101)
    p_model.add_argument("--norming", choices=("tabulated", "derived"), default="derived")
    p_model.add_argument("--out", default="draws.csv")
    p_model.set_defaults(func=_cmd_model)

    p_dist = sub.add_parser("distance", help="distances between exact and limit laws, and their bounds")
    p_dist.add_argument("op", choices=("hellinger", "tv", "ks", "bound"))
    _add_family_args(p_dist)
    _add_base_args(p_dist)
    p_dist.add_argument("--n", type=int, required=True)
    p_dist.add_argument("--k", type=int, default=1)
    p_dist.add_argument("--norming", choices=("tabulated", "derived"), default="derived")
    p_dist.add_argument("--tol", type=float, default=1e-9)
    p_dist.add_argument("--c", type=float, default=1.0, help="universal constant in the bounds")
    p_dist.add_argument("--which", choices=("max", "topk"), default="max")
    p_dist.add_argument("--x0-bound", type=float, default=None, dest="x0_bound", help="bound truncation point on the limit scale")
    p_dist.add_argument("--mc-samples", type=int, default=100_000, dest="mc_samples")
    p_dist.add_argument("--seed", type=int, default=20160101)
    p_dist.set_defaults(func=_cmd_distance)

    p_rate = sub.add_parser("rate", help="distance-vs-n rate experiment from a JSON config")
    p_rate.add_argument("--config", required=True)
    p_rate.add_argument("--out", required=True)
    p_rate.add_argument("--format", choices=("auto", "csv", "json", "gnuplot"), default="auto")
    p_rate.add_argument("--no-figures", action="store_true")
    p_rate.set_defaults(func=_cmd_rate)

    p_fig = sub.add_parser("fig1", help="density tables for the glogPd families (delegates to glogpd fig1)")
    p_fig.add_argument("--grid-start", type=float, default=1.1, dest="grid_start")
    p_fig.add_argument("--grid-end", type=float, default=10.0, dest="grid_end")
    p_fig.add_argument("--points", type=int, default=200)
    p_fig.add_argument("--out", default="fig1.csv")
    p_fig.add_argument("--table-format", choices=("csv", "gnuplot"), default="csv", dest="table_format")
    p_fig.add_argument("--no-figures", action="store_true")
    p_fig.set_defaults(func=_write_fig1)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Rate experiments: distance-vs-n curves, log-log slope fits and report files.

A config describes one base model, a geometric n-grid, a k-list and the
distance kinds to evaluate.  ``rate_experiment`` computes every (n, k, kind)
cell with its matching upper bound, fits log-log slopes per (kind, k) after
dropping rows below the noise floor (value < 10x the quadrature error
estimate), and the result can be emitted as CSV, JSON or gnuplot-style text.
Identical config and seed produce byte-identical CSV/JSON output.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np

from .distances import BoundReport, DistanceReport, exact_vs_limit
from .laws import PMaxLawSpec
from .models import build_perturbed, glogpd_handle, law_handle
from .glogpd import GLogParetoSpec

__all__ = [
    "BaseConfig",
    "ExperimentConfig",
    "RateFit",
    "RateRow",
    "ExperimentResult",
    "build_base",
    "rate_experiment",
    "fit_rate",
    "report_emit",
    "parse_report_csv",
    "report_json_object",
    "validate_report_json",
    "DEFAULT_N_GRID",
]

DEFAULT_N_GRID = (10, 31, 100, 316, 1000, 3162, 10000)

BASE_CHOICES = ("zero", "uniform", "envelope", "envelope-sine", "law", "glogpd")


@dataclass(frozen=True)
class BaseConfig:
    """Which base distribution feeds the experiment.

    ``g_choice`` picks a perturbation from the catalog, or ``law``/``glogpd``
    for the unperturbed max-stable law / generalized log-Pareto df itself.
    """

    g_choice: str = "zero"
    family: int = 3
    alpha: float | None = None
    L: float = 1.0
    delta: float = 0.5
    sign: int = 1
    x0: float | None = None

    def __post_init__(self):
        if self.g_choice not in BASE_CHOICES:
            raise ValueError(f"base must be one of {BASE_CHOICES}, got {self.g_choice!r}")
        if self.g_choice == "uniform":
            # the uniform perturbation only exists at delta = 1 with L >= 1
            object.__setattr__(self, "delta", 1.0)
            object.__setattr__(self, "L", max(float(self.L), 1.0))


def build_base(cfg: BaseConfig):
    if cfg.g_choice == "law":
        return law_handle(PMaxLawSpec(cfg.family, cfg.alpha))
    if cfg.g_choice == "glogpd":
        return glogpd_handle(GLogParetoSpec(cfg.family, cfg.alpha))
    return build_perturbed(
        family=cfg.family,
        alpha=cfg.alpha,
        L=cfg.L,
        delta=cfg.delta,
        g_choice=cfg.g_choice,
        x0=cfg.x0,
        sign=cfg.sign,
    )


@dataclass(frozen=True)
class ExperimentConfig:
    base: BaseConfig = field(default_factory=BaseConfig)
    norming: str = "derived"
    n_grid: tuple[int, ...] = DEFAULT_N_GRID
    k_list: tuple[int, ...] = (1,)
    kinds: tuple[str, ...] = ("hellinger",)
    tol: float = 1e-9
    seed: int = 20160101
    c: float = 1.0
    d_star: float = 1.0
    mc_samples: int = 100_000

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        if not grid or not all(b > a for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be non-empty and strictly increasing")
        object.__setattr__(self, "n_grid", grid)
        ks = tuple(int(k) for k in self.k_list)
        if not ks or any(k < 1 for k in ks):
            raise ValueError("k_list must contain positive integers")
        object.__setattr__(self, "k_list", ks)
        if min(grid) < max(ks):
            raise ValueError(f"every n in the grid must be >= max(k_list) = {max(ks)}")
        if self.norming not in ("derived", "tabulated"):
            raise ValueError(f"norming must be 'derived' or 'tabulated', got {self.norming!r}")
        for kind in self.kinds:
            if kind not in ("hellinger", "tv", "ks"):
                raise ValueError(f"kinds must be among hellinger/tv/ks, got {kind!r}")

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        base = BaseConfig(**raw.pop("base", {}))
        for key in ("n_grid", "k_list", "kinds"):
            if key in raw:
                raw[key] = tuple(raw[key])
        return cls(base=base, **raw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_grid"] = list(self.n_grid)
        d["k_list"] = list(self.k_list)
        d["kinds"] = list(self.kinds)
        return d


@dataclass(frozen=True)
class RateRow:
    n: int
    k: int
    kind: str
    report: DistanceReport


@dataclass(frozen=True)
class RateFit:
    kind: str
    k: int
    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    rows: tuple[RateRow, ...]
    fits: tuple[RateFit, ...]

    @property
    def all_converged(self) -> bool:
        return all(r.report.converged for r in self.rows)


def fit_rate(points: list[tuple[int, float, float]], kind: str, k: int) -> RateFit | None:
    """Least-squares log-log fit over (n, value, error) triples.

    Rows with value below 10x the quadrature error estimate (the noise
    floor) or nonpositive value are excluded; at least two points must
    survive for a fit to exist.
    """
    kept = [(n, v) for n, v, e in points if v > 10.0 * e and v > 0.0]
    if len(kept) < 2:
        return None
    logn = np.log([n for n, _ in kept])
    logv = np.log([v for _, v in kept])
    slope, intercept = np.polyfit(logn, logv, 1)
    pred = slope * logn + intercept
    ss_res = float(np.sum((logv - pred) ** 2))
    ss_tot = float(np.sum((logv - np.mean(logv)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RateFit(
        kind=kind,
        k=k,
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        points=tuple((float(a), float(b)) for a, b in zip(logn, logv)),
    )


def rate_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Evaluate every (n, k, kind) cell of the config and fit the decay rates."""
    base = build_base(cfg.base)
    spec = PMaxLawSpec(cfg.base.family, cfg.base.alpha)
    rows: list[RateRow] = []
    for n in cfg.n_grid:
        for k in cfg.k_list:
            for kind in cfg.kinds:
                rep = exact_vs_limit(
                    kind,
                    base,
                    spec,
                    n,
                    k=k,
                    norming=cfg.norming,
                    tol=cfg.tol,
                    c=cfg.c,
                    mc_samples=cfg.mc_samples,
                    seed=cfg.seed,
                )
                rows.append(RateRow(n=n, k=k, kind=kind, report=rep))
    fits = []
    for kind in cfg.kinds:
        for k in cfg.k_list:
            pts = [
                (r.n, r.report.value, r.report.error_estimate)
                for r in rows
                if r.kind == kind and r.k == k and r.report.converged
            ]
            fit = fit_rate(pts, kind, k)
            if fit is not None:
                fits.append(fit)
    return ExperimentResult(config=cfg, rows=tuple(rows), fits=tuple(fits))


# ---------------------------------------------------------------------------
# report emission
# ---------------------------------------------------------------------------

_CSV_COLUMNS = ("n", "k", "kind", "value", "error", "bound_total", "bound_integral", "bound_tail", "bound_joint")


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def _row_cells(row: RateRow) -> list[str]:
    b = row.report.bound
    return [
        str(row.n),
        str(row.k),
        row.kind,
        _fmt(row.report.value),
        _fmt(row.report.error_estimate),
        _fmt(b.total) if b else "",
        _fmt(b.integral_term) if b else "",
        _fmt(b.tail_term) if b else "",
        _fmt(b.joint_term) if b and b.joint_term is not None else "",
    ]


def _csv_text(result: ExperimentResult) -> str:
    lines = [",".join(_CSV_COLUMNS)]
    for row in result.rows:
        lines.append(",".join(_row_cells(row)))
    for fit in result.fits:
        lines.append(
            f"# fit kind={fit.kind} k={fit.k} slope={_fmt(fit.slope)} "
            f"intercept={_fmt(fit.intercept)} r_squared={_fmt(fit.r_squared)} n_points={len(fit.points)}"
        )
    return "\n".join(lines) + "\n"


def _bound_dict(b: BoundReport | None) -> dict | None:
    if b is None:
        return None
    return {
        "integral_term": b.integral_term,
        "tail_term": b.tail_term,
        "joint_term": b.joint_term,
        "universal_constant_term": b.universal_constant_term,
        "total": b.total,
        "joint_term_signed": b.joint_term_signed,
        "joint_term_stderr": b.joint_term_stderr,
        "converged": b.converged,
        "notes": list(b.notes),
    }


def report_json_object(result: ExperimentResult) -> dict:
    return {
        "schema": "pmaxevt-rate-report/1",
        "config": result.config.to_dict(),
        "rows": [
            {
                "n": r.n,
                "k": r.k,
                "kind": r.kind,
                "value": r.report.value,
                "error": r.report.error_estimate,
                "converged": r.report.converged,
                "bound": _bound_dict(r.report.bound),
            }
            for r in result.rows
        ],
        "fits": [
            {
                "kind": f.kind,
                "k": f.k,
                "slope": f.slope,
                "intercept": f.intercept,
                "r_squared": f.r_squared,
                "points": [list(p) for p in f.points],
            }
            for f in result.fits
        ],
    }


def _gnuplot_text(result: ExperimentResult) -> str:
    blocks = ["# rate report (gnuplot-style blocks: n value bound_total)"]
    for kind in result.config.kinds:
        for k in result.config.k_list:
            rows = [r for r in result.rows if r.kind == kind and r.k == k]
            if not rows:
                continue
            lines = [f"# block kind={kind} k={k}"]
            for r in rows:
                b = r.report.bound
                lines.append(f"{r.n} {_fmt(r.report.value)} {_fmt(b.total) if b else 'nan'}")
            blocks.append("\n".join(lines))
    for fit in result.fits:
        blocks.append(f"# fit kind={fit.kind} k={fit.k} slope={_fmt(fit.slope)} r_squared={_fmt(fit.r_squared)}")
    return "\n\n".join(blocks) + "\n"


def report_emit(result: ExperimentResult, path: str, format: str = "csv") -> str:
    """Write the report to ``path`` in csv, json or gnuplot-text form."""
    if format == "csv":
        text = _csv_text(result)
    elif format == "json":
        text = json.dumps(report_json_object(result), indent=2, sort_keys=True) + "\n"
    elif format in ("gnuplot", "gnuplot-text"):
        text = _gnuplot_text(result)
    else:
        raise ValueError(f"unknown report format {format!r}")
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def parse_report_csv(path: str) -> tuple[list[dict], list[dict]]:
    """Round-trip reader for the CSV emitted above: (rows, fits)."""
    rows: list[dict] = []
    fits: list[dict] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != _CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header!r}")
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("# fit "):
                entries = dict(part.split("=", 1) for part in line[6:].split(" "))
                fits.append(
                    {
                        "kind": entries["kind"],
                        "k": int(entries["k"]),
                        "slope": float(entries["slope"]),
                        "intercept": float(entries["intercept"]),
                        "r_squared": float(entries["r_squared"]),
                        "n_points": int(entries["n_points"]),
                    }
                )
                continue
            cells = line.split(",")
            rows.append(
                {
                    "n": int(cells[0]),
                    "k": int(cells[1]),
                    "kind": cells[2],
                    "value": float(cells[3]),
                    "error": float(cells[4]),
                    "bound_total": float(cells[5]) if cells[5] else None,
                    "bound_integral": float(cells[6]) if cells[6] else None,
                    "bound_tail": float(cells[7]) if cells[7] else None,
                    "bound_joint": float(cells[8]) if cells[8] else None,
                }
            )
    return rows, fits


def density_table_text(rows) -> str:
    """Gnuplot-style text for a (label, x, density) table: one block per label."""
    blocks: dict[str, list[str]] = {}
    for label, x, d in rows:
        blocks.setdefault(label, [f"# block label={label}"]).append(f"{float(x)!r} {float(d)!r}")
    return "\n\n".join("\n".join(lines) for lines in blocks.values()) + "\n"


def validate_report_json(obj: dict) -> None:
    """Validate a JSON report against the shipped schema (raises on failure)."""
    import jsonschema

    schema_text = resources.files("pmaxevt").joinpath("schemas/report.schema.json").read_text(encoding="utf-8")
    jsonschema.validate(obj, json.loads(schema_text))

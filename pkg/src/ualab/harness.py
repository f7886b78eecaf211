"""Experiment configuration, seeded trial orchestration and table output."""

from __future__ import annotations

import csv
import functools
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ualab import __version__, rng
from ualab.expansion import (
    EXHAUSTIVE_LIMIT,
    conductance_exact,
    conductance_sweep,
    rho_star,
    solve_rho,
    vertex_expansion_exact,
)
from ualab.graph import generate
from ualab.oracles import prob_in_degree_zero, prob_out_degree_k_minus_1
from ualab.parallel import map_trials
from ualab.percolation import (
    extract_witness,
    run_bootstrap,
    sample_initial,
    theorem_range_label,
    threshold_scan,
    verify_witness,
)
from ualab.stats import poisson_gof, stable_mean, wilson_interval
from ualab.structure import is_connected, special_set, vertex_connectivity
from ualab.walk import mixing_profile

EXPERIMENTS = ("stats", "expansion", "rho", "walk", "percolate", "scan", "oracle", "witness")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    def __init__(self, field_name: str, detail: str):
        super().__init__(f"{field_name}: {detail}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    experiment: str
    n_grid: list[int] = field(default_factory=list)
    k: int = 3
    r: int | None = None
    p_grid: list[float] = field(default_factory=list)
    trials: int = 1
    master_seed: int = 0
    output_path: str = "-"
    format: str = "csv"
    t_max: int = 100
    x_grid: list[int] = field(default_factory=list)
    connectivity: bool = False

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment {self.experiment!r}")
        if self.format not in FORMATS:
            raise ConfigError("format", f"must be one of {FORMATS}")
        if self.trials < 1:
            raise ConfigError("trials", "must be at least 1")
        if self.k < 1:
            raise ConfigError("k", "must be positive")
        if self.t_max < 0:
            raise ConfigError("t_max", "must be nonnegative")
        try:
            rng.check_seed(self.master_seed)
        except ValueError as exc:
            raise ConfigError("master_seed", str(exc)) from None
        if self.experiment != "rho":
            if not self.n_grid:
                raise ConfigError("n_grid", "must not be empty")
            if any(n < 1 for n in self.n_grid):
                raise ConfigError("n_grid", "entries must be positive")
        if self.experiment in ("percolate", "scan", "witness"):
            if self.r is None or self.r < 1:
                raise ConfigError("r", "required and must be at least 1")
            if not self.p_grid:
                raise ConfigError("p_grid", "must not be empty")
            if any(not 0 <= p <= 1 for p in self.p_grid):
                raise ConfigError("p_grid", "entries must lie in [0, 1]")
        if self.experiment == "scan":
            if len(self.n_grid) != 1:
                raise ConfigError("n_grid", "scan takes exactly one n")
            if any(b <= a for a, b in zip(self.p_grid, self.p_grid[1:])):
                raise ConfigError("p_grid", "must be strictly increasing")
        if self.experiment in ("walk", "percolate") and len(self.n_grid) != 1:
            raise ConfigError("n_grid", f"{self.experiment} takes exactly one n")
        if self.experiment == "rho" and self.k < 2:
            raise ConfigError("k", "rho needs k >= 2")
        if self.experiment == "oracle" and any(not 2 <= x <= n for n in self.n_grid for x in self.x_grid):
            raise ConfigError("x_grid", "entries must lie in [2, n]")


@dataclass
class SummaryTable:
    columns: list[tuple[str, str]]  # (name, type) with type in int/float/str/bool
    rows: list[list]
    metadata: dict

    def __post_init__(self):
        width = len(self.columns)
        for row in self.rows:
            if len(row) != width:
                raise ValueError("table rows must match the column count")

    def column(self, name: str) -> list:
        j = [c for c, _ in self.columns].index(name)
        return [row[j] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([c for c, _ in self.columns])
        for row in self.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        body = {
            "columns": [{"name": c, "type": t} for c, t in self.columns],
            "rows": [[_json_value(v) for v in row] for row in self.rows],
            "metadata": self.metadata,
        }
        return json.dumps(body, indent=2, sort_keys=False) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == "csv" else self.to_json()


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return _cell(v)
    return v


# -- config file --------------------------------------------------------------

_LIST_KEYS = {"n": "n_grid", "p": "p_grid", "x": "x_grid"}
_ALIASES = {"seed": "master_seed", "out": "output_path", "output": "output_path"}


def _coerce(key: str, raw: str):
    try:
        if key in ("n_grid", "x_grid", "k", "r", "trials", "t_max"):
            return int(raw)
        if key == "master_seed":
            return int(raw, 0)
        if key == "p_grid":
            return float(raw)
        if key == "connectivity":
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1", "yes")
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r}") from None
    return raw


def parse_config_text(text: str) -> dict:
    """``key = value`` lines; repeated ``n``, ``p`` and ``x`` lines build grids."""
    out: dict = {}
    names = {f for f in ExperimentConfig.__dataclass_fields__}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected 'key = value'")
        key, _, raw = (s.strip() for s in line.partition("="))
        key = _ALIASES.get(key, key)
        if key in _LIST_KEYS:
            out.setdefault(_LIST_KEYS[key], []).append(_coerce(_LIST_KEYS[key], raw))
        elif key in names and key not in _LIST_KEYS.values():
            out[key] = _coerce(key, raw)
        else:
            raise ConfigError(key, f"unknown key on line {lineno}")
    return out


def build_config(experiment: str, file_values: dict, overrides: dict) -> ExperimentConfig:
    values = dict(file_values)
    values.update({k: v for k, v in overrides.items() if v is not None and v != []})
    values["experiment"] = experiment
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


# -- experiments --------------------------------------------------------------


def _graph_seed(master: int, n: int, i: int) -> int:
    # grid points get disjoint streams so that adding an n leaves other rows unchanged
    return rng.mix_seed(master, i, n << 8)


def _stats_trial(i: int, *, n: int, k: int, master: int, connectivity: bool):
    g = generate(n, k, _graph_seed(master, n, i))
    # the simple degree is distinct out-selections plus distinct in-selectors
    delta = int((g.out_degrees + g.in_degrees).min())
    special = len(special_set(g)) if k >= 2 else 0
    if not connectivity:
        return delta, special, None, None
    sv = g.simple
    return delta, special, is_connected(sv), vertex_connectivity(sv) if n >= 2 else None


def _stats(cfg: ExperimentConfig) -> SummaryTable:
    cols = [
        ("n", "int"), ("k", "int"), ("trials", "int"),
        ("frac_min_degree_eq_k", "float"), ("mean_min_degree", "float"),
        ("mean_special_size", "float"), ("special_poisson_p", "float"),
        ("frac_connected", "float"), ("frac_kappa_eq_delta", "float"),
    ]
    rows = []
    for n in cfg.n_grid:
        fn = functools.partial(_stats_trial, n=n, k=cfg.k, master=cfg.master_seed, connectivity=cfg.connectivity)
        out = map_trials(fn, cfg.trials, seed_of=lambda i, n=n: _graph_seed(cfg.master_seed, n, i))
        sizes = [s for _, s, _, _ in out]
        lam = (cfg.k - 1) / 2
        gof = poisson_gof(sizes, lam) if cfg.trials >= 100 and lam > 0 else None
        kap = [d == c for d, _, _, c in out if c is not None]
        rows.append([
            n, cfg.k, cfg.trials,
            sum(d == cfg.k for d, *_ in out) / cfg.trials,
            stable_mean([float(d) for d, *_ in out]),
            stable_mean([float(s) for s in sizes]),
            gof,
            sum(c for _, _, c, _ in out) / cfg.trials if cfg.connectivity else None,
            sum(kap) / len(kap) if kap else None,
        ])
    return SummaryTable(cols, rows, {})


def _expansion_trial(i: int, *, n: int, k: int, master: int):
    sv = generate(n, k, _graph_seed(master, n, i)).simple
    if not is_connected(sv):
        return None
    phi, gap = conductance_sweep(sv)
    small = n <= EXHAUSTIVE_LIMIT
    return phi, gap, conductance_exact(sv) if small else None, vertex_expansion_exact(sv) if small else None


def _expansion(cfg: ExperimentConfig) -> SummaryTable:
    cols = [
        ("n", "int"), ("k", "int"), ("connected_trials", "int"),
        ("mean_phi_sweep", "float"), ("mean_phi_sweep_log_n", "float"),
        ("mean_spectral_gap", "float"), ("mean_phi_exact", "float"), ("mean_rho_exact", "float"),
    ]
    rows = []
    for n in cfg.n_grid:
        if n < 3:
            raise ConfigError("n_grid", "expansion needs n >= 3")
        fn = functools.partial(_expansion_trial, n=n, k=cfg.k, master=cfg.master_seed)
        out = [o for o in map_trials(fn, cfg.trials) if o is not None]
        phis = [o[0] for o in out]
        exact = [o[2] for o in out if o[2] is not None]
        rho = [o[3] for o in out if o[3] is not None]
        rows.append([
            n, cfg.k, len(out),
            stable_mean(phis),
            stable_mean([p * math.log(n) for p in phis]),
            stable_mean([o[1] for o in out]),
            stable_mean(exact) if exact else None,
            stable_mean(rho) if rho else None,
        ])
    return SummaryTable(cols, rows, {})


def _rho(cfg: ExperimentConfig) -> SummaryTable:
    cols = [("k", "int"), ("rho_k", "float"), ("rho_star", "float")]
    star = rho_star()
    rows = [[k, solve_rho(k).rho_k, star] for k in range(2, cfg.k + 1)]
    return SummaryTable(cols, rows, {})


def _walk(cfg: ExperimentConfig) -> SummaryTable:
    n = cfg.n_grid[0]
    sv = generate(n, cfg.k, _graph_seed(cfg.master_seed, n, 0)).simple
    if not is_connected(sv):
        raise RuntimeError(f"graph with seed {_graph_seed(cfg.master_seed, n, 0)} is disconnected")
    if n <= EXHAUSTIVE_LIMIT:
        phi, source = conductance_exact(sv), "exact"
    else:
        phi, source = conductance_sweep(sv)[0], "sweep"
    rows = [[r.t, r.max_dev, r.bound] for r in mixing_profile(sv, 1, cfg.t_max, phi)]
    cols = [("t", "int"), ("max_dev", "float"), ("bound", "float")]
    return SummaryTable(cols, rows, {"phi": phi, "phi_source": source, "start": 1})


def percolate_trace(cfg: ExperimentConfig):
    """Single trace; returns (table, trace, graph) so callers can pull witnesses."""
    n = cfg.n_grid[0]
    gseed = _graph_seed(cfg.master_seed, n, 0)
    sv = generate(n, cfg.k, gseed).simple
    init = sample_initial(n, cfg.p_grid[0], rng.mix_seed(cfg.master_seed, 0, 1))
    trace = run_bootstrap(sv, cfg.r, init)
    total = 0
    rows = []
    for i, layer in enumerate(trace.rounds):
        total += len(layer)
        rows.append([i, len(layer), total])
    cols = [("round", "int"), ("newly_infected", "int"), ("infected", "int")]
    meta = {**_metadata(cfg), "graph_seed": gseed, "full": total == n, "label": theorem_range_label(cfg.k, cfg.r)}
    return SummaryTable(cols, rows, meta), trace, sv


def _scan(cfg: ExperimentConfig) -> SummaryTable:
    n = cfg.n_grid[0]
    est, cross = threshold_scan(n, cfg.k, cfg.r, cfg.p_grid, cfg.trials, cfg.master_seed)
    cols = [("p", "float"), ("full_prob", "float"), ("ci_lo", "float"), ("ci_hi", "float"), ("mean_final_fraction", "float")]
    rows = [[e.p, e.estimate, e.ci_lo, e.ci_hi, e.mean_final_fraction] for e in est]
    meta = {"n": n, "crossing_p": cross, "label": theorem_range_label(cfg.k, cfg.r)}
    return SummaryTable(cols, rows, meta)


def _oracle_trial(i: int, *, n: int, k: int, xs: tuple[int, ...], master: int):
    g = generate(n, k, _graph_seed(master, n, i))
    idx = np.asarray(xs) - 1
    return g.in_degrees[idx].tolist(), g.out_degrees[idx].tolist()


def _oracle(cfg: ExperimentConfig) -> SummaryTable:
    cols = [
        ("n", "int"), ("k", "int"), ("x", "int"),
        ("p_in0", "float"), ("emp_in0", "float"), ("in0_lo", "float"), ("in0_hi", "float"),
        ("p_outkm1", "float"), ("emp_outkm1", "float"), ("outkm1_lo", "float"), ("outkm1_hi", "float"),
    ]
    rows = []
    for n in cfg.n_grid:
        xs = tuple(cfg.x_grid) if cfg.x_grid else tuple(sorted({max(2, n // 4), max(2, n // 2), max(2, 3 * n // 4)}))
        fn = functools.partial(_oracle_trial, n=n, k=cfg.k, xs=xs, master=cfg.master_seed)
        out = map_trials(fn, cfg.trials)
        for j, x in enumerate(xs):
            hit_in = sum(1 for d_in, _ in out if d_in[j] == 0)
            hit_out = sum(1 for _, d_out in out if d_out[j] == cfg.k - 1)
            lo_i, hi_i = wilson_interval(hit_in, cfg.trials, 0.99)
            lo_o, hi_o = wilson_interval(hit_out, cfg.trials, 0.99)
            p_out = prob_out_degree_k_minus_1(x, cfg.k) if cfg.k >= 2 and x >= cfg.k else None
            rows.append([
                n, cfg.k, x,
                prob_in_degree_zero(x, n, cfg.k), hit_in / cfg.trials, lo_i, hi_i,
                p_out, hit_out / cfg.trials, lo_o, hi_o,
            ])
    return SummaryTable(cols, rows, {"confidence": 0.99})


def _witness_trial(i: int, *, n: int, k: int, r: int, p: float, master: int):
    sv = generate(n, k, _graph_seed(master, n, i)).simple
    init = sample_initial(n, p, rng.mix_seed(master, i, 1))
    trace = run_bootstrap(sv, r, init)
    checked = passed = 0
    for layer in trace.rounds[1:]:
        for x in layer:
            checked += 1
            passed += verify_witness(extract_witness(trace, sv, x), sv, trace)[0]
    return checked, passed


def _witness(cfg: ExperimentConfig) -> SummaryTable:
    cols = [("n", "int"), ("p", "float"), ("trials", "int"), ("certificates", "int"), ("passed", "int")]
    rows = []
    for n in cfg.n_grid:
        for p in cfg.p_grid:
            fn = functools.partial(_witness_trial, n=n, k=cfg.k, r=cfg.r, p=p, master=cfg.master_seed)
            out = map_trials(fn, cfg.trials)
            rows.append([n, p, cfg.trials, sum(c for c, _ in out), sum(q for _, q in out)])
    return SummaryTable(cols, rows, {})


_DISPATCH = {
    "stats": _stats,
    "expansion": _expansion,
    "rho": _rho,
    "walk": _walk,
    "scan": _scan,
    "oracle": _oracle,
    "witness": _witness,
}


def _metadata(cfg: ExperimentConfig) -> dict:
    echo = asdict(cfg)
    echo.pop("output_path")
    return {"config": echo, "version": __version__, "rng": rng.RNG_ALGORITHM}


def run_experiment(cfg: ExperimentConfig) -> SummaryTable:
    """Run ``cfg`` and return its table; identical configs give identical tables."""
    cfg.validate()
    if cfg.experiment == "percolate":
        return percolate_trace(cfg)[0]
    table = _DISPATCH[cfg.experiment](cfg)
    table.metadata = {**_metadata(cfg), **table.metadata}
    return table

"""r-neighbour bootstrap percolation, witness certificates, threshold scales."""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ualab import rng
from ualab.graph import AttachmentGraph, SimpleGraphView, generate
from ualab.parallel import map_trials
from ualab.stats import stable_mean, wilson_interval

OUTSIDE_RANGE = "outside theorem range"


@dataclass(frozen=True)
class PercolationConfig:
    r: int
    p: float
    seed: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be at least 1")
        _check_p(self.p)
        rng.check_seed(self.seed)


@dataclass
class PercolationTrace:
    """Synchronous rounds; ``rounds[i]`` holds the vertices first infected at round i.

    ``provenance[x]`` lists the r neighbours credited with infecting x.
    Vertices are 1-based labels.
    """

    r: int
    rounds: list[list[int]]
    provenance: dict[int, tuple[int, ...]] = field(default_factory=dict)

    @functools.cached_property
    def round_of(self) -> dict[int, int]:
        return {v: i for i, layer in enumerate(self.rounds) for v in layer}

    @property
    def final_set(self) -> set[int]:
        return set(self.round_of)


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")


def theorem_range_label(k: int, r: int) -> str:
    return "" if 2 <= r <= k - 1 else OUTSIDE_RANGE


def sample_initial(n: int, p: float, seed: int) -> list[int]:
    """Each of ``1..n`` independently with probability p (one uniform per vertex)."""
    _check_p(p)
    u = rng.uniforms(rng.bit_generator(seed), n)
    return (np.flatnonzero(u < p) + 1).tolist()


def _gather(sv: SimpleGraphView, verts: np.ndarray) -> np.ndarray:
    """Concatenated neighbour rows (0-based) of ``verts``."""
    starts = sv.indptr[verts]
    lens = sv.indptr[verts + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    offs = np.repeat(starts - np.cumsum(lens) + lens, lens)
    return sv.indices[offs + np.arange(total)]


def _spread(sv: SimpleGraphView, r: int, infected: np.ndarray, record: bool):
    """Run rounds in place on boolean ``infected``; returns rounds (0-based arrays) and provenance."""
    counts = np.zeros(sv.n, dtype=np.int64)
    new = np.flatnonzero(infected)
    rounds = [new]
    prov: dict[int, tuple[int, ...]] = {}
    while new.size:
        touched = _gather(sv, new)
        np.add.at(counts, touched, 1)
        cand = np.unique(touched)
        cand = cand[(~infected[cand]) & (counts[cand] >= r)]
        if record:
            for x in cand.tolist():
                row = sv.neighbors0(x)
                prov[x + 1] = tuple((row[infected[row]][:r] + 1).tolist())
        infected[cand] = True
        new = cand
        if new.size:
            rounds.append(new)
    return rounds, prov


def run_bootstrap(sv: SimpleGraphView, r: int, initial) -> PercolationTrace:
    """Synchronous bootstrap percolation from ``initial`` (1-based labels).

    Each newly infected vertex records its r smallest-labelled neighbours
    infected before its round.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    infected = np.zeros(sv.n, dtype=bool)
    init = np.asarray(sorted(set(initial)), dtype=np.int64)
    if init.size and (init[0] < 1 or init[-1] > sv.n):
        raise ValueError("initial vertex out of range")
    infected[init - 1] = True
    rounds, prov = _spread(sv, r, infected, record=True)
    return PercolationTrace(r, [(b + 1).tolist() for b in rounds], prov)


def final_mask(sv: SimpleGraphView, r: int, initial_mask: np.ndarray) -> np.ndarray:
    """Final infected indicator (0-based) without provenance bookkeeping."""
    infected = np.array(initial_mask, dtype=bool, copy=True)
    _spread(sv, r, infected, record=False)
    return infected


def is_stable(sv: SimpleGraphView, r: int, infected: np.ndarray) -> bool:
    """No uninfected vertex has r infected neighbours (independent full scan)."""
    a = sv.to_scipy()
    counts = a @ infected.astype(np.float64)
    return not bool(np.any((~infected) & (counts >= r)))


# -- Monte Carlo --------------------------------------------------------------


@dataclass(frozen=True)
class InfectionEstimate:
    p: float
    successes: int
    trials: int
    estimate: float
    ci_lo: float
    ci_hi: float
    mean_final_fraction: float
    label: str = ""


def _full_trial(i: int, *, n: int, k: int, r: int, p: float, master_seed: int) -> tuple[bool, float]:
    sv = generate(n, k, rng.mix_seed(master_seed, i, 0)).simple
    u = rng.uniforms(rng.bit_generator(rng.mix_seed(master_seed, i, 1)), n)
    fin = final_mask(sv, r, u < p)
    size = int(fin.sum())
    return size == n, size / n


def full_infection_probability(n: int, k: int, r: int, p: float, trials: int, master_seed: int) -> InfectionEstimate:
    """Fraction of trials (fresh graph, fresh initial set) ending fully infected."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    _check_p(p)
    fn = functools.partial(_full_trial, n=n, k=k, r=r, p=p, master_seed=master_seed)
    out = map_trials(fn, trials, seed_of=lambda i: rng.mix_seed(master_seed, i, 0))
    hits = sum(1 for full, _ in out if full)
    lo, hi = wilson_interval(hits, trials)
    return InfectionEstimate(p, hits, trials, hits / trials, lo, hi, stable_mean([f for _, f in out]), theorem_range_label(k, r))


def _scan_trial(i: int, *, n: int, k: int, r: int, grid: tuple[float, ...], master_seed: int):
    # one graph and one set of uniforms shared by every grid point
    sv = generate(n, k, rng.mix_seed(master_seed, i, 0)).simple
    u = rng.uniforms(rng.bit_generator(rng.mix_seed(master_seed, i, 1)), n)
    res = []
    for p in grid:
        size = int(final_mask(sv, r, u < p).sum())
        res.append((size == n, size / n))
    return res


def crossing_point(grid, probs, level: float = 0.5) -> float | None:
    """First p where the curve reaches ``level``, linearly interpolated."""
    for j, q in enumerate(probs):
        if q >= level:
            if j == 0:
                return float(grid[0])
            p0, p1, q0 = grid[j - 1], grid[j], probs[j - 1]
            return float(p0 + (level - q0) * (p1 - p0) / (q - q0))
    return None


def threshold_scan(n: int, k: int, r: int, p_grid, trials: int, master_seed: int):
    """Coupled scan over ``p_grid``: returns (estimates, crossing p or None)."""
    grid = tuple(float(p) for p in p_grid)
    if not grid:
        raise ValueError("empty p grid")
    for p in grid:
        _check_p(p)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("p grid must be strictly increasing")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    fn = functools.partial(_scan_trial, n=n, k=k, r=r, grid=grid, master_seed=master_seed)
    out = map_trials(fn, trials, seed_of=lambda i: rng.mix_seed(master_seed, i, 0))
    label = theorem_range_label(k, r)
    rows = []
    for j, p in enumerate(grid):
        hits = sum(1 for t in out if t[j][0])
        lo, hi = wilson_interval(hits, trials)
        rows.append(InfectionEstimate(p, hits, trials, hits / trials, lo, hi, stable_mean([t[j][1] for t in out]), label))
    return rows, crossing_point(grid, [e.estimate for e in rows])


def coupled_monotone_run(sv: SimpleGraphView, r: int, uniforms, p1: float, p2: float):
    """Traces from {v : u_v < p1} and {v : u_v < p2}; the first final set is inside the second."""
    u = np.asarray(uniforms, dtype=np.float64)
    if u.shape != (sv.n,):
        raise ValueError("need one uniform per vertex")
    if np.any((u < 0) | (u >= 1)):
        raise ValueError("uniforms must lie in [0, 1)")
    _check_p(p1)
    _check_p(p2)
    if p1 > p2:
        raise ValueError("p1 must not exceed p2")
    t1 = run_bootstrap(sv, r, (np.flatnonzero(u < p1) + 1).tolist())
    t2 = run_bootstrap(sv, r, (np.flatnonzero(u < p2) + 1).tolist())
    return t1, t2


# -- witness certificates -----------------------------------------------------


@dataclass(frozen=True)
class WitnessCertificate:
    root: int
    layers: list[list[int]]
    edges: list[tuple[int, int]]  # (parent, child), child infected earlier

    def to_json(self) -> str:
        return json.dumps(
            {"root": self.root, "layers": self.layers, "edges": [list(e) for e in self.edges]},
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, text: str) -> "WitnessCertificate":
        obj = json.loads(text)
        try:
            return cls(
                int(obj["root"]),
                [[int(v) for v in layer] for layer in obj["layers"]],
                [(int(a), int(b)) for a, b in obj["edges"]],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed certificate: {exc}") from exc


def extract_witness(trace: PercolationTrace, sv: SimpleGraphView, x: int) -> WitnessCertificate:
    """Backward closure of x through recorded provenance, layered by infection round."""
    rnd = trace.round_of
    if x not in rnd:
        raise ValueError(f"vertex {x} is uninfected")
    if rnd[x] == 0:
        raise ValueError(f"vertex {x} is initially infected")
    seen = {x}
    stack = [x]
    edges = []
    while stack:
        v = stack.pop()
        for c in trace.provenance.get(v, ()):
            edges.append((v, c))
            if c not in seen:
                seen.add(c)
                stack.append(c)
    layers: list[list[int]] = [[] for _ in range(rnd[x] + 1)]
    for v in seen:
        layers[rnd[v]].append(v)
    return WitnessCertificate(x, [sorted(layer) for layer in layers], sorted(edges))


def verify_witness(w: WitnessCertificate, sv: SimpleGraphView, trace: PercolationTrace) -> tuple[bool, str | None]:
    """Check a certificate; returns (True, None) or (False, first failing clause)."""
    r = trace.r
    if not w.layers or w.layers[-1] != [w.root]:
        return False, "root"
    layer_of: dict[int, int] = {}
    for i, layer in enumerate(w.layers):
        for v in layer:
            if v in layer_of:
                return False, "layers disjoint"
            layer_of[v] = i
    children: dict[int, list[int]] = {v: [] for v in layer_of}
    for a, b in w.edges:
        if a not in layer_of or b not in layer_of:
            return False, "edge endpoints"
        if not (1 <= a <= sv.n and 1 <= b <= sv.n) or not sv.has_edge(a, b):
            return False, "edges⊆G"
        children[a].append(b)

    # acyclicity by Kahn's algorithm on the child relation
    indeg = {v: 0 for v in layer_of}
    for a, b in w.edges:
        indeg[b] += 1
    queue = [v for v, d in indeg.items() if d == 0]
    done = 0
    while queue:
        v = queue.pop()
        done += 1
        for c in children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    if done != len(layer_of):
        return False, "acyclic"

    b0 = set(trace.rounds[0]) if trace.rounds else set()
    leaves = [v for v, cs in children.items() if not cs]
    if any(layer_of[v] != 0 or v not in b0 for v in leaves):
        return False, "leaves⊆B_0"
    if len(leaves) < r:
        return False, "leaf count"

    rnd = trace.round_of
    for i, layer in enumerate(w.layers):
        if any(rnd.get(v) != i for v in layer):
            return False, "(I)"
    for v, cs in children.items():
        if layer_of[v] == 0:
            continue
        if len(cs) != r or len(set(cs)) != r or any(layer_of[c] >= layer_of[v] for c in cs):
            return False, "(II) child count"
        if not any(layer_of[c] == layer_of[v] - 1 for c in cs):
            return False, "(II) previous layer"
    return True, None


# -- threshold scales ---------------------------------------------------------


def iterated_log(x: float, times: int) -> float:
    """Natural log applied ``times`` times; nan once an argument is not positive."""
    for _ in range(times):
        if not x > 0:
            return math.nan
        x = math.log(x)
    return x


@dataclass(frozen=True)
class ThresholdQuantities:
    omega: float
    omega_upper: float
    p_upper: float
    p_lower: float
    n0: float
    nu: int
    ell: int
    t0: float
    p_clamped: bool
    nu_clamped: bool


def threshold_quantities(n: int, r: int, omega_override: float | None = None) -> ThresholdQuantities:
    """Scales of the two threshold regimes for activation threshold r >= 2.

    Without an override, omega = (3 L3 L4)^(r/(r-1)) with L_s the s-fold natural
    log of n, defined once L4 > 0. The same omega feeds every other field.
    """
    if r < 2:
        raise ValueError("threshold scales need r >= 2")
    if n < 3:
        raise ValueError("need n >= 3")
    e = r / (r - 1)
    logn = math.log(n)
    if omega_override is None:
        l3, l4 = iterated_log(n, 3), iterated_log(n, 4)
        if not (l3 > 0 and l4 > 0):
            raise ValueError(f"n={n} too small for the fourfold log; pass omega_override")
        omega = (3.0 * l3 * l4) ** e
    else:
        if not omega_override > 0:
            raise ValueError("omega_override must be positive")
        omega = float(omega_override)
    p_upper = omega * logn ** (-e)
    p_clamped = p_upper > 1.0
    p_upper = min(p_upper, 1.0)
    p_lower = min(1.0, logn ** (-e) / omega)
    n0 = math.sqrt(omega) * logn**e
    raw_nu = math.floor(omega ** ((r - 1) / r) / math.log(omega)) if omega > 1 else 0
    nu_clamped = raw_nu < 1
    nu = max(1, raw_nu)
    ell = math.ceil(logn / nu)
    return ThresholdQuantities(omega, omega, p_upper, p_lower, n0, nu, ell, logn, p_clamped, nu_clamped)


def binomial_tail(ell: int, p: float, r: int) -> float:
    """P(Bin(ell, p) >= r), summed in log space and added with fsum."""
    if p <= 0.0:
        return 0.0 if r > 0 else 1.0
    if p >= 1.0:
        return 1.0 if r <= ell else 0.0
    if r <= 0:
        return 1.0
    lp, lq = math.log(p), math.log1p(-p)
    lf = math.lgamma(ell + 1)
    terms = [math.exp(lf - math.lgamma(i + 1) - math.lgamma(ell - i + 1) + i * lp + (ell - i) * lq) for i in range(r, ell + 1)]
    return min(1.0, math.fsum(terms))


def binomial_recurrence(ell: int, r: int, p_initial: float, nu: int) -> list[float]:
    """[p_nu, p_{nu-1}, ..., p_0] with p_{j-1} = P(Bin(ell, p_j) >= r)."""
    if r < 1 or ell < r:
        raise ValueError("need ell >= r >= 1")
    if nu < 1:
        raise ValueError("nu must be at least 1")
    _check_p(p_initial)
    out = [float(p_initial)]
    for _ in range(nu):
        out.append(binomial_tail(ell, out[-1], r))
    return out


def log_expected_witness_bound(t: int, ell: int, n: float, n0: float, p: float, k: int, r: int) -> float:
    if t < 1 or ell < r or r < 1:
        raise ValueError("need t >= 1 and ell >= r >= 1")
    if n0 < 2 or n < 3:
        raise ValueError("need n0 >= 2 and n >= 3")
    _check_p(p)
    if p == 0.0:
        return -math.inf
    big_k = max(k, 3)
    loglogn = math.log(math.log(n))
    return (
        ell * math.log(p)
        + (t + ell - 1) * loglogn
        + ((r - 1) * t - ell + 1) * math.log(t / n0)
        + r * t * math.log(2 * big_k * math.e**2)
    )


def expected_witness_bound(t: int, ell: int, n: float, n0: float, p: float, k: int, r: int) -> float:
    """p^ell (log n)^(t+ell-1) (t/n0)^((r-1)t-ell+1) (2 K e^2)^(r t), K = max(k, 3)."""
    lv = log_expected_witness_bound(t, ell, n, n0, p, k, r)
    return 0.0 if lv < -745.0 else math.exp(lv)


def witness_bound_total(n: float, k: int, r: int, omega: float) -> float:
    """Sum of the bound over 1 <= t <= log n and r <= ell <= (r-1)t + 1 at the lower scale."""
    e = r / (r - 1)
    logn = math.log(n)
    p = logn ** (-e) / omega
    n0 = math.sqrt(omega) * logn**e
    terms = [
        expected_witness_bound(t, ell, n, n0, p, k, r)
        for t in range(1, math.floor(logn) + 1)
        for ell in range(r, (r - 1) * t + 2)
    ]
    return math.fsum(terms)


# -- small-vertex and seeded-prefix checks ------------------------------------


@dataclass(frozen=True)
class SmallVertexCheck:
    fraction: float  # no vertex of [ceil(n0)] infected at all
    fraction_spread_only: float  # none of [ceil(n0)] infected by the spread itself
    p: float
    n0: float
    trials: int
    vacuous: bool


def _small_trial(i: int, *, n: int, k: int, r: int, p: float, cut: int, master_seed: int) -> tuple[bool, bool]:
    sv = generate(n, k, rng.mix_seed(master_seed, i, 0)).simple
    u = rng.uniforms(rng.bit_generator(rng.mix_seed(master_seed, i, 1)), n)
    init = u < p
    fin = final_mask(sv, r, init)
    head = fin[:cut]
    return not bool(head.any()), not bool((head & ~init[:cut]).any())


def no_small_vertex_infected_check(n: int, k: int, r: int, omega: float, trials: int, master_seed: int) -> SmallVertexCheck:
    if not omega > 1:
        raise ValueError("omega must exceed 1")
    if r < 2:
        raise ValueError("r must be at least 2")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    e = r / (r - 1)
    logn = math.log(n)
    p = logn ** (-e) / omega
    n0 = math.sqrt(omega) * logn**e
    if n0 >= n:
        return SmallVertexCheck(1.0, 1.0, p, n0, trials, True)
    cut = math.ceil(n0)
    fn = functools.partial(_small_trial, n=n, k=k, r=r, p=p, cut=cut, master_seed=master_seed)
    out = map_trials(fn, trials, seed_of=lambda i: rng.mix_seed(master_seed, i, 0))
    return SmallVertexCheck(
        sum(a for a, _ in out) / trials,
        sum(b for _, b in out) / trials,
        p,
        n0,
        trials,
        False,
    )


def seed_first_m_spread(g: AttachmentGraph, r: int, m: int) -> tuple[bool, int | None]:
    """Infect ``1..m`` and report (full infection, smallest uninfected vertex)."""
    if not 1 <= m <= g.n:
        raise ValueError(f"m must lie in [1, {g.n}]")
    if not 1 <= r <= g.k - 1:
        raise ValueError("need 1 <= r <= k - 1")
    init = np.zeros(g.n, dtype=bool)
    init[:m] = True
    fin = final_mask(g.simple, r, init)
    miss = np.flatnonzero(~fin)
    return (True, None) if miss.size == 0 else (False, int(miss[0]) + 1)

"""Experiment harness: sample, delete, decompose, certify, aggregate.

One trial is fully determined by (config, base_seed + trial_index); every
stage draws from a single per-trial generator, so reports are identical
whatever the worker count.  Aggregation is plain means and fractions over
the trial records.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from perclab import theory
from perclab.decomposition import decompose
from perclab.expansion import certify, path_upper_bound, spectral_lower_bound
from perclab.pairing import (
    DegreeSequence,
    double_factorial_odd,
    matching_key,
    project,
    sample_configuration,
    sample_simple_regular,
)
from perclab.percolation import DeletionParams, apply_deletion, choose_deletion_set


@dataclass(frozen=True)
class ExperimentConfig:
    """Knobs for a batch of percolation trials.

    Exactly one of alpha (p = n**-alpha) or p must be given.  mode is
    'multigraph' (raw pairing projection) or 'simple' (rejection until the
    projection is simple).  exhaustive_expansion turns on expansion
    certificates: exact search when the survivor fits under
    exhaustive_limit vertices, spectral/run bounds otherwise.
    """

    n: int
    d: int
    alpha: float | None = None
    p: float | None = None
    eta: float | None = None
    trials: int = 1
    base_seed: int = 0
    mode: str = "multigraph"
    exhaustive_expansion: bool = False
    exhaustive_limit: int = 20
    K: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.d < 0:
            raise ValueError("d must be nonnegative")
        if (self.alpha is None) == (self.p is None):
            raise ValueError("give exactly one of alpha or p")
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        if self.mode not in ("multigraph", "simple"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.eta is not None and self.alpha is not None:
            if not (0 < self.eta <= self.alpha):
                raise ValueError("need 0 < eta <= alpha")

    @property
    def K_effective(self) -> int | None:
        """Bush/tree size cutoff: explicit K, else derived from eta/alpha."""
        if self.K is not None:
            return self.K
        eta = self.eta if self.eta is not None else self.alpha
        if eta is None or self.d < 3:
            return None
        return theory.bush_bound_K(self.d, eta)


@dataclass
class TrialRecord:
    trial: int
    seed: int
    n: int
    d: int
    alpha: float | None
    p: float
    r: int
    census: tuple
    mu: tuple | None
    giant_size: int
    n_components: int
    connected: bool
    max_tree_size: int
    cycle_component_count: int
    other_component_count: int
    bush_count: int
    max_bush_size: int
    two_core_size: int
    core_edge_count: int
    core_census: tuple
    kernel_size: int
    core_cycle_count: int
    longest_deg2_run: int
    deg2_paths_ge2: int
    rejections: int
    beta_exact: float | None
    beta_lower: float | None
    beta_upper: float | None
    lambda2: float | None
    diameter: float | None
    runtime_ms: float

    @property
    def n_survivors(self) -> int:
        return self.n - self.r

    @property
    def nongiant_isolated_only(self) -> bool:
        """Everything outside the giant component is a bare vertex."""
        return (
            self.cycle_component_count == 0
            and self.other_component_count == 0
            and self.max_tree_size <= 1
        )

    def nongiant_trees_within(self, K: int) -> bool:
        return (
            self.cycle_component_count == 0
            and self.other_component_count == 0
            and self.max_tree_size <= K
        )


def run_trial(config: ExperimentConfig, trial_index: int) -> TrialRecord:
    t0 = time.perf_counter()
    seed = config.base_seed + trial_index
    rng = np.random.default_rng(seed)

    rejections = 0
    if config.mode == "simple":
        cfg, _, rejections = sample_simple_regular(config.n, config.d, rng)
    else:
        cfg = sample_configuration(DegreeSequence.regular(config.n, config.d), rng)

    params = DeletionParams(config.n, alpha=config.alpha, p=config.p, seed=rng)
    prob = params.prob
    outcome = apply_deletion(cfg, choose_deletion_set(params))
    graph = project(outcome.survivor)

    K = config.K_effective
    dec = decompose(graph, K)
    comp = dec.components

    mu = None
    if config.alpha is not None and config.d >= 3:
        mp = theory.ModelParams(config.n, config.d, config.alpha, config.eta)
        mu = tuple(theory.mu_all(mp))

    beta_exact = beta_lower = beta_upper = lambda2 = diameter = None
    beta_upper = path_upper_bound(dec.longest_deg2_run, graph.n)
    if config.exhaustive_expansion:
        if graph.n <= config.exhaustive_limit:
            cert = certify(
                graph,
                exhaustive_limit=config.exhaustive_limit,
                longest_run=dec.longest_deg2_run,
                seed=rng,
            )
            beta_exact = cert.exact_beta
            beta_lower = cert.lower_bound
            lambda2 = cert.lambda2
            diameter = cert.diameter
            if cert.upper_bound is not None:
                beta_upper = cert.upper_bound
        else:
            spect = spectral_lower_bound(graph, seed=rng)
            beta_lower = spect.value
            lambda2 = spect.lambda2

    runtime_ms = (time.perf_counter() - t0) * 1000.0
    return TrialRecord(
        trial=trial_index,
        seed=seed,
        n=config.n,
        d=config.d,
        alpha=config.alpha,
        p=prob,
        r=outcome.r,
        census=tuple(int(x) for x in outcome.census),
        mu=mu,
        giant_size=comp.giant_size,
        n_components=comp.n_components,
        connected=comp.connected,
        max_tree_size=comp.max_isolated_tree_size,
        cycle_component_count=comp.isolated_cycle_count,
        other_component_count=comp.other_count,
        bush_count=len(dec.bushes),
        max_bush_size=dec.max_bush_size,
        two_core_size=dec.two_core_size,
        core_edge_count=dec.core.edge_count,
        core_census=tuple(int(x) for x in dec.core_census),
        kernel_size=dec.kernel_size,
        core_cycle_count=len(dec.kernel.cycles),
        longest_deg2_run=dec.longest_deg2_run,
        deg2_paths_ge2=dec.runs.count_at_least(2).count,
        rejections=rejections,
        beta_exact=beta_exact,
        beta_lower=beta_lower,
        beta_upper=beta_upper,
        lambda2=lambda2,
        diameter=diameter,
        runtime_ms=runtime_ms,
    )


def _trial_job(payload) -> TrialRecord:
    config_kwargs, idx = payload
    return run_trial(ExperimentConfig(**config_kwargs), idx)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records: list
    aggregate: dict
    predictions: dict | None

    def to_dict(self, strip_runtime: bool = False) -> dict:
        recs = []
        for r in self.records:
            d = {}
            for key, val in asdict(r).items():
                if isinstance(val, tuple):
                    val = [_json_safe(x) for x in val]
                else:
                    val = _json_safe(val)
                d[key] = val
            if strip_runtime:
                d["runtime_ms"] = 0.0
            recs.append(d)
        agg = {k: _json_safe(v) for k, v in self.aggregate.items()}
        if strip_runtime:
            agg.pop("mean_runtime_ms", None)
        return {
            "config": asdict(self.config),
            "records": recs,
            "aggregate": agg,
            "predictions": self.predictions,
        }

    def to_json(self, strip_runtime: bool = False) -> str:
        return json.dumps(
            self.to_dict(strip_runtime), sort_keys=True, indent=1, allow_nan=False
        )


def _json_safe(x):
    if isinstance(x, float) and (math.isnan(x) or math.isinf(x)):
        return None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def aggregate_records(records: list, K: int | None) -> dict:
    if not records:
        return {"trials": 0}
    T = len(records)

    def mean(vals):
        vals = [v for v in vals if v is not None]
        return float(np.mean(vals)) if vals else None

    def frac(flags):
        return float(np.mean([bool(f) for f in flags]))

    agg = {
        "trials": T,
        "mean_r": mean(r.r for r in records),
        "mean_giant_size": mean(r.giant_size for r in records),
        "mean_giant_fraction": mean(
            r.giant_size / r.n_survivors for r in records if r.n_survivors
        ),
        "mean_two_core_size": mean(r.two_core_size for r in records),
        "mean_kernel_size": mean(r.kernel_size for r in records),
        "mean_census": [
            mean(r.census[j] for r in records) for j in range(len(records[0].census))
        ],
        "mean_core_census": [
            mean(r.core_census[j] for r in records)
            for j in range(len(records[0].core_census))
        ],
        "fraction_connected": frac(r.connected for r in records),
        "fraction_core_cycle_free": frac(r.core_cycle_count == 0 for r in records),
        "fraction_nongiant_isolated_only": frac(
            r.nongiant_isolated_only for r in records
        ),
        "mean_longest_deg2_run": mean(r.longest_deg2_run for r in records),
        "mean_deg2_paths_ge2": mean(r.deg2_paths_ge2 for r in records),
        "mean_max_bush_size": mean(r.max_bush_size for r in records),
        "mean_runtime_ms": mean(r.runtime_ms for r in records),
    }
    if K is not None:
        agg["K"] = K
        agg["fraction_nongiant_trees_within_K"] = frac(
            r.nongiant_trees_within(K) for r in records
        )
        agg["fraction_bushes_within_K"] = frac(
            r.max_bush_size <= K for r in records
        )
    return agg


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentReport:
    """Run config.trials independent trials; records are ordered by trial
    index and identical for any worker count."""
    idxs = list(range(config.trials))
    if workers <= 1 or config.trials <= 1:
        records = [run_trial(config, i) for i in idxs]
    else:
        payloads = [(asdict(config), i) for i in idxs]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_trial_job, payloads))

    preds = None
    if config.alpha is not None and config.d >= 3:
        mp = theory.ModelParams(config.n, config.d, config.alpha, config.eta)
        preds = theory.predictions(mp, run_lengths=(2,)).to_dict()
    agg = aggregate_records(records, config.K_effective)
    return ExperimentReport(config, records, agg, preds)


# ---------------------------------------------------------------------------
# CSV interface


def csv_columns(d: int) -> list[str]:
    return (
        ["n", "d", "alpha", "seed", "r"]
        + [f"N_{j}" for j in range(d + 1)]
        + [f"mu_{j}" for j in range(d + 1)]
        + [
            "giant_size",
            "two_core_size",
            "longest_deg2_run",
            "max_tree_size",
            "isolated_cycles",
            "connected",
            "beta_exact",
            "beta_lower",
            "beta_upper",
            "lambda2",
            "diameter",
            "runtime_ms",
        ]
    )


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return ""
        return repr(x)
    return str(x)


def write_csv(report: ExperimentReport, path_or_file) -> None:
    """One row per trial; isolated_cycles counts pure-cycle components of
    the 2-core (the quantity the cycle-freeness predictions speak about)."""
    own = not hasattr(path_or_file, "write")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        writer = csv.writer(fh)
        cols = csv_columns(report.config.d)
        writer.writerow(cols)
        for r in report.records:
            mu = r.mu if r.mu is not None else [None] * (r.d + 1)
            row = (
                [r.n, r.d, r.alpha, r.seed, r.r]
                + list(r.census)
                + list(mu)
                + [
                    r.giant_size,
                    r.two_core_size,
                    r.longest_deg2_run,
                    r.max_tree_size,
                    r.core_cycle_count,
                    r.connected,
                    r.beta_exact,
                    r.beta_lower,
                    r.beta_upper,
                    r.lambda2,
                    r.diameter,
                    r.runtime_ms,
                ]
            )
            writer.writerow([_cell(x) for x in row])
    finally:
        if own:
            fh.close()


def _csv_value(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if text in ("True", "False"):
        return text == "True"
    return text


def read_csv(path_or_file) -> list[dict]:
    own = not hasattr(path_or_file, "read")
    fh = open(path_or_file, newline="") if own else path_or_file
    try:
        return [
            {k: _csv_value(v) for k, v in row.items()}
            for row in csv.DictReader(fh)
        ]
    finally:
        if own:
            fh.close()


# ---------------------------------------------------------------------------
# config files: flat "key = value" lines, # comments


_CONFIG_TYPES = {
    "n": int,
    "d": int,
    "alpha": float,
    "p": float,
    "eta": float,
    "trials": int,
    "base_seed": int,
    "mode": str,
    "exhaustive_expansion": bool,
    "exhaustive_limit": int,
    "K": int,
}


def parse_config_text(text: str) -> ExperimentConfig:
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value, got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_TYPES:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        typ = _CONFIG_TYPES[key]
        if typ is bool:
            if val.lower() not in ("true", "false", "0", "1", "yes", "no"):
                raise ValueError(f"line {lineno}: bad boolean {val!r}")
            kwargs[key] = val.lower() in ("true", "1", "yes")
        else:
            kwargs[key] = typ(val)
    return ExperimentConfig(**kwargs)


def format_config(config: ExperimentConfig) -> str:
    lines = []
    for key in _CONFIG_TYPES:
        val = getattr(config, key)
        if val is None:
            continue
        if isinstance(val, bool):
            val = "true" if val else "false"
        lines.append(f"{key} = {val}")
    return "\n".join(lines) + "\n"


def read_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config_text(fh.read())


# ---------------------------------------------------------------------------
# sampler uniformity suite
#
# Two statistical checks with known ground truth: (1) raw matching
# frequencies against the uniform distribution over all (2m-1)!! pairings;
# (2) post-deletion matchings, bucketed by surviving degree sequence,
# against uniformity over the matchings of the surviving points.  The
# second is the distributional fact that makes two-round deletion legal.


def uniformity_suite(
    seed: int = 0,
    matching_samples: int = 15_000,
    conditional_samples: int = 60_000,
    alpha_level: float = 1e-3,
) -> dict:
    rng = np.random.default_rng(seed)
    from perclab.pairing import enumerate_matchings

    # raw uniformity: n=3 buckets of degree 2, 6 points, 15 matchings
    matching_test = None
    if matching_samples:
        seq = DegreeSequence.regular(3, 2)
        counts: dict = {}
        for _ in range(matching_samples):
            c = sample_configuration(seq, rng)
            k = matching_key(c.mate)
            counts[k] = counts.get(k, 0) + 1
        n_matchings = double_factorial_odd(seq.m)
        observed = np.zeros(n_matchings)
        all_keys = enumerate_matchings(seq.total_points)
        assert len(all_keys) == n_matchings
        for i, k in enumerate(all_keys):
            observed[i] = counts.get(k, 0)
        chi2, pval = stats.chisquare(observed)
        matching_test = {
            "samples": matching_samples,
            "categories": n_matchings,
            "observed_categories": int(np.count_nonzero(observed)),
            "chi2": float(chi2),
            "pvalue": float(pval),
            "passed": bool(pval > alpha_level and np.all(observed > 0)),
        }

    # conditional uniformity after deletion: n=4, d=2, p=1/2
    conditional_test = None
    seq4 = DegreeSequence.regular(4, 2)
    groups: dict = {}
    for _ in range(conditional_samples):
        c = sample_configuration(seq4, rng)
        params = DeletionParams(4, p=0.5, seed=rng)
        out = apply_deletion(c, choose_deletion_set(params))
        gkey = tuple(int(x) for x in out.survivor.seq.degrees)
        mkey = matching_key(out.survivor.mate)
        groups.setdefault(gkey, {})
        groups[gkey][mkey] = groups[gkey].get(mkey, 0) + 1

    cases = []
    for gkey in sorted(groups):
        total_points = int(sum(gkey))
        m = total_points // 2
        n_match = double_factorial_odd(m)
        total = sum(groups[gkey].values())
        if n_match == 1:
            cases.append(
                {
                    "degrees": list(gkey),
                    "samples": total,
                    "categories": 1,
                    "chi2": 0.0,
                    "pvalue": 1.0,
                    "trivial": True,
                }
            )
            continue
        if total < 5 * n_match:
            # not enough mass for a stable chi-square on this bucket
            continue
        obs = np.zeros(n_match)
        for i, k in enumerate(enumerate_matchings(total_points)):
            obs[i] = groups[gkey].get(k, 0)
        chi2, pval = stats.chisquare(obs)
        cases.append(
            {
                "degrees": list(gkey),
                "samples": total,
                "categories": n_match,
                "chi2": float(chi2),
                "pvalue": float(pval),
                "trivial": False,
            }
        )
    if conditional_samples:
        pvals = [c["pvalue"] for c in cases if not c.get("trivial")]
        conditional_test = {
            "samples": conditional_samples,
            "cases": cases,
            "min_pvalue": float(min(pvals)) if pvals else 1.0,
            "passed": bool(all(p > alpha_level for p in pvals)) and len(pvals) > 0,
        }

    parts = [t for t in (matching_test, conditional_test) if t is not None]
    return {
        "matching_test": matching_test,
        "conditional_test": conditional_test,
        "passed": bool(parts) and all(t["passed"] for t in parts),
    }

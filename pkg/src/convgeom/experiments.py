"""Experiment drivers behind the CLI: sweeps, synthetic-noise runs, replica
distances, geometry diagnostics, and bound verification.

Seed discipline: trial ``t`` of a sweep uses model seed ``base ^ t`` and
split seed ``base ^ (t + 10**6)``, so every (family, alpha, beta) grid point
of a trial shares the split and the initial weights (paired comparison).
Synthetic runs additionally regenerate the bundle with seed
``base ^ (t + 2 * 10**6)``.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .datasets import (DatasetBundle, SyntheticConfig, generate_hub_periphery,
                       load_dataset, random_split)
from .errors import ValidationError
from .gcn import TrainConfig, train
from .geometry import (check_norm_bound, noise_distance_bounds,
                       structural_replica_distances)
from .graphs import generate_random_connected_graph, generate_random_graph
from .metrics import (GWConfig, curvature_scores, forman_curvature,
                      graph_distance_matrix, gromov_wasserstein,
                      norm_degree_profile, pairwise_euclidean, pca_project,
                      reconstruct_graph, spearman)
from .operators import (FAMILIES, FAMILY_ROW_NORMALIZED, FAMILY_SYMMETRIC,
                        ConvParams, build_operator)

SPLIT_SEED_OFFSET = 10 ** 6
BUNDLE_SEED_OFFSET = 2 * 10 ** 6


@dataclass(frozen=True)
class SweepConfig:
    """Grid-sweep settings; ``dataset_dir`` and ``scenario`` are exclusive."""

    out_dir: str
    dataset_dir: str | None = None
    scenario: str | None = None
    families: tuple[str, ...] = FAMILIES
    alpha_grid: tuple[float, ...] = tuple(round(0.1 * k, 1) for k in range(1, 11))
    beta_grid: tuple[float, ...] = (0.0, 1.0)
    trials: int = 30
    seed: int = 0
    train_cfg: TrainConfig = field(default_factory=TrainConfig)
    train_count: int | None = None
    workers: int = 1

    def __post_init__(self):
        if (self.dataset_dir is None) == (self.scenario is None):
            raise ValidationError("exactly one of dataset_dir/scenario is required")
        if self.trials < 1:
            raise ValidationError("trials must be at least 1")
        for fam in self.families:
            if fam not in FAMILIES:
                raise ValidationError(f"unknown family {fam!r}")
        for alpha in self.alpha_grid:
            if not 0.0 <= alpha <= 1.0:
                raise ValidationError(f"alpha {alpha} outside [0, 1]")
        for beta in self.beta_grid:
            if beta < 0:
                raise ValidationError(f"beta {beta} is negative")


@dataclass(frozen=True)
class SweepCell:
    family: str
    alpha: float
    beta: float
    mean: float
    sd: float
    accuracies: tuple[float, ...]


@dataclass(frozen=True)
class SweepResult:
    cells: tuple[SweepCell, ...]
    rows: tuple[tuple, ...]  # (family, alpha, beta, trial, accuracy)


def _resolve_bundle(cfg: SweepConfig, seed: int | None = None) -> DatasetBundle:
    if cfg.dataset_dir is not None:
        return load_dataset(cfg.dataset_dir)
    return generate_hub_periphery(SyntheticConfig(
        noise_mode=cfg.scenario, seed=cfg.seed if seed is None else seed))


def _split_for_trial(bundle: DatasetBundle, cfg: SweepConfig, trial: int):
    if bundle.split is not None:
        return bundle.split
    count = cfg.train_count
    if count is None:
        count = max(1, bundle.graph.num_nodes // 10)
    return random_split(bundle.graph.num_nodes, count,
                        cfg.seed ^ (trial + SPLIT_SEED_OFFSET))


def _sweep_trial(payload) -> list[tuple]:
    bundle, cfg, trial, regenerate = payload
    if regenerate:
        bundle = _resolve_bundle(cfg, seed=cfg.seed ^ (trial + BUNDLE_SEED_OFFSET))
    split = _split_for_trial(bundle, cfg, trial)
    bundle = bundle.with_split(split)
    model_seed = cfg.seed ^ trial
    rows = []
    for family in cfg.families:
        for alpha in cfg.alpha_grid:
            for beta in cfg.beta_grid:
                params = ConvParams(alpha, beta, family)
                tcfg = TrainConfig(
                    lr=cfg.train_cfg.lr, epochs=cfg.train_cfg.epochs,
                    hidden_dim=cfg.train_cfg.hidden_dim, seed=model_seed,
                    weight_decay=cfg.train_cfg.weight_decay,
                    optimizer=cfg.train_cfg.optimizer)
                result = train(bundle, params, tcfg)
                rows.append((family, float(alpha), float(beta), trial,
                             result.test_accuracy))
    return rows


def _run_trials(cfg: SweepConfig, regenerate: bool) -> SweepResult:
    base_bundle = None if regenerate else _resolve_bundle(cfg)
    payloads = [(base_bundle, cfg, t, regenerate) for t in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_sweep_trial, payloads))
    else:
        chunks = [_sweep_trial(p) for p in payloads]
    rows = sorted(row for chunk in chunks for row in chunk)
    cells = []
    for family in sorted(cfg.families):
        for alpha in cfg.alpha_grid:
            for beta in cfg.beta_grid:
                accs = [r[4] for r in rows
                        if r[0] == family and r[1] == float(alpha) and r[2] == float(beta)]
                accs_arr = np.asarray(accs)
                sd = float(accs_arr.std(ddof=1)) if len(accs) > 1 else 0.0
                cells.append(SweepCell(family, float(alpha), float(beta),
                                       float(accs_arr.mean()), sd, tuple(accs)))
    return SweepResult(tuple(cells), tuple(rows))


def _write_rows_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(repr(x) if isinstance(x, float) else str(x)
                              for x in row))
    path.write_text("\n".join(lines) + "\n")


def _dump_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Accuracy sweep over the (family, alpha, beta) grid; see module doc for
    the seed pairing.  Writes results.csv, summary.json, and an SVG."""
    from .svgplot import emit_svg_scatter

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = _run_trials(cfg, regenerate=cfg.scenario is not None)
    _write_rows_csv(out / "results.csv", "family,alpha,beta,trial,accuracy",
                    result.rows)
    summary = {
        "dataset": cfg.dataset_dir or f"synthetic:{cfg.scenario}",
        "trials": cfg.trials,
        "seed": cfg.seed,
        "cells": [{"family": c.family, "alpha": c.alpha, "beta": c.beta,
                   "mean": c.mean, "sd": c.sd} for c in result.cells],
    }
    _dump_json(out / "summary.json", summary)
    points = np.asarray([[c.alpha, c.mean] for c in result.cells])
    labels = np.asarray([f"{c.family},b={c.beta:g}" for c in result.cells])
    emit_svg_scatter(points, labels, out / "accuracy_vs_alpha.svg",
                     title="mean test accuracy over the alpha grid",
                     xlabel="alpha", ylabel="mean accuracy")
    return result


def run_synthetic(scenario: str, alpha_grid, trials: int, seed: int,
                  out_dir: str, train_cfg: TrainConfig | None = None,
                  train_count: int | None = None, workers: int = 1) -> dict:
    """Noise-scenario experiment: per-trial regenerated hub-periphery bundle,
    both families, beta = 1.  Returns the summary dict."""
    from .svgplot import emit_svg_scatter

    train_cfg = train_cfg or TrainConfig(lr=0.02, epochs=150)
    cfg = SweepConfig(out_dir=out_dir, scenario=scenario,
                      alpha_grid=tuple(float(a) for a in alpha_grid),
                      beta_grid=(1.0,), trials=trials, seed=seed,
                      train_cfg=train_cfg, train_count=train_count,
                      workers=workers)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = _run_trials(cfg, regenerate=True)
    _write_rows_csv(out / "results.csv", "family,alpha,beta,trial,accuracy",
                    result.rows)
    alphas = [float(a) for a in cfg.alpha_grid]
    per_family = {}
    for family in FAMILIES:
        means = [c.mean for c in result.cells if c.family == family]
        per_family[family] = {
            "mean_by_alpha": dict(zip(map(str, alphas), means)),
            "alpha_spearman": spearman(alphas, means) if len(set(means)) > 1 else 0.0,
            "mean_range": float(max(means) - min(means)),
        }
    summary = {
        "scenario": scenario,
        "trials": trials,
        "seed": seed,
        "alphas": alphas,
        "per_family": per_family,
        "cells": [{"family": c.family, "alpha": c.alpha, "beta": c.beta,
                   "mean": c.mean, "sd": c.sd} for c in result.cells],
    }
    _dump_json(out / "summary.json", summary)
    points = np.asarray([[c.alpha, c.mean] for c in result.cells])
    labels = np.asarray([c.family for c in result.cells])
    emit_svg_scatter(points, labels, out / "accuracy_vs_alpha.svg",
                     title=f"scenario {scenario}", xlabel="alpha",
                     ylabel="mean accuracy")
    return summary


def default_replica_template(seed: int = 7):
    """Small hub-periphery graph used as the replica-experiment template."""
    cfg = SyntheticConfig(num_hubs=2, hub_size=8, periphery_size=4, ba_m=1,
                          dummy_dim=4, noise_mode="uniform",
                          noise_variance=1.0, seed=seed)
    return generate_hub_periphery(cfg).graph


def run_structural(alpha_grid, trials: int, seed: int, out_dir: str,
                   sigma: float = 1.0, beta: float = 1.0,
                   families=FAMILIES, template=None) -> dict:
    """Replica-distance experiment per (family, alpha); writes results.csv and
    a summary with bound-violation counts for the one-convolution statistic."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    template = template if template is not None else default_replica_template()
    rows = []
    checks = []
    for family in sorted(families):
        for alpha in alpha_grid:
            res = structural_replica_distances(
                template, float(alpha), beta, family, sigma, trials, seed)
            for row in res.class_rows:
                rows.append((family, float(alpha), float(beta), row.degree,
                             row.count, row.mean_distance, row.q10, row.q50,
                             row.q90))
            over = res.conv_mean_sq > res.conv_high_factor + 1e-9
            checks.append({"family": family, "alpha": float(alpha),
                           "violations": int(np.sum(over)),
                           "worst_excess": float(np.max(
                               res.conv_mean_sq - res.conv_high_factor))})
    _write_rows_csv(out / "results.csv",
                    "family,alpha,beta,degree_class,count,mean_distance,q10,q50,q90",
                    rows)
    summary = {"sigma": sigma, "beta": beta, "trials": trials, "seed": seed,
               "bound_checks": checks}
    _dump_json(out / "summary.json", summary)
    return summary

DIAGNOSTIC_KEYS = (
    "norm_degree_spearman",
    "spearman_graph_embedding",
    "spearman_feature_embedding",
    "gw_graph_embedding",
    "gw_feature_embedding",
    "curvature_mean_original",
    "curvature_mean_reconstructed",
    "curvature_spearman",
)


def run_geometry(out_dir: str, dataset_dir: str | None = None,
                 scenario: str | None = None, family: str = FAMILY_SYMMETRIC,
                 alpha: float = 0.5, beta: float = 1.0,
                 train_cfg: TrainConfig | None = None,
                 train_count: int | None = None, kernel_eps: float = 0.5,
                 gw_subsample: int = 300, max_analysis_nodes: int = 1200,
                 seed: int = 0) -> dict:
    """Train one model and emit the embedding-geometry diagnostics.

    The report JSON carries the eight scalar diagnostics in
    ``DIAGNOSTIC_KEYS``, the norm-degree profile, curvature detail, and the
    paths of the two PCA scatter SVGs.  Distance-based diagnostics run on a
    seeded node subsample when the graph exceeds ``max_analysis_nodes``.
    """
    from .svgplot import emit_svg_scatter

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if (dataset_dir is None) == (scenario is None):
        raise ValidationError("exactly one of dataset_dir/scenario is required")
    if dataset_dir is not None:
        bundle = load_dataset(dataset_dir)
    else:
        bundle = generate_hub_periphery(SyntheticConfig(noise_mode=scenario,
                                                        seed=seed))
    if bundle.split is None:
        count = train_count or max(1, bundle.graph.num_nodes // 10)
        bundle = bundle.with_split(random_split(bundle.graph.num_nodes, count,
                                                seed ^ SPLIT_SEED_OFFSET))
    train_cfg = train_cfg or TrainConfig()
    params = ConvParams(alpha, beta, family)
    result = train(bundle, params, train_cfg)
    graph, embeddings = bundle.graph, result.embeddings
    n = graph.num_nodes

    norms = np.linalg.norm(embeddings, axis=1)
    profile = norm_degree_profile(embeddings, graph.degrees)
    norm_degree_sp = spearman(graph.degrees, norms)

    coords = pca_project(embeddings, 2, seed=seed)
    svg_class = emit_svg_scatter(coords, bundle.labels, out / "pca_by_class.svg",
                                 title="embedding PCA by class",
                                 xlabel="pc1", ylabel="pc2")
    svg_degree = emit_svg_scatter(coords, graph.degrees, out / "pca_by_degree.svg",
                                  title="embedding PCA by degree",
                                  xlabel="pc1", ylabel="pc2")

    if n > max_analysis_nodes:
        sel = np.sort(np.random.default_rng(seed).choice(
            n, max_analysis_nodes, replace=False))
    else:
        sel = np.arange(n)
    d_graph = graph_distance_matrix(graph, kernel_eps, sources=sel)
    d_feat = pairwise_euclidean(bundle.features[sel])
    d_emb = pairwise_euclidean(embeddings[sel])
    iu = np.triu_indices(sel.size, k=1)
    sp_graph = spearman(d_graph[iu], d_emb[iu])
    sp_feat = spearman(d_feat[iu], d_emb[iu])
    gw_cfg = GWConfig(subsample=gw_subsample, seed=seed)
    gw_graph = gromov_wasserstein(d_graph, d_emb, gw_cfg)
    gw_feat = gromov_wasserstein(d_feat, d_emb, gw_cfg)

    curv_orig = forman_curvature(graph)
    recon = reconstruct_graph(embeddings, graph.num_edges)
    curv_recon = forman_curvature(recon)
    # score the original edge set in both graphs for a paired comparison
    recon_scores = curvature_scores(recon, curv_orig.edges_u, curv_orig.edges_v)
    try:
        curv_sp = spearman(curv_orig.values, recon_scores)
    except ValidationError:
        curv_sp = None

    report = {
        "dataset": bundle.name or dataset_dir,
        "family": family,
        "alpha": float(alpha),
        "beta": float(beta),
        "seed": seed,
        "test_accuracy": result.test_accuracy,
        "analysis_nodes": int(sel.size),
        "diagnostics": {
            "norm_degree_spearman": norm_degree_sp,
            "spearman_graph_embedding": sp_graph,
            "spearman_feature_embedding": sp_feat,
            "gw_graph_embedding": gw_graph.value,
            "gw_feature_embedding": gw_feat.value,
            "curvature_mean_original": curv_orig.mean,
            "curvature_mean_reconstructed": curv_recon.mean,
            "curvature_spearman": curv_sp,
        },
        "gw_converged": {"graph": gw_graph.converged, "feature": gw_feat.converged},
        "curvature_sd": {"original": curv_orig.sd, "reconstructed": curv_recon.sd},
        "norm_degree_profile": [
            {"bucket": r.bucket, "count": r.count, "mean_norm": r.mean_norm,
             "q25": r.q25, "q50": r.q50, "q75": r.q75} for r in profile],
        "svg_paths": [str(svg_class), str(svg_degree)],
    }
    _dump_json(out / "report.json", report)
    return report


def run_bounds(out_dir: str | None = None, num_graphs: int = 50,
               max_nodes: int = 30,
               alpha_grid=(0.0, 0.25, 0.5, 0.75, 1.0),
               beta_grid=(0.0, 1.0, 2.0), seed: int = 0, draws: int = 2000,
               num_templates: int = 5, sigma: float = 0.3,
               m_variant: str = "conservative", delta: float = 0.1,
               corrupt_factor: float = 1.0) -> dict:
    """Verify the norm bound and the noise bounds on random graphs.

    Returns a report dict with per-(alpha, beta) worst slack and violation
    counts; ``corrupt_factor`` deliberately scales the bounds (self-test
    hook).  The Monte-Carlo mean check allows five standard errors of slack;
    the quantile check compares against the high-probability bound directly.
    """
    rng = np.random.default_rng(seed)
    norm_checks = []
    for alpha in alpha_grid:
        for beta in beta_grid:
            worst = np.inf
            violations = 0
            for g in range(num_graphs):
                n = int(rng.integers(4, max_nodes + 1))
                graph = generate_random_graph(n, 0.25, seed=int(rng.integers(2 ** 31)),
                                              min_degree=1)
                z = rng.random((n, 3)) * 2.0
                report = check_norm_bound(graph, alpha, beta, z, m_variant)
                bound = report.bound * corrupt_factor
                violations += int(np.sum(report.empirical > bound + 1e-9))
                worst = min(worst, float(np.min(bound - report.empirical)))
            norm_checks.append({"alpha": float(alpha), "beta": float(beta),
                                "violations": violations, "worst_slack": worst})

    mc_checks = []
    feature_dim, num_cols = 6, 4
    for t in range(num_templates):
        n = int(rng.integers(8, 19))
        graph = generate_random_connected_graph(n, extra_edges=n // 2,
                                                seed=int(rng.integers(2 ** 31)))
        w = np.random.default_rng([seed, 404, t]).uniform(
            -1.0, 1.0, size=(feature_dim, num_cols)) * np.sqrt(6.0 / (feature_dim + num_cols))
        w_fro = float(np.sqrt(np.sum(w ** 2)))
        eps = np.random.default_rng([seed, 505, t]).standard_normal(
            (draws, n, feature_dim)) * sigma
        for family in FAMILIES:
            for alpha in alpha_grid:
                for beta in beta_grid:
                    op = build_operator(graph, ConvParams(alpha, beta, family))
                    conv = (op.matrix @ eps.transpose(1, 0, 2).reshape(n, -1)).reshape(
                        n, draws, feature_dim)
                    sq = np.einsum("ndp,pc->ndc", conv, w)
                    sq = np.sum(sq ** 2, axis=2)  # (n, draws)
                    mu, high = noise_distance_bounds(graph, alpha, beta, sigma,
                                                     w_fro, delta, family)
                    mu = mu * corrupt_factor
                    high = high * corrupt_factor
                    mean = sq.mean(axis=1)
                    se = sq.std(axis=1, ddof=1) / np.sqrt(draws)
                    q = np.quantile(sq, 1.0 - delta, axis=1)
                    mean_bad = int(np.sum(mean > mu + 5.0 * se))
                    q_bad = int(np.sum(q > high + 1e-9))
                    mc_checks.append({
                        "template": t, "family": family, "alpha": float(alpha),
                        "beta": float(beta), "mean_violations": mean_bad,
                        "quantile_violations": q_bad,
                        "worst_mean_excess": float(np.max(mean - mu)),
                        "worst_quantile_slack": float(np.min(high - q)),
                    })

    total = (sum(c["violations"] for c in norm_checks)
             + sum(c["mean_violations"] + c["quantile_violations"] for c in mc_checks))
    report = {"seed": seed, "m_variant": m_variant, "sigma": sigma,
              "draws": draws, "total_violations": total,
              "norm_bound": norm_checks, "noise_bound_mc": mc_checks}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _dump_json(out / "report.json", report)
    return report

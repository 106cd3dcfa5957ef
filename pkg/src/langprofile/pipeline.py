"""End-to-end analysis pipeline behind a flat INI-style config.

Stages: load (transcript extraction or feature-CSV ingest) -> impute ->
standardize -> correlation prune -> PCA -> silhouette sweep -> k-means at
the chosen k -> Ward/DBSCAN cross-checks -> boundary cases -> outliers ->
cross-plane agreement -> profiles and effect statistics -> report bundle.

Every report embeds the config hash and seed; a rerun with identical
input bytes and config produces byte-identical outputs.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import chat, clustering, ngram, numerics
from .errors import (
    ConfigError,
    DataError,
    NonNumericCell,
    PipelineError,
    SchemaMismatch,
)
from .features import extract as fx
from .features import scoring
from .features.schema import FEATURE_NAMES, csv_header
from .numerics import FeatureMatrix

SCHEMA_VERSION = "1"
SEED_ENV_VAR = "LANGPROFILE_SEED"

REPORT_FILES = ("feature_matrix.csv", "pca_report.json", "cluster_report.json",
                "boundary_report.json", "pc_scores.csv", "silhouette_sweep.csv")


# -- configuration -----------------------------------------------------------

_DEFAULTS = {
    "schema": {"count_fusions": "false", "dss_table": "", "ipsyn_table": ""},
    "lm": {"smoothing_k": "1.0", "unk_threshold": "1", "loo": "false"},
    "prune": {"threshold": "0.95"},
    "pca": {"top_k": "5"},
    "clustering": {"k_range": "2..10", "n_init": "32", "boundary_percentile": "5.0",
                   "pc_dims": "3", "dbscan_eps": "auto", "dbscan_min_pts": "5",
                   "effect_features": "child_TNW,mlu_morphemes,word_errors"},
}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_k_range(text: str) -> tuple[int, ...]:
    text = text.strip()
    if ".." in text:
        lo_text, hi_text = text.split("..", 1)
        lo, hi = int(lo_text), int(hi_text)
        if hi < lo:
            raise ConfigError(f"empty k_range {text!r}")
        return tuple(range(lo, hi + 1))
    return tuple(int(part) for part in text.split(","))


@dataclass(frozen=True)
class PipelineConfig:
    input_mode: str                 # "transcripts" | "csv"
    input_path: str
    output_dir: str
    seed: int
    count_fusions: bool = False
    dss_table: str = ""
    ipsyn_table: str = ""
    smoothing_k: float = 1.0
    unk_threshold: int = 1
    loo: bool = False
    prune_threshold: float = 0.95
    top_k: int = 5
    k_range: tuple[int, ...] = tuple(range(2, 11))
    n_init: int = 32
    boundary_percentile: float = 5.0
    pc_dims: int = 3
    dbscan_eps: str = "auto"        # "auto" or a float literal
    dbscan_min_pts: int = 5
    effect_features: tuple[str, ...] = ("child_TNW", "mlu_morphemes", "word_errors")

    def canonical(self) -> str:
        pairs = sorted((k, v) for k, v in self.__dict__.items())
        return "\n".join(f"{k}={v!r}" for k, v in pairs) + "\n"

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()


def load_config(path: str | Path) -> PipelineConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")

    def get(section: str, key: str, required: bool = False) -> str:
        if parser.has_option(section, key):
            return parser.get(section, key).strip()
        default = _DEFAULTS.get(section, {}).get(key)
        if default is None and required:
            raise ConfigError(f"missing required config key [{section}] {key}")
        return default if default is not None else ""

    mode = get("input", "mode", required=True).lower()
    if mode not in ("transcripts", "csv"):
        raise ConfigError(f"input mode must be 'transcripts' or 'csv', got {mode!r}")
    in_path = get("input", "path", required=True)
    out_dir = get("output", "dir", required=True)

    seed_text = os.environ.get(SEED_ENV_VAR, "").strip() or get("clustering", "seed")
    if not seed_text:
        raise ConfigError("a clustering seed is required ([clustering] seed "
                          f"or ${SEED_ENV_VAR})")
    try:
        seed = int(seed_text)
    except ValueError:
        raise ConfigError(f"seed must be an integer, got {seed_text!r}") from None

    percentile = float(get("clustering", "boundary_percentile"))
    if not 0.0 < percentile < 50.0:
        raise ConfigError(f"boundary_percentile must be in (0, 50), got {percentile}")

    eps = get("clustering", "dbscan_eps")
    if eps != "auto":
        float(eps)  # validate now

    return PipelineConfig(
        input_mode=mode,
        input_path=in_path,
        output_dir=out_dir,
        seed=seed,
        count_fusions=_parse_bool(get("schema", "count_fusions")),
        dss_table=get("schema", "dss_table"),
        ipsyn_table=get("schema", "ipsyn_table"),
        smoothing_k=float(get("lm", "smoothing_k")),
        unk_threshold=int(get("lm", "unk_threshold")),
        loo=_parse_bool(get("lm", "loo")),
        prune_threshold=float(get("prune", "threshold")),
        top_k=int(get("pca", "top_k")),
        k_range=_parse_k_range(get("clustering", "k_range")),
        n_init=int(get("clustering", "n_init")),
        boundary_percentile=percentile,
        pc_dims=int(get("clustering", "pc_dims")),
        dbscan_eps=eps,
        dbscan_min_pts=int(get("clustering", "dbscan_min_pts")),
        effect_features=tuple(f.strip() for f in
                              get("clustering", "effect_features").split(",") if f.strip()),
    )


# -- cohort: feature matrix plus per-row metadata ------------------------------

@dataclass(frozen=True)
class Cohort:
    matrix: FeatureMatrix
    corpus: tuple[str, ...]
    group: tuple[str, ...]          # "SLI" | "TD" | ""
    age_months: tuple[object, ...]  # int | None
    sex: tuple[str, ...]            # "M" | "F" | ""

    @property
    def outcomes(self) -> np.ndarray:
        return np.array([1.0 if g == "SLI" else 0.0 for g in self.group])


def _format_number(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return ""
    return f"{x:.10g}"


def render_feature_csv(cohort: Cohort) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(csv_header())
    for i, row_id in enumerate(cohort.matrix.row_ids):
        age = cohort.age_months[i]
        meta = [row_id, cohort.corpus[i], cohort.group[i],
                "" if age is None else str(age), cohort.sex[i]]
        writer.writerow(meta + [_format_number(v) for v in cohort.matrix.values[i]])
    return buf.getvalue()


def ingest_feature_csv(path: str | Path) -> Cohort:
    """Load a feature CSV whose header matches the documented schema."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch(f"{path}: empty file") from None
        expected = list(csv_header())
        if header != expected:
            missing = [c for c in expected if c not in header]
            extra = [c for c in header if c not in expected]
            raise SchemaMismatch(
                f"{path}: header mismatch; missing={missing} extra={extra} "
                "(column order must match the documented schema)")
        ids, corpus, group, ages, sex, rows = [], [], [], [], [], []
        for r, row in enumerate(reader, start=1):
            if len(row) != len(expected):
                raise SchemaMismatch(f"{path}: row {r} has {len(row)} fields, "
                                     f"expected {len(expected)}")
            ids.append(row[0])
            corpus.append(row[1])
            glabel = row[2].strip().upper()
            group.append(glabel if glabel in ("SLI", "TD") else "")
            if row[3].strip():
                try:
                    ages.append(int(row[3]))
                except ValueError:
                    raise NonNumericCell(f"{path}: row {r}, column 'age_months': "
                                         f"{row[3]!r}") from None
            else:
                ages.append(None)
            sex.append(row[4].strip().upper())
            vals = []
            for name, cell in zip(FEATURE_NAMES, row[5:]):
                cell = cell.strip()
                if not cell:
                    vals.append(float("nan"))
                    continue
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise NonNumericCell(
                        f"{path}: row {r}, column {name!r}: {cell!r}") from None
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows")
    matrix = FeatureMatrix(np.array(rows, dtype=float), FEATURE_NAMES, tuple(ids))
    return Cohort(matrix, tuple(corpus), tuple(group), tuple(ages), tuple(sex))


# -- transcript extraction ------------------------------------------------------

def load_transcripts(directory: str | Path) -> list[chat.Transcript]:
    paths = sorted(Path(directory).glob("*.cha"))
    if not paths:
        raise DataError(f"no .cha files under {directory!r}")
    out = []
    for p in paths:
        out.append(chat.parse_chat(p.read_text(encoding="utf-8"), transcript_id=p.stem))
    return out


def _resolve_tables(config: PipelineConfig) -> tuple[dict | None, dict | None]:
    dss = scoring.load_table(config.dss_table) if config.dss_table else None
    ipsyn = scoring.load_table(config.ipsyn_table) if config.ipsyn_table else None
    return dss, ipsyn


def extract_cohort(transcripts: list[chat.Transcript],
                   config: PipelineConfig) -> Cohort:
    """Two-pass extraction: base features feed group statistics and the
    language models, then every transcript gets its full vector."""
    dss_table, ipsyn_table = _resolve_tables(config)
    base_rows = []
    for t in transcripts:
        row: dict[str, float] = {}
        row.update(fx.production_counts(t))
        measures, _ = fx.utterance_measures(t, config.count_fusions)
        row.update(measures)
        lex, _ = fx.lexical_measures(t)
        row.update(lex)
        row.update(fx.fluency_and_errors(t))
        base_rows.append(row)
    groups = [t.group.value for t in transcripts]
    stats = fx.GroupStats.from_rows(base_rows, groups)
    full_models = ngram.train_group_models(transcripts, config.smoothing_k,
                                           config.unk_threshold)

    values = np.empty((len(transcripts), len(FEATURE_NAMES)))
    for i, t in enumerate(transcripts):
        models = full_models
        if config.loo and t.group.value in ("SLI", "TD"):
            label = t.group.value
            rest = [x for x in transcripts if x is not t and x.group.value == label]
            models = dict(full_models)
            models[label] = {o: ngram.train(rest, o, config.smoothing_k,
                                            config.unk_threshold)
                             for o in (1, 2, 3)}
        vec = fx.extract_all(t, stats, models, config.count_fusions,
                             dss_table, ipsyn_table)
        values[i] = [vec.values[name] for name in FEATURE_NAMES]

    matrix = FeatureMatrix(values, FEATURE_NAMES, tuple(t.id for t in transcripts))
    return Cohort(
        matrix,
        tuple(t.corpus for t in transcripts),
        tuple(t.group.value for t in transcripts),
        tuple(t.age_months for t in transcripts),
        tuple(t.sex or "" for t in transcripts),
    )


# -- report serialization ---------------------------------------------------------

def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.10g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(f"{float(obj):.10g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def dumps_report(obj: dict) -> str:
    return json.dumps(_round_floats(obj), indent=2) + "\n"


# -- the pipeline proper -----------------------------------------------------------

@dataclass(frozen=True)
class ReportBundle:
    output_dir: Path
    files: dict[str, str] = field(default_factory=dict)
    pca_report: dict = field(default_factory=dict)
    cluster_report: dict = field(default_factory=dict)
    boundary_report: dict = field(default_factory=dict)


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc


def _auto_eps(points: np.ndarray, min_pts: int) -> float:
    D = clustering._pairwise_distances(points)
    D.sort(axis=1)
    kth = D[:, min(min_pts, D.shape[1] - 1)]
    return float(np.median(kth))


def run_pipeline(config: PipelineConfig) -> ReportBundle:
    if config.input_mode == "csv":
        cohort = _stage("load", ingest_feature_csv, config.input_path)
    else:
        transcripts = _stage("load", load_transcripts, config.input_path)
        cohort = _stage("extract", extract_cohort, transcripts, config)

    n = cohort.matrix.n
    bad_k = [k for k in config.k_range if not 2 <= k <= n - 1]
    if bad_k:
        raise PipelineError("load", DataError(
            f"k_range values {bad_k} outside [2, n-1] for n={n}"))

    imputed, n_imputed = _stage("impute", numerics.impute_missing, cohort.matrix)
    standardized, std_params = _stage("standardize", numerics.standardize, imputed)
    retained_idx = _stage("prune", numerics.prune_correlated,
                          standardized, config.prune_threshold)
    pruned = standardized.select(retained_idx)
    pruned_names = set(standardized.col_names) - set(pruned.col_names)

    model = _stage("pca", numerics.pca_fit, pruned)
    scores = _stage("pca", numerics.pca_project, model, pruned)
    ratios, cum = _stage("pca", numerics.explained_variance, model.eigenvalues)

    m_dims = max(1, min(config.pc_dims, scores.shape[1]))
    space = scores[:, :m_dims]

    sweep = _stage("sweep", clustering.silhouette_sweep,
                   space, config.k_range, config.seed, config.n_init)
    best_score = max(s for _, s in sweep)
    chosen_k = next(k for k, s in sweep if s == best_score)  # ties: smallest k

    km = _stage("kmeans", clustering.kmeans, space, chosen_k,
                config.seed, config.n_init)
    order = np.argsort(-km.centroids[:, 0], kind="stable")
    relabel = np.empty(chosen_k, dtype=int)
    relabel[order] = np.arange(chosen_k)
    assignments = relabel[km.assignments]
    centroids = km.centroids[order]

    ward_labels = _stage("cross_check", clustering.ward_linkage, space, chosen_k)
    eps = float(config.dbscan_eps) if config.dbscan_eps != "auto" \
        else _stage("cross_check", _auto_eps, space, config.dbscan_min_pts)
    db_labels = _stage("cross_check", clustering.dbscan,
                       space, eps, config.dbscan_min_pts)
    non_noise = db_labels >= 0
    dbscan_ari = clustering.ari(assignments[non_noise], db_labels[non_noise]) \
        if non_noise.sum() > 1 and len(set(db_labels[non_noise])) >= 1 else 0.0

    outcomes = cohort.outcomes
    boundary = _stage("boundary", clustering.boundary_cases,
                      space, centroids, outcomes, config.boundary_percentile)
    outliers = _stage("outliers", clustering.detect_outliers, space, centroids)

    agreement = []
    if scores.shape[1] >= 3:
        planes = {"pc1_pc2": scores[:, [0, 1]], "pc1_pc3": scores[:, [0, 2]],
                  "pc2_pc3": scores[:, [1, 2]]}
        plane_labels = {name: clustering.kmeans(pts, chosen_k, config.seed,
                                                config.n_init).assignments
                        for name, pts in planes.items()}
        for left, right in (("pc1_pc2", "pc1_pc3"), ("pc1_pc2", "pc2_pc3"),
                            ("pc1_pc3", "pc2_pc3")):
            agreement.append({
                "planes": f"{left}_vs_{right}",
                "adjusted_rand_index": clustering.ari(plane_labels[left],
                                                      plane_labels[right]),
                "adjusted_mutual_information": clustering.ami(plane_labels[left],
                                                              plane_labels[right]),
                "accuracy_best_mapping": clustering.best_mapping_accuracy(
                    plane_labels[left], plane_labels[right]),
            })

    profiles = _stage("profiles", clustering.cluster_profiles,
                      assignments, scores, outcomes)
    effect_feats = [f for f in config.effect_features
                    if f in imputed.col_names]
    effects = _stage("effects", clustering.compare_features,
                     imputed.values, imputed.col_names, assignments,
                     effect_feats) if chosen_k >= 2 else []

    # ---- assemble reports ----
    meta = {"schema_version": SCHEMA_VERSION, "config_hash": config.config_hash,
            "seed": config.seed}

    pca_report = {
        **meta,
        "n_rows": n,
        "preprocessing": {
            "imputed_cells": n_imputed,
            "dropped_constant": list(std_params.dropped),
            "prune_threshold": config.prune_threshold,
            "pruned": sorted(pruned_names),
            "retained": list(pruned.col_names),
        },
        "components": [
            {"component": f"PC{i + 1}", "eigenvalue": float(model.eigenvalues[i]),
             "variance_pct": float(ratios[i]), "cumulative_pct": float(cum[i])}
            for i in range(len(model.eigenvalues))
        ],
        "kaiser_count": numerics.kaiser_count(model.eigenvalues),
        "elbow_count": numerics.elbow_count(model.eigenvalues)
        if len(model.eigenvalues) >= 3 else None,
        "loadings": numerics.loadings_report(model, config.top_k,
                                             n_components=min(5, scores.shape[1])),
        "component_stats": numerics.component_stats(scores,
                                                    n_components=min(5, scores.shape[1])),
    }

    flagged = set(boundary.indices)
    outlier_set = set(int(i) for i in outliers)
    boundary_pcs = {}
    for j in range(min(3, scores.shape[1])):
        col = scores[list(boundary.indices), j] if boundary.indices else np.array([0.0])
        boundary_pcs[f"pc{j + 1}_mean"] = float(col.mean())
        boundary_pcs[f"pc{j + 1}_sd"] = float(col.std(ddof=1)) if col.size > 1 else 0.0

    boundary_report = {
        **meta,
        "percentile": config.boundary_percentile,
        "threshold": boundary.threshold,
        "n_flagged": len(boundary.indices),
        "flagged_fraction": len(boundary.indices) / n,
        **boundary_pcs,
        "outcome_ratio": boundary.outcome_ratio,
        "indices": [cohort.matrix.row_ids[i] for i in boundary.indices],
    }

    cluster_report = {
        **meta,
        "silhouette_sweep": [{"k": k, "silhouette": s} for k, s in sweep],
        "chosen_k": chosen_k,
        "n_init": config.n_init,
        "inertia": km.inertia,
        "clusters": [
            {"cluster": p.cluster, "size": p.size,
             **{f"pc{j + 1}_mean": p.pc_means[j] for j in range(len(p.pc_means))},
             "y_ratio": p.outcome_ratio}
            for p in profiles
        ],
        "effects": [
            {"feature": e.feature, "cluster0_mean": e.mean0, "cluster1_mean": e.mean1,
             "p_value": e.p_value, "cohens_d": e.cohens_d}
            for e in effects
        ],
        "agreement": agreement,
        "cross_checks": {
            "ward_ari": clustering.ari(assignments, ward_labels),
            "ward_ami": clustering.ami(assignments, ward_labels),
            "dbscan_eps": eps,
            "dbscan_min_pts": config.dbscan_min_pts,
            "dbscan_clusters": int(db_labels.max() + 1),
            "dbscan_noise": int((~non_noise).sum()),
            "dbscan_ari_non_noise": dbscan_ari,
        },
    }

    # ---- plot CSVs ----
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    n_plot = min(3, scores.shape[1])
    writer.writerow(["id"] + [f"pc{j + 1}" for j in range(n_plot)]
                    + ["cluster", "boundary", "outlier"])
    for i, row_id in enumerate(cohort.matrix.row_ids):
        writer.writerow([row_id]
                        + [_format_number(scores[i, j]) for j in range(n_plot)]
                        + [int(assignments[i]), int(i in flagged), int(i in outlier_set)])
    pc_scores_csv = buf.getvalue()

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "silhouette"])
    for k, s in sweep:
        writer.writerow([k, _format_number(s)])
    sweep_csv = buf.getvalue()

    files = {
        "feature_matrix.csv": render_feature_csv(cohort),
        "pca_report.json": dumps_report(pca_report),
        "cluster_report.json": dumps_report(cluster_report),
        "boundary_report.json": dumps_report(boundary_report),
        "pc_scores.csv": pc_scores_csv,
        "silhouette_sweep.csv": sweep_csv,
    }

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        for name, content in files.items():
            target = out_dir / name
            target.write_text(content, encoding="utf-8")
            written.append(target)
    except Exception as exc:
        for p in written:
            p.unlink(missing_ok=True)
        raise PipelineError("write", exc) from exc

    return ReportBundle(out_dir, files, pca_report, cluster_report, boundary_report)

"""Report assembly: golden-stable CSV/JSON serialization for the CLI commands.

All floating-point output is serialized at 6 significant digits in plain
decimal notation so committed golden files compare byte-identically across
platforms.  Manifests record the full command context next to every output.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from itertools import combinations
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from . import __version__
from .corpus import Corpus, rank_frequency
from .embeddings import EmbeddingMatrix
from .metric import CoreBreakdown, CoreConfig, compute_core, core_per_dialog
from .modes import cluster_modes
from .stats import mann_whitney_u, summarize

SUMMARY_METRICS = ("core", "zipf_alpha", "heaps_beta", "unique_tokens")
COMPARE_METRICS = ("core", "heaps_beta", "zipf_alpha")


def fmt6(x: float) -> str:
    """Fixed-point decimal with 6 significant digits, no exponent notation."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    if x == 0.0:
        return "0"
    return np.format_float_positional(x, precision=6, unique=False, fractional=False, trim="-")


def round6(x: float) -> float:
    """Round to the 6-significant-digit grid used for serialization."""
    return float(fmt6(x))


def flags_str(flags: Iterable[str]) -> str:
    return "|".join(sorted(flags))


def breakdown_json(b: CoreBreakdown) -> dict:
    return {
        "entropy_term": round6(b.entropy_term),
        "repetition_ratio": round6(b.repetition_ratio),
        "repetition_term": round6(b.repetition_term),
        "raw_stagnation": round6(b.raw_stagnation),
        "stagnation_term": round6(b.stagnation_term),
        "alpha_used": round6(b.alpha_used),
        "beta_used": round6(b.beta_used),
        "core": round6(b.core),
        "flags": sorted(b.flags),
    }


@dataclass(frozen=True)
class CorpusAnalysis:
    label: str
    corpus: Corpus
    breakdown: CoreBreakdown
    per_dialog: list[tuple[str, CoreBreakdown]]
    condition_samples: list[dict]


def analyze_corpus(label: str, corpus: Corpus, matrix: EmbeddingMatrix,
                   config: CoreConfig) -> CorpusAnalysis:
    """Full analysis of one corpus: corpus-level and per-dialog breakdowns,
    plus one (fit exponents, score) sample per condition present, which is
    what the condition-comparison command consumes."""
    assignment = cluster_modes(matrix, config.k_max, config.cluster_seed)
    breakdown = compute_core(corpus, matrix, config, assignment=assignment)
    per_dialog = core_per_dialog(corpus, matrix, config, assignment)

    samples = []
    for condition in sorted({d.condition for d in corpus.dialogs}):
        sub = Corpus(dialogs=tuple(d for d in corpus.dialogs if d.condition == condition))
        sub_matrix = matrix.subset(sub)
        sub_breakdown = compute_core(sub, sub_matrix, config)
        stats = rank_frequency(sub)
        samples.append({
            "corpus": label,
            "condition": condition,
            "zipf_alpha": sub_breakdown.alpha_used,
            "heaps_beta": sub_breakdown.beta_used,
            "core": sub_breakdown.core,
            "unique_tokens": len(stats.entries),
            "total_tokens": stats.total_tokens,
        })
    return CorpusAnalysis(label=label, corpus=corpus, breakdown=breakdown,
                          per_dialog=per_dialog, condition_samples=samples)


def analysis_report_json(analyses: list[CorpusAnalysis], config: CoreConfig) -> dict:
    corpora = []
    for a in analyses:
        conditions = {d.id: d.condition for d in a.corpus.dialogs}
        corpora.append({
            "corpus": a.label,
            "core_breakdown": breakdown_json(a.breakdown),
            "per_dialog": [
                {"dialog_id": did, "condition": conditions[did], **breakdown_json(b)}
                for did, b in a.per_dialog
            ],
        })
    return {"config": asdict(config), "corpora": corpora}


def write_per_dialog_csv(analyses: list[CorpusAnalysis], fh: IO[str]) -> None:
    fh.write("dialog_id,condition,core,entropy_term,repetition_term,stagnation_term,flags\n")
    for a in analyses:
        conditions = {d.id: d.condition for d in a.corpus.dialogs}
        for did, b in a.per_dialog:
            fh.write(",".join([
                did, conditions[did], fmt6(b.core), fmt6(b.entropy_term),
                fmt6(b.repetition_term), fmt6(b.stagnation_term), flags_str(b.flags),
            ]) + "\n")


def write_condition_samples_csv(analyses: list[CorpusAnalysis], fh: IO[str]) -> None:
    fh.write("corpus,condition,zipf_alpha,heaps_beta,core,unique_tokens,total_tokens\n")
    for a in analyses:
        for s in a.condition_samples:
            fh.write(",".join([
                s["corpus"], s["condition"], fmt6(s["zipf_alpha"]), fmt6(s["heaps_beta"]),
                fmt6(s["core"]), str(s["unique_tokens"]), str(s["total_tokens"]),
            ]) + "\n")


def write_summary_csv(analyses: list[CorpusAnalysis], fh: IO[str], ddof: int = 0) -> None:
    """Per-condition summary rows in the metric order core, zipf_alpha,
    heaps_beta, unique_tokens.  Core is summarized over per-dialog scores;
    the rest over per-(corpus, condition) samples."""
    core_by_cond: dict[str, list[float]] = {}
    sample_by_cond: dict[str, list[dict]] = {}
    for a in analyses:
        conditions = {d.id: d.condition for d in a.corpus.dialogs}
        for did, b in a.per_dialog:
            core_by_cond.setdefault(conditions[did], []).append(b.core)
        for s in a.condition_samples:
            sample_by_cond.setdefault(s["condition"], []).append(s)

    fh.write("condition,metric,mean,std_dev,max,min,range\n")
    for condition in sorted(core_by_cond):
        for metric in SUMMARY_METRICS:
            if metric == "core":
                values = core_by_cond[condition]
            else:
                values = [float(s[metric]) for s in sample_by_cond.get(condition, [])]
            if not values:
                continue
            row = summarize(values, ddof=ddof)
            fh.write(",".join([
                condition, metric, fmt6(row.mean), fmt6(row.std_dev),
                fmt6(row.max), fmt6(row.min), fmt6(row.range),
            ]) + "\n")


def read_condition_samples(paths: Iterable[str | Path]) -> dict[str, dict[str, list[float]]]:
    """Read condition-sample CSVs into {metric: {condition: values}}."""
    grouped: dict[str, dict[str, list[float]]] = {m: {} for m in COMPARE_METRICS}
    for path in paths:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                condition = row["condition"]
                for metric in COMPARE_METRICS:
                    grouped[metric].setdefault(condition, []).append(float(row[metric]))
    return grouped


def compare_rows(grouped: dict[str, dict[str, list[float]]]) -> list[list[str]]:
    """Pairwise condition comparisons per metric, as CSV rows."""
    conditions = sorted({c for per in grouped.values() for c in per})
    if len(conditions) < 2:
        raise ValueError("compare needs at least two conditions with samples")
    rows = []
    for c1, c2 in combinations(conditions, 2):
        for metric in COMPARE_METRICS:
            xs = grouped[metric].get(c1, [])
            ys = grouped[metric].get(c2, [])
            if not xs or not ys:
                raise ValueError(f"condition {c1 if not xs else c2!r} has no {metric} samples")
            res = mann_whitney_u(xs, ys)
            rows.append([f"{c1}_vs_{c2}", metric, fmt6(res.u), fmt6(res.p_value), res.method])
    return rows


def write_compare_csv(rows: list[list[str]], fh: IO[str]) -> None:
    fh.write("comparison,metric,u,p_value,method\n")
    for row in rows:
        fh.write(",".join(row) + "\n")


def parse_dialog_index(dialog_id: str) -> tuple[str, int]:
    """Extract (agent_a, trailing dialog index) from a generated dialog id."""
    parts = dialog_id.split("__")
    if len(parts) < 2 or not parts[-1].isdigit():
        raise ValueError(f"dialog id {dialog_id!r} has no trailing '__<index>'")
    return parts[0], int(parts[-1])


def temporal_rows(per_dialog_paths: Iterable[str | Path]) -> list[list[str]]:
    """Average score per (condition, agent_a, dialog_index) from per-dialog CSVs."""
    groups: dict[tuple[str, str, int], list[float]] = {}
    for path in per_dialog_paths:
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                agent_a, index = parse_dialog_index(row["dialog_id"])
                key = (row["condition"], agent_a, index)
                groups.setdefault(key, []).append(float(row["core"]))
    rows = []
    for (condition, agent_a, index) in sorted(groups):
        values = groups[(condition, agent_a, index)]
        rows.append([condition, agent_a, str(index), fmt6(sum(values) / len(values))])
    return rows


def write_temporal_csv(rows: list[list[str]], fh: IO[str]) -> None:
    fh.write("condition,agent_a,dialog_index,mean_core\n")
    for row in rows:
        fh.write(",".join(row) + "\n")


def write_fit_csv(rows: list[dict], fh: IO[str]) -> None:
    fh.write("corpus,alpha,alpha_r2,beta,beta_r2,unique_tokens,total_tokens\n")
    for r in rows:
        fh.write(",".join([
            r["corpus"], fmt6(r["alpha"]), fmt6(r["alpha_r2"]), fmt6(r["beta"]),
            fmt6(r["beta_r2"]), str(r["unique_tokens"]), str(r["total_tokens"]),
        ]) + "\n")


def write_behavior_csv(rows: list[dict], fh: IO[str]) -> None:
    fh.write("dialog_id,condition,toxicity,sentiment,repetition_rate,"
             "agreement_rate,disagreement_rate,hedging_rate\n")
    for r in rows:
        tox = "" if r["toxicity"] is None else fmt6(r["toxicity"])
        fh.write(",".join([
            r["dialog_id"], r["condition"], tox, fmt6(r["sentiment"]),
            fmt6(r["repetition_rate"]), fmt6(r["agreement_rate"]),
            fmt6(r["disagreement_rate"]), fmt6(r["hedging_rate"]),
        ]) + "\n")


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def write_manifest(path: str | Path, *, command: str, argv: list[str],
                   inputs: list[str], config: dict, seeds: dict,
                   started_at: str, finished_at: str) -> None:
    """Record the command context alongside its outputs for reproducibility."""
    manifest = {
        "command": command,
        "argv": list(argv),
        "inputs": list(inputs),
        "config": config,
        "seeds": seeds,
        "version": __version__,
        "started_at": started_at,
        "finished_at": finished_at,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")

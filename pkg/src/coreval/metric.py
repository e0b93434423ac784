"""The conversational robustness score (CORE).

CORE is the product of three factors in [0, 1]: normalized mode entropy,
a repetition penalty (1 - repeated n-gram fraction)^alpha, and a semantic
stagnation penalty clamp(1 - mean consecutive cosine, 0, 1)^beta.  The
alpha/beta exponents default to the corpus's own fitted rank-frequency and
vocabulary-growth exponents, so the score is calibrated against the
corpus's typical statistical profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, Dialog, NgramTable, dialog_ngram_counts, extract_ngrams, \
    rank_frequency, vocab_growth
from .embeddings import EmbeddingMatrix, dialog_stagnation
from .lawfit import FitError, fit_heaps, fit_zipf
from .modes import ModeAssignment, cluster_modes, mode_distribution, normalized_entropy

# Diagnostic flags carried on a breakdown.  The first three are the primary
# ones; empty_ngrams / no_stagnation_pairs mark inputs too short to measure
# the corresponding factor (the factor is then fixed by the degenerate rule).
FLAG_FIT_FALLBACK = "fit_fallback"
FLAG_STAGNATION_CLAMPED = "stagnation_clamped"
FLAG_DEGENERATE_MODES = "degenerate_modes"
FLAG_EMPTY_NGRAMS = "empty_ngrams"
FLAG_NO_STAGNATION_PAIRS = "no_stagnation_pairs"


@dataclass(frozen=True)
class CoreConfig:
    ngram_n: int = 3
    k_max: int = 10
    cluster_seed: int = 42
    alpha_source: str = "fit_from_corpus"  # or "explicit"
    beta_source: str = "fit_from_corpus"
    alpha: float = 1.0
    beta: float = 1.0
    fallback_exponent: float = 1.0
    zipf_min_count: int = 2
    zipf_max_rank: int | None = None
    heaps_stride: int = 50
    repetition_counting: str = "occurrences"  # or "types"

    def __post_init__(self):
        if self.ngram_n < 1:
            raise ValueError(f"ngram_n must be >= 1, got {self.ngram_n}")
        if self.k_max < 2:
            raise ValueError(f"k_max must be >= 2, got {self.k_max}")
        for name, value in (("alpha", self.alpha), ("beta", self.beta),
                            ("fallback_exponent", self.fallback_exponent)):
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        for name, value in (("alpha_source", self.alpha_source), ("beta_source", self.beta_source)):
            if value not in ("fit_from_corpus", "explicit"):
                raise ValueError(f"{name} must be 'fit_from_corpus' or 'explicit', got {value!r}")
        if self.repetition_counting not in ("occurrences", "types"):
            raise ValueError(f"repetition_counting must be 'occurrences' or 'types'")


@dataclass(frozen=True)
class CoreBreakdown:
    entropy_term: float
    repetition_ratio: float
    repetition_term: float
    raw_stagnation: float
    stagnation_term: float
    alpha_used: float
    beta_used: float
    core: float
    flags: frozenset[str]


def repeated_fraction(table: NgramTable, counting: str = "occurrences") -> float:
    """Fraction of n-gram occurrences whose type occurs more than once.

    With counting="types" the fraction is over distinct types instead of
    occurrences (a sensitivity-analysis variant).  Raises on an empty table;
    the caller decides the degenerate policy.
    """
    if table.total_occurrences < 1:
        raise ValueError("repeated_fraction undefined for an empty n-gram table")
    if counting == "occurrences":
        repeated = sum(c for c in table.counts.values() if c > 1)
        return repeated / table.total_occurrences
    if counting == "types":
        repeated = sum(1 for c in table.counts.values() if c > 1)
        return repeated / len(table.counts)
    raise ValueError(f"unknown counting mode {counting!r}")


def repetition_penalty(ratio: float, alpha: float) -> float:
    return (1.0 - ratio) ** alpha


def stagnation_penalty(raw_stagnation: float, beta: float) -> tuple[float, bool]:
    """(clamped (1 - raw)^beta, whether clamping was material).

    A negative mean cosine makes the base exceed 1, which would push the
    score above its [0, 1] range; the base is clamped and flagged.
    """
    base = 1.0 - raw_stagnation
    clamped = min(1.0, max(0.0, base))
    was_clamped = abs(clamped - base) > 1e-12
    return clamped ** beta, was_clamped


def resolve_exponents(corpus: Corpus, config: CoreConfig) -> tuple[float, float, frozenset[str]]:
    """Determine (alpha, beta) per config, fitting from the corpus when asked.

    A failed fit (too few usable points) falls back to
    config.fallback_exponent and raises the fit_fallback flag.
    """
    flags: set[str] = set()
    if config.alpha_source == "explicit":
        alpha = config.alpha
    else:
        try:
            alpha = fit_zipf(rank_frequency(corpus), min_count=config.zipf_min_count,
                             max_rank=config.zipf_max_rank).exponent
        except FitError:
            alpha = config.fallback_exponent
            flags.add(FLAG_FIT_FALLBACK)
    if config.beta_source == "explicit":
        beta = config.beta
    else:
        try:
            beta = fit_heaps(vocab_growth(corpus, config.heaps_stride)).exponent
        except FitError:
            beta = config.fallback_exponent
            flags.add(FLAG_FIT_FALLBACK)
    return alpha, beta, frozenset(flags)


def _check_alignment(corpus: Corpus, matrix: EmbeddingMatrix) -> None:
    keys = tuple(corpus.utterance_keys())
    if matrix.keys != keys:
        raise ValueError("embedding matrix is not aligned to the corpus iteration order")


def _dialog_row_slices(corpus: Corpus) -> list[tuple[Dialog, slice]]:
    slices = []
    offset = 0
    for dialog in corpus.dialogs:
        n = len(dialog.utterances)
        slices.append((dialog, slice(offset, offset + n)))
        offset += n
    return slices


def compute_core(corpus: Corpus, matrix: EmbeddingMatrix, config: CoreConfig,
                 assignment: ModeAssignment | None = None) -> CoreBreakdown:
    """Corpus-level CORE breakdown.

    Modes are clustered over all utterance embeddings (pass a precomputed
    ``assignment`` to reuse one); repetition is measured on the pooled
    per-dialog n-gram table; stagnation is the mean over dialogs with at
    least two utterances.  Raises if the corpus has no tokens or no dialog
    long enough for a stagnation pair.
    """
    _check_alignment(corpus, matrix)
    if not any(True for _ in corpus.iter_tokens()):
        raise ValueError("corpus has zero tokens")

    flags: set[str] = set()
    alpha, beta, fit_flags = resolve_exponents(corpus, config)
    flags |= fit_flags

    if assignment is None:
        assignment = cluster_modes(matrix, config.k_max, config.cluster_seed)
    if assignment.k == 1:
        entropy_term = 0.0
        flags.add(FLAG_DEGENERATE_MODES)
    else:
        entropy_term = normalized_entropy(mode_distribution(assignment), config.k_max)

    table = extract_ngrams(corpus, config.ngram_n)
    if table.total_occurrences == 0:
        ratio = 0.0
        rep_term = 1.0
        flags.add(FLAG_EMPTY_NGRAMS)
    else:
        ratio = repeated_fraction(table, config.repetition_counting)
        rep_term = repetition_penalty(ratio, alpha)

    stags = []
    for dialog, sl in _dialog_row_slices(corpus):
        if len(dialog.utterances) >= 2:
            stags.append(dialog_stagnation(matrix.rows[sl]))
    if not stags:
        raise ValueError("no dialog has >= 2 utterances; stagnation undefined")
    raw_stagnation = float(np.mean(stags))
    stag_term, was_clamped = stagnation_penalty(raw_stagnation, beta)
    if was_clamped:
        flags.add(FLAG_STAGNATION_CLAMPED)

    core = entropy_term * rep_term * stag_term
    return CoreBreakdown(
        entropy_term=entropy_term, repetition_ratio=ratio, repetition_term=rep_term,
        raw_stagnation=raw_stagnation, stagnation_term=stag_term,
        alpha_used=alpha, beta_used=beta, core=core, flags=frozenset(flags),
    )


def core_per_dialog(corpus: Corpus, matrix: EmbeddingMatrix, config: CoreConfig,
                    corpus_assignment: ModeAssignment) -> list[tuple[str, CoreBreakdown]]:
    """Per-dialog CORE breakdowns using corpus-level modes and exponents.

    Each dialog's entropy term uses its own label distribution under the
    corpus-wide clustering (same ln k_max normalizer); repetition and
    stagnation are restricted to the dialog.  Dialogs with a single
    utterance get stagnation_term 0 and the no_stagnation_pairs flag.
    """
    _check_alignment(corpus, matrix)
    alpha, beta, fit_flags = resolve_exponents(corpus, config)
    log_kmax = math.log(config.k_max)

    results = []
    for dialog, sl in _dialog_row_slices(corpus):
        flags = set(fit_flags)
        labels = corpus_assignment.labels[sl]
        counts = np.bincount(labels)
        probs = counts[counts > 0] / counts.sum()
        h = float(-np.sum(probs * np.log(probs)))
        entropy_term = min(1.0, max(0.0, h / log_kmax))
        if corpus_assignment.k == 1:
            flags.add(FLAG_DEGENERATE_MODES)

        ngram_counts = dialog_ngram_counts(dialog, config.ngram_n)
        total = sum(ngram_counts.values())
        if total == 0:
            ratio = 0.0
            rep_term = 1.0
            flags.add(FLAG_EMPTY_NGRAMS)
        else:
            table = NgramTable(n=config.ngram_n, counts=dict(ngram_counts), total_occurrences=total)
            ratio = repeated_fraction(table, config.repetition_counting)
            rep_term = repetition_penalty(ratio, alpha)

        if len(dialog.utterances) < 2:
            raw = 1.0
            stag_term = 0.0
            flags.add(FLAG_NO_STAGNATION_PAIRS)
        else:
            raw = dialog_stagnation(matrix.rows[sl])
            stag_term, was_clamped = stagnation_penalty(raw, beta)
            if was_clamped:
                flags.add(FLAG_STAGNATION_CLAMPED)

        core = entropy_term * rep_term * stag_term
        results.append((dialog.id, CoreBreakdown(
            entropy_term=entropy_term, repetition_ratio=ratio, repetition_term=rep_term,
            raw_stagnation=raw, stagnation_term=stag_term,
            alpha_used=alpha, beta_used=beta, core=core, flags=frozenset(flags),
        )))
    return results

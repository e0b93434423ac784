"""Walkthrough: the full robustness score on the bundled fixture corpus.

Loads the 12-dialog fixture and its embeddings, computes the corpus-level
breakdown (all three factors plus the self-calibrated exponents), then the
per-dialog scores.
"""

from pathlib import Path

from coreval import CoreConfig, cluster_modes, compute_core, core_per_dialog, \
    load_embeddings, parse_corpus

DATA = Path(__file__).parent.parent / "tests" / "data"

with open(DATA / "fixture_corpus.jsonl", "rb") as fh:
    corpus = parse_corpus(fh)
matrix = load_embeddings(DATA / "fixture_embeddings.jsonl", corpus)
config = CoreConfig()  # trigram repetition, k_max 10, exponents fit from corpus

breakdown = compute_core(corpus, matrix, config)
print("corpus-level breakdown:")
print(f"  entropy term      {breakdown.entropy_term:.4f}")
print(f"  repetition ratio  {breakdown.repetition_ratio:.4f}"
      f"  -> term {breakdown.repetition_term:.4f} (alpha {breakdown.alpha_used:.3f})")
print(f"  raw stagnation    {breakdown.raw_stagnation:.4f}"
      f"  -> term {breakdown.stagnation_term:.4f} (beta {breakdown.beta_used:.3f})")
print(f"  score             {breakdown.core:.4f}   flags: {sorted(breakdown.flags) or '-'}")

assignment = cluster_modes(matrix, config.k_max, config.cluster_seed)
print(f"\nper-dialog scores (modes k={assignment.k}):")
print(f"  {'dialog':<34} {'condition':<12} {'score':>7}")
for dialog_id, b in core_per_dialog(corpus, matrix, config, assignment):
    condition = dialog_id.split("__")[2]
    print(f"  {dialog_id:<34} {condition:<12} {b.core:>7.4f}")

print("\nThe same numbers are produced as JSON/CSV by `coreval analyze`.")

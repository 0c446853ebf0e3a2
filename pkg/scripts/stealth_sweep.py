"""
Classifier stealth sweep over window sizes.

Generates a synthetic corpus with a skewed branch-kind distribution, builds the
labeled branch dataset once at the largest window, and trains every model at
every window. A second pass with coin-flip labels gives the chance baseline.

Edit the configuration block below, then run:
    python scripts/stealth_sweep.py
"""

import json
from pathlib import Path

import numpy as np

from drndalo.config import ObfKey
from drndalo.corpus import generate_corpus
from drndalo.obfuscation import Mix64Hash
from drndalo.stealth import build_dataset, gain_captured, relabel, sweep_dataset
from drndalo.visualization import plot_window_sweep

# =============================================================================
# Configuration
# =============================================================================

# Synthetic programs and generator seed
PROGRAMS = 300
SEED = 0

# Window sizes (ascending)
WINDOWS = [1, 2, 4, 8, 16]

# Models: 'logreg', 'tree', 'forest'
MODELS = ['logreg', 'tree', 'forest']

# Key seed (None = fresh random key)
KEY_SEED = 2024

SPLIT_SEED = 0
WORKERS = 4

REPORT_DIR = './reports'

# =============================================================================

key = ObfKey.random(np.random.default_rng(KEY_SEED))
corpus = generate_corpus(PROGRAMS, seed=SEED)
dataset = build_dataset(corpus, key, Mix64Hash(), WINDOWS[-1], workers=WORKERS, verbose=True)
print(f"{len(dataset)} samples, class counts {dataset.class_counts()}")

results = {}
reports = []
for model in MODELS:
    print(f"\nTraining {model}...")
    model_reports = sweep_dataset(dataset, WINDOWS, model, SPLIT_SEED)
    for r in model_reports:
        print(f"  window {r.window:>2}: accuracy {r.accuracy:.3f}")
    print(f"  gain captured at the smallest window: {gain_captured(model_reports):.0%}")
    reports.extend(model_reports)
    results[model] = [r.to_dict() for r in model_reports]

print("\nRandom-label baseline...")
chance = sweep_dataset(relabel(dataset, seed=SPLIT_SEED), WINDOWS[:1], 'logreg', SPLIT_SEED)[0]
print(f"  window 1: accuracy {chance.accuracy:.3f}")
results['random_labels'] = chance.to_dict()

report_dir = Path(REPORT_DIR)
report_dir.mkdir(parents=True, exist_ok=True)
(report_dir / 'stealth.json').write_text(json.dumps(results, indent=2))
plot_window_sweep(reports, report_dir / 'stealth.png')

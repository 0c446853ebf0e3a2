"""
Keyless attacker sweep.

For each branch count n, builds a program with n forward branches, obfuscates
it under a random key, and compares the attacker's empirical success rate with
2^-n. Exhaustive search is used while 2^n stays small, sampling beyond that.

Edit the configuration block below, then run:
    python scripts/attack_sweep.py
"""

from pathlib import Path

import numpy as np
import pandas as pd

from drndalo.attack import brute_force
from drndalo.config import ObfKey
from drndalo.corpus import GeneratorConfig, generate_corpus
from drndalo.obfuscation import Mix64Hash, obfuscate

# =============================================================================
# Configuration
# =============================================================================

# Branch counts to sweep
BRANCH_COUNTS = [1, 2, 4, 6, 8, 10, 12, 16, 20, 24, 32]

# Largest n searched exhaustively
EXHAUSTIVE_LIMIT = 16

# Sampled trials per program
TRIALS = 100_000

SEED = 0

OUTPUT = './reports/attack.csv'

# =============================================================================

rng = np.random.default_rng(SEED)
rows = []
for i, n in enumerate(BRANCH_COUNTS, 1):
    config = GeneratorConfig(min_branches=n, max_branches=n, loop_probability=0.0)
    program = generate_corpus(1, seed=SEED + n, config=config)['synth_000']
    obfuscated, _ = obfuscate(program, Mix64Hash(), ObfKey.random(rng))
    if n <= EXHAUSTIVE_LIMIT:
        report = brute_force(obfuscated, program, mode='exhaustive')
    else:
        report = brute_force(obfuscated, program, mode='sampled', trials=TRIALS, seed=SEED)
    print(f"[{i}/{len(BRANCH_COUNTS)}] n={n:>2} {report.mode:<10} "
          f"{report.successes}/{report.trials}  expected {report.theoretical_p:.2e}")
    rows.append(report.to_dict())

frame = pd.DataFrame(rows)
Path(OUTPUT).parent.mkdir(parents=True, exist_ok=True)
frame.to_csv(OUTPUT, index=False)
print(f"\nWrote {OUTPUT}")

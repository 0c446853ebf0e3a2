"""
Benchmark the bundled corpus under every processor design.

Obfuscates each program under one key, runs it on the baseline, stalled-hash,
cached-hash and mask-based designs, checks every run against the plain trace,
and writes the normalized-overhead table and figure.

Edit the configuration block below, then run:
    python scripts/run_bench.py
"""

from pathlib import Path

from drndalo.config import LfsrConfig, ObfKey, SimConfig
from drndalo.corpus import load_corpus
from drndalo.experiments import DEFAULT_VARIANTS, BenchRunner
from drndalo.obfuscation import LfsrHash, Mix64Hash
from drndalo.visualization import plot_overheads

# =============================================================================
# Configuration
# =============================================================================

# Corpus directory (None = bundled corpus)
CORPUS_DIR = None

# 64-bit obfuscation key, hex
KEY = '00000000deadbeef'

# Keyed hash: 'lfsr' (hardware-friendly) or 'mix64'
SCHEME = 'lfsr'

# LFSR preset: 'lfsr16' or 'lfsr8'
LFSR_PRESET = 'lfsr16'

# Shared cost model
BRANCH_PENALTY = 2
DECODE_TO_EXECUTE_OVERLAP = 1

# Worker processes
WORKERS = 4

REPORT_DIR = './reports'

# =============================================================================

scheme = LfsrHash(LfsrConfig.from_preset(LFSR_PRESET)) if SCHEME == 'lfsr' else Mix64Hash()
base = SimConfig(branch_penalty=BRANCH_PENALTY, decode_to_execute_overlap=DECODE_TO_EXECUTE_OVERLAP)

corpus = load_corpus(CORPUS_DIR)
runner = BenchRunner(ObfKey.from_hex(KEY), scheme, variants=DEFAULT_VARIANTS, base=base, workers=WORKERS)
result = runner.run(corpus)

report_dir = Path(REPORT_DIR)
result.to_csv(report_dir / 'bench.csv')
plot_overheads(result.table, report_dir / 'bench.png')

print()
print(result.summary().to_string(index=False))
print(f"\n{result.successful}/{result.total_programs} programs verified")
for failure in result.failures:
    print(f"  {failure['program']}: {failure['error']}")

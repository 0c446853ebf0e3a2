"""
Drndalo Experiments Module - Corpus Benchmarks

## Quick Start

```python
from drndalo.experiments import BenchRunner

runner = BenchRunner(key, scheme, workers=4)
result = runner.run(corpus)
result.to_csv('./reports/bench.csv')
```
"""

from drndalo.experiments.bench import (
    BENCH_COLUMNS,
    DEFAULT_VARIANTS,
    FOUR_DESIGN_VARIANTS,
    ArchVariant,
    BenchResult,
    BenchRunner,
    bench_program,
)

__all__ = [
    'BENCH_COLUMNS',
    'DEFAULT_VARIANTS',
    'FOUR_DESIGN_VARIANTS',
    'ArchVariant',
    'BenchResult',
    'BenchRunner',
    'bench_program',
]

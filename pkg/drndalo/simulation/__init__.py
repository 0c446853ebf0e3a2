"""
Drndalo Simulation Module - Deobfuscating Pipeline Cost Model

Runs programs under the baseline, stalled-hash, cached-hash and mask-based
designs, and models in-software (JIT and runtime) deobfuscation overheads.

## Quick Start

```python
from drndalo.config import Design, SimConfig
from drndalo.simulation import simulate, overhead

base = simulate(plain, SimConfig())
stalled = simulate(obf, SimConfig(design=Design.STALLED_HASH, scheme=scheme, key=key))
print(overhead(stalled, base))
```
"""

from drndalo.simulation.hash_cache import HashCache
from drndalo.simulation.pipeline import (
    SimReport,
    TraceDigest,
    check_equivalent,
    overhead,
    simulate,
)
from drndalo.simulation.software_deobf import (
    SoftDeobfEstimate,
    SoftDeobfMode,
    SoftDeobfModel,
    estimate,
    estimate_overhead,
)

__all__ = [
    'HashCache',
    'SimReport',
    'TraceDigest',
    'check_equivalent',
    'overhead',
    'simulate',
    'SoftDeobfEstimate',
    'SoftDeobfMode',
    'SoftDeobfModel',
    'estimate',
    'estimate_overhead',
]

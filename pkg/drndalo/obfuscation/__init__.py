"""
Drndalo Obfuscation Module - Keyed Branch Inversion

Keyed 1-bit hashes over branch addresses, the obfuscate/deobfuscate rewrite,
inversion masks and the runtime-deobfuscation code emitter.

## Quick Start

```python
from drndalo.config import ObfKey
from drndalo.obfuscation import LfsrHash, obfuscate, deobfuscate, emit_runtime_deobf

key = ObfKey.from_hex('00000000deadbeef')
obf, mask = obfuscate(program, LfsrHash(), key)
assert deobfuscate(obf, LfsrHash(), key) == program

runtime = emit_runtime_deobf(obf, mask)   # runs correctly without a key
```
"""

from drndalo.obfuscation.keyed_hash import (
    HashScheme,
    LfsrHash,
    MaskHash,
    Mix64Hash,
    lfsr_bit,
    mix64,
    mix64_array,
    mix64_bit,
    mix64_bits,
    scheme_from_name,
)
from drndalo.obfuscation.mask import InversionMask
from drndalo.obfuscation.obfuscator import (
    apply_mask,
    compute_mask,
    deobfuscate,
    mask_agreement,
    obfuscate,
    obfuscate_for_clients,
)
from drndalo.obfuscation.runtime_deobf import (
    RuntimeDeobfResult,
    emit_runtime_deobf,
    expansion,
    runtime_deobf,
)

__all__ = [
    # Hashes
    'HashScheme',
    'LfsrHash',
    'MaskHash',
    'Mix64Hash',
    'lfsr_bit',
    'mix64',
    'mix64_array',
    'mix64_bit',
    'mix64_bits',
    'scheme_from_name',

    # Masks and rewrites
    'InversionMask',
    'apply_mask',
    'compute_mask',
    'deobfuscate',
    'mask_agreement',
    'obfuscate',
    'obfuscate_for_clients',

    # Runtime deobfuscation
    'RuntimeDeobfResult',
    'emit_runtime_deobf',
    'expansion',
    'runtime_deobf',
]

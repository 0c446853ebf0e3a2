"""
Drndalo ISA Module - RV32I Subset Model

Instruction and program model, a text assembler/printer and single-step
architectural semantics shared by every other module.

## Quick Start

```python
from drndalo.isa import parse_asm, print_asm, run

program = parse_asm(open('sum10.s').read())
state = run(program)
print(state.exit_code)          # 45
print(print_asm(program))       # round-trips through parse_asm
```
"""

from drndalo.isa.instruction import (
    BranchKind,
    Instruction,
    Kind,
    Opcode,
    invert_branch,
)
from drndalo.isa.program import Program, same_topology
from drndalo.isa.assembler import Statement, format_instruction, layout, parse_asm, print_asm
from drndalo.isa.machine import (
    MachineState,
    Retired,
    branch_taken,
    execute,
    run,
    step,
)

__all__ = [
    # Model
    'BranchKind',
    'Instruction',
    'Kind',
    'Opcode',
    'invert_branch',
    'Program',
    'same_topology',

    # Assembler
    'Statement',
    'format_instruction',
    'layout',
    'parse_asm',
    'print_asm',

    # Semantics
    'MachineState',
    'Retired',
    'branch_taken',
    'execute',
    'run',
    'step',
]

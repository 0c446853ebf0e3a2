"""
Cycle-cost model of the deobfuscating pipeline.

Every design executes the same architectural semantics; they differ in how
the inversion bit of a conditional branch is obtained and what it costs:

    baseline  no XOR, no stall
    stall     keyed hash on every branch, max(0, k - overlap) stall cycles
    cache     keyed hash only on a direct-mapped cache miss
    mask      stored mask bit, no stall

cycles = instructions + taken_branches * branch_penalty + stall_cycles
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, Optional

from drndalo.config.isa_config import IsaConfig
from drndalo.config.sim_config import Design, SimConfig
from drndalo.errors import TraceMismatchError
from drndalo.isa.machine import MachineState, execute
from drndalo.isa.program import Program
from drndalo.simulation.hash_cache import HashCache

logger = logging.getLogger('drndalo.simulation')

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1
_NO_REGISTER = 0xFF


class TraceDigest:
    """64-bit FNV-1a-style rolling hash over (pc, rd, value) words."""

    def __init__(self):
        self.value = FNV_OFFSET

    def update(self, pc: int, rd: Optional[int], value: Optional[int]) -> None:
        h = self.value
        for word in (pc, _NO_REGISTER if rd is None else rd, 0 if value is None else value):
            h = ((h ^ word) * FNV_PRIME) & _MASK64
        self.value = h


@dataclass(frozen=True)
class SimReport:
    """
    Outcome of one simulation.

    Attributes:
        design: Design that produced the report
        cycles: Total cycles
        instructions: Dynamic instruction count
        branches: Dynamic conditional-branch count
        taken_branches: Conditional branches that were taken
        stall_cycles: Cycles lost waiting for the hash
        cache_hits, cache_misses: Hash cache counters (cache design only)
        trace_digest: Rolling hash of the architectural trace
        exit_code: a0 at the exit ecall
        output_bytes: Bytes written through putchar
        halted: True when the program reached the exit ecall
        timed_out: True when max_cycles was reached first
        branch_profile: Branch address -> dynamic execution count
        stall_by_branch: Branch address -> stall cycles charged to it
    """
    design: str
    cycles: int
    instructions: int
    branches: int
    taken_branches: int
    stall_cycles: int
    cache_hits: int
    cache_misses: int
    trace_digest: int
    exit_code: int
    output_bytes: bytes = b''
    halted: bool = True
    timed_out: bool = False
    branch_profile: Dict[int, int] = field(default_factory=dict)
    stall_by_branch: Dict[int, int] = field(default_factory=dict)

    @property
    def distinct_branches(self) -> int:
        return len(self.branch_profile)

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['output_bytes'] = self.output_bytes.hex()
        data['branch_profile'] = {f"0x{a:08x}": n for a, n in self.branch_profile.items()}
        data['stall_by_branch'] = {f"0x{a:08x}": n for a, n in self.stall_by_branch.items()}
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def simulate(program: Program, config: SimConfig, input_word: Optional[int] = None) -> SimReport:
    """
    Run a program under one design.

    Args:
        program: Program to execute
        config: Design and cost-model parameters
        input_word: Optional 32-bit value stored at the program's `input` data label

    Returns:
        SimReport; a run that hits max_cycles is reported with timed_out=True

    Raises:
        Trap: On an architectural trap
        ValueError: If the mask does not cover the program, or input_word is
            given for a program without an input word
    """
    design = config.design
    state = MachineState.for_program(program)
    if input_word is not None:
        address = program.labels.get(IsaConfig.INPUT_LABEL)
        if address is None or IsaConfig.INPUT_LABEL not in program.data_labels():
            raise ValueError(f"Program has no '{IsaConfig.INPUT_LABEL}' data label")
        state.write_word(address, input_word)

    if design is Design.MASK_BASED and not config.mask.covers(program):
        raise ValueError("Inversion mask does not cover exactly the program's branches")

    cache = HashCache(config.cache_lines) if design is Design.CACHED_HASH else None
    decisions: Dict[int, int] = {}
    stall = config.stall_per_branch
    penalty = config.branch_penalty

    digest = TraceDigest()
    instructions = branches = taken_branches = stall_cycles = cycles = 0
    branch_profile: Dict[int, int] = {}
    stall_by_branch: Dict[int, int] = {}

    while not state.halted and cycles < config.max_cycles:
        instr = program.fetch(state.pc)
        flip = False
        charge = 0
        if instr is not None and instr.is_branch:
            address = instr.address
            if design is Design.STALLED_HASH:
                flip = bool(_decide(config, decisions, address))
                charge = stall
            elif design is Design.CACHED_HASH:
                bit = cache.lookup(address)
                if bit is None:
                    bit = _decide(config, decisions, address)
                    cache.fill(address, bit)
                    charge = stall
                flip = bool(bit)
            elif design is Design.MASK_BASED:
                flip = bool(config.mask.bit(address))

        retired = execute(state, program, flip=flip)
        digest.update(retired.pc, retired.rd, retired.value)
        instructions += 1
        cycles += 1
        if retired.instruction.is_branch:
            address = retired.pc
            branches += 1
            branch_profile[address] = branch_profile.get(address, 0) + 1
            if retired.taken:
                taken_branches += 1
                cycles += penalty
            if charge:
                stall_cycles += charge
                stall_by_branch[address] = stall_by_branch.get(address, 0) + charge
                cycles += charge

    timed_out = not state.halted
    if timed_out:
        logger.warning(f"Simulation under '{design.value}' hit max_cycles={config.max_cycles}")

    return SimReport(
        design=design.value,
        cycles=cycles,
        instructions=instructions,
        branches=branches,
        taken_branches=taken_branches,
        stall_cycles=stall_cycles,
        cache_hits=cache.hits if cache else 0,
        cache_misses=cache.misses if cache else 0,
        trace_digest=digest.value,
        exit_code=state.exit_code,
        output_bytes=bytes(state.output),
        halted=state.halted,
        timed_out=timed_out,
        branch_profile=branch_profile,
        stall_by_branch=stall_by_branch,
    )


def _decide(config: SimConfig, decisions: Dict[int, int], address: int) -> int:
    # decide() is pure; memoized per address, charged per lookup by the caller
    bit = decisions.get(address)
    if bit is None:
        bit = config.scheme.decide(address, config.key)
        decisions[address] = bit
    return bit


def check_equivalent(report: SimReport, baseline: SimReport) -> None:
    """
    Raise unless a keyed run reproduced the plain baseline run.

    Raises:
        TraceMismatchError: On differing digests, exit codes, output or a timeout
    """
    if report.timed_out or baseline.timed_out:
        raise TraceMismatchError(f"'{report.design}' run timed out; no overhead reported")
    if report.trace_digest != baseline.trace_digest:
        raise TraceMismatchError(
            f"Trace digest of '{report.design}' run ({report.trace_digest:#018x}) differs "
            f"from baseline ({baseline.trace_digest:#018x})"
        )
    if report.exit_code != baseline.exit_code or report.output_bytes != baseline.output_bytes:
        raise TraceMismatchError(f"'{report.design}' run exited differently from baseline")


def overhead(report: SimReport, baseline: SimReport, check_trace: bool = True) -> float:
    """
    Relative cycle overhead: report.cycles / baseline.cycles - 1.

    Args:
        report: Run under the design being measured
        baseline: Plain program under the baseline design, same input
        check_trace: Verify architectural equivalence first

    Raises:
        TraceMismatchError: If check_trace and the runs are not equivalent
        ValueError: If the baseline ran zero cycles
    """
    if check_trace:
        check_equivalent(report, baseline)
    if baseline.cycles == 0:
        raise ValueError("Baseline report has zero cycles")
    return report.cycles / baseline.cycles - 1.0

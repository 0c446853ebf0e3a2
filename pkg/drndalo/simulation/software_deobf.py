"""
In-software deobfuscation cost models.

JIT modes are analytic charges over a baseline run; runtime mode is measured
by executing the runtime-deobfuscation rewrite of the program.
"""

import json
import logging
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Dict, Optional

from drndalo.config.sim_config import Design, SimConfig
from drndalo.errors import TraceMismatchError
from drndalo.isa.program import Program
from drndalo.obfuscation.mask import InversionMask
from drndalo.obfuscation.runtime_deobf import PREDICATE_LENGTH, runtime_deobf
from drndalo.simulation.pipeline import SimReport, simulate

logger = logging.getLogger('drndalo.simulation')


class SoftDeobfMode(str, Enum):
    JIT_CACHED = 'jit-cached'
    JIT_UNCACHED = 'jit-uncached'
    RUNTIME = 'runtime'


@dataclass(frozen=True)
class SoftDeobfModel:
    """
    Attributes:
        mode: Deobfuscation strategy
        per_branch_cost: Instructions charged per JIT deobfuscation event
        mask_lookup_cost: Instructions per runtime mask load and XOR
    """
    mode: SoftDeobfMode = SoftDeobfMode.JIT_CACHED
    per_branch_cost: int = 10
    mask_lookup_cost: int = 3

    def __post_init__(self):
        object.__setattr__(self, 'mode', SoftDeobfMode(self.mode))
        if self.per_branch_cost < 1:
            raise ValueError(f"per_branch_cost must be >= 1, got {self.per_branch_cost}")
        if self.mask_lookup_cost < 0:
            raise ValueError(f"mask_lookup_cost must be >= 0, got {self.mask_lookup_cost}")


@dataclass(frozen=True)
class SoftDeobfEstimate:
    """
    Attributes:
        mode: Mode the estimate is for
        extra_instructions: Charged (JIT) or measured (runtime) extra instructions
        analytic_extra: Closed-form extra instructions for the same run
        baseline_instructions: Dynamic instructions of the plain run
        ratio: extra_instructions / baseline_instructions
        static_growth: Added static instructions (runtime mode only)
    """
    mode: str
    extra_instructions: int
    analytic_extra: int
    baseline_instructions: int
    ratio: float
    static_growth: int = 0

    def to_dict(self) -> Dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def estimate(
    program: Program,
    model: SoftDeobfModel,
    baseline: SimReport,
    mask: Optional[InversionMask] = None,
    max_cycles: int = 10_000_000,
) -> SoftDeobfEstimate:
    """
    Estimate the instruction overhead of in-software deobfuscation.

    Args:
        program: Program as shipped (plain, or obfuscated with `mask`)
        model: Cost model
        baseline: Plain program's run on the baseline design
        mask: Inversions present in program; all-zero when omitted
        max_cycles: Guard for the runtime-mode simulation

    Returns:
        SoftDeobfEstimate

    Raises:
        TraceMismatchError: If the rewritten program does not behave like the baseline run
        RuntimeDeobfError: If runtime mode cannot rewrite the program
    """
    mode = model.mode
    static_growth = 0
    if mode is SoftDeobfMode.JIT_CACHED:
        extra = analytic = model.per_branch_cost * baseline.distinct_branches
    elif mode is SoftDeobfMode.JIT_UNCACHED:
        extra = analytic = model.per_branch_cost * baseline.branches
    else:
        mask = mask if mask is not None else InversionMask.zeros(program)
        result = runtime_deobf(program, mask)
        report = simulate(result.program, SimConfig(design=Design.BASELINE, max_cycles=max_cycles))
        if report.timed_out or report.exit_code != baseline.exit_code \
                or report.output_bytes != baseline.output_bytes:
            raise TraceMismatchError("Runtime-deobfuscated program diverges from the baseline run")
        extra = report.instructions - baseline.instructions
        analytic = _runtime_analytic(program, model, baseline)
        static_growth = result.static_growth
        if extra != analytic:
            logger.warning(
                f"Runtime extra instructions {extra} differ from analytic estimate {analytic}"
            )

    ratio = extra / baseline.instructions if baseline.instructions else 0.0
    return SoftDeobfEstimate(
        mode=mode.value,
        extra_instructions=extra,
        analytic_extra=analytic,
        baseline_instructions=baseline.instructions,
        ratio=ratio,
        static_growth=static_growth,
    )


def _runtime_analytic(program: Program, model: SoftDeobfModel, baseline: SimReport) -> int:
    total = 0
    for address, count in baseline.branch_profile.items():
        kind = program.fetch(address).branch_kind
        total += count * (model.mask_lookup_cost + PREDICATE_LENGTH[kind])
    return total


def estimate_overhead(
    program: Program,
    model: SoftDeobfModel,
    baseline: SimReport,
    mask: Optional[InversionMask] = None,
) -> float:
    """extra_instructions / baseline.instructions for the chosen mode."""
    return estimate(program, model, baseline, mask).ratio

"""
Behavioral divergence between a plain program and its obfuscated binary run
without the key (baseline design), over a set of input words.
"""

import json
import logging
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from drndalo.config.sim_config import Design, SimConfig
from drndalo.errors import Trap
from drndalo.isa.program import Program
from drndalo.simulation.pipeline import SimReport, simulate

logger = logging.getLogger('drndalo.attack')

DEFAULT_DIVERGENCE_MAX_CYCLES = 200_000


@dataclass(frozen=True)
class DivergenceResult:
    """
    Attributes:
        inputs: Inputs tried
        divergent: Inputs whose runs differ in exit code, output, timeout or trap status
        behavior_diffs: Divergent inputs where both runs finished (exit code or output differ)
        timeouts: Inputs on which the obfuscated run timed out
        traps: Inputs on which the obfuscated run trapped
        trace_diffs: Inputs whose architectural trace digests differ
    """
    inputs: int
    divergent: int
    behavior_diffs: int
    timeouts: int
    traps: int
    trace_diffs: int

    @property
    def fraction(self) -> float:
        return self.divergent / self.inputs if self.inputs else 0.0

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['fraction'] = self.fraction
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _outcome(program: Program, config: SimConfig, input_word: Optional[int]) -> Tuple[str, Optional[SimReport]]:
    try:
        report = simulate(program, config, input_word=input_word)
    except Trap as e:
        logger.debug(f"Trap for input {input_word}: {e}")
        return 'trap', None
    return ('timeout' if report.timed_out else 'exit'), report


def measure_divergence(
    p_plain: Program,
    p_obf: Program,
    inputs: Optional[Sequence[int]] = None,
    max_cycles: int = DEFAULT_DIVERGENCE_MAX_CYCLES,
) -> DivergenceResult:
    """
    Run both programs on the baseline design for every input and compare.

    Args:
        p_plain: Original program
        p_obf: Obfuscated program, executed without its key
        inputs: 32-bit input words stored at the `input` data label; None runs once without input
        max_cycles: Per-run guard; a timed-out run counts as divergent

    Returns:
        DivergenceResult
    """
    config = SimConfig(design=Design.BASELINE, max_cycles=max_cycles)
    words = [None] if inputs is None else list(inputs)
    divergent = behavior = timeouts = traps = traces = 0

    for word in words:
        plain_status, plain = _outcome(p_plain, config, word)
        obf_status, obf = _outcome(p_obf, config, word)
        if obf_status == 'timeout':
            timeouts += 1
        elif obf_status == 'trap':
            traps += 1

        if plain is None or obf is None:
            differs = plain_status != obf_status
            trace_differs = differs
        else:
            trace_differs = plain.trace_digest != obf.trace_digest
            differs = plain_status != obf_status or (
                plain.exit_code, plain.output_bytes) != (obf.exit_code, obf.output_bytes)
            if differs and plain_status == obf_status == 'exit':
                behavior += 1
        divergent += int(differs)
        traces += int(trace_differs)

    return DivergenceResult(
        inputs=len(words),
        divergent=divergent,
        behavior_diffs=behavior,
        timeouts=timeouts,
        traps=traps,
        trace_diffs=traces,
    )


def random_inputs(count: int, seed: Optional[int] = None) -> list:
    """Uniform 32-bit input words."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, 1 << 32, size=count, dtype=np.uint64).tolist()

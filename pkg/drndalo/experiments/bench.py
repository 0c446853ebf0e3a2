"""
Corpus benchmark across processor designs.

Each program is run plain on the baseline design, obfuscated once under the
configured key, and then executed under every architecture variant. Cycle
counts are normalized to the baseline run of the same program.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import pandas as pd

from drndalo.config.hash_config import ObfKey
from drndalo.config.sim_config import Design, SimConfig
from drndalo.errors import Trap
from drndalo.isa.program import Program
from drndalo.obfuscation.keyed_hash import HashScheme
from drndalo.obfuscation.obfuscator import obfuscate
from drndalo.simulation.pipeline import SimReport, simulate

logger = logging.getLogger('drndalo.experiments')

BENCH_COLUMNS = [
    'program', 'variant', 'design', 'hash_cycles', 'cache_lines', 'cycles',
    'instructions', 'branches', 'stall_cycles', 'cache_hits', 'cache_misses',
    'overhead', 'digest_match',
]


@dataclass(frozen=True)
class ArchVariant:
    """One processor configuration of the benchmark."""
    name: str
    design: Design
    hash_cycles: int = 16
    cache_lines: int = 256


DEFAULT_VARIANTS: Tuple[ArchVariant, ...] = (
    ArchVariant('baseline', Design.BASELINE),
    ArchVariant('mask', Design.MASK_BASED),
    ArchVariant('stall-k8', Design.STALLED_HASH, hash_cycles=8),
    ArchVariant('stall-k16', Design.STALLED_HASH, hash_cycles=16),
    ArchVariant('cache-k8', Design.CACHED_HASH, hash_cycles=8),
    ArchVariant('cache-k16', Design.CACHED_HASH, hash_cycles=16),
    ArchVariant('cache-k16-1024', Design.CACHED_HASH, hash_cycles=16, cache_lines=1024),
)

# The four designs, one variant each, at the configured hash latency
FOUR_DESIGN_VARIANTS: Tuple[ArchVariant, ...] = (
    ArchVariant('baseline', Design.BASELINE),
    ArchVariant('stall', Design.STALLED_HASH),
    ArchVariant('cache', Design.CACHED_HASH),
    ArchVariant('mask', Design.MASK_BASED),
)


@dataclass
class BenchResult:
    """Result of a benchmark run."""
    total_programs: int
    successful: int
    failed: int
    table: pd.DataFrame
    failures: List[Dict] = field(default_factory=list)  # List of {program, error} dicts

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def summary(self) -> pd.DataFrame:
        """Mean and max overhead per variant, in variant order."""
        if self.table.empty:
            return pd.DataFrame(columns=['variant', 'mean_overhead', 'max_overhead'])
        order = list(dict.fromkeys(self.table['variant']))
        grouped = self.table.groupby('variant', sort=False)['overhead']
        summary = pd.DataFrame({
            'mean_overhead': grouped.mean(),
            'max_overhead': grouped.max(),
        }).reindex(order)
        return summary.reset_index()

    def to_csv(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.table.to_csv(path, index=False)


def _variant_config(base: SimConfig, variant: ArchVariant, scheme, key, mask) -> SimConfig:
    changes = dict(hash_cycles=variant.hash_cycles, cache_lines=variant.cache_lines)
    if variant.design.keyed:
        changes.update(scheme=scheme, key=key)
    elif variant.design is Design.MASK_BASED:
        changes.update(mask=mask)
    return base.with_design(variant.design, **changes)


def _matches(report: SimReport, baseline: SimReport) -> bool:
    return (
        not report.timed_out
        and report.trace_digest == baseline.trace_digest
        and report.exit_code == baseline.exit_code
        and report.output_bytes == baseline.output_bytes
    )


def bench_program(
    program_id: str,
    program: Program,
    key: ObfKey,
    scheme: HashScheme,
    variants: Sequence[ArchVariant] = DEFAULT_VARIANTS,
    base: Optional[SimConfig] = None,
) -> List[Dict]:
    """
    Benchmark one program under every variant.

    Returns:
        One row per variant, columns as BENCH_COLUMNS

    Raises:
        Trap: If the plain program traps on the baseline design
        ValueError: If the plain baseline run times out
    """
    base = replace(base or SimConfig(), design=Design.BASELINE, scheme=None, key=None, mask=None)
    baseline = simulate(program, base)
    if baseline.timed_out:
        raise ValueError(f"Plain run of {program_id} hit max_cycles={base.max_cycles}")

    p_obf, mask = obfuscate(program, scheme, key)
    rows = []
    for variant in variants:
        config = _variant_config(base, variant, scheme, key, mask)
        target = program if variant.design is Design.BASELINE else p_obf
        report = simulate(target, config)
        rows.append({
            'program': program_id,
            'variant': variant.name,
            'design': variant.design.value,
            'hash_cycles': variant.hash_cycles,
            'cache_lines': variant.cache_lines,
            'cycles': report.cycles,
            'instructions': report.instructions,
            'branches': report.branches,
            'stall_cycles': report.stall_cycles,
            'cache_hits': report.cache_hits,
            'cache_misses': report.cache_misses,
            'overhead': report.cycles / baseline.cycles - 1.0,
            'digest_match': _matches(report, baseline),
        })
    return rows


def _bench_task(args) -> Tuple[str, List[Dict], Optional[str]]:
    program_id, program, key, scheme, variants, base = args
    try:
        return program_id, bench_program(program_id, program, key, scheme, variants, base), None
    except (Trap, ValueError) as e:
        return program_id, [], str(e)


class BenchRunner:
    """
    Runs the corpus benchmark and collects a normalized-overhead table.

    Example:
        >>> from drndalo.corpus import bundled_corpus
        >>> from drndalo.config import ObfKey
        >>> from drndalo.obfuscation import LfsrHash
        >>>
        >>> runner = BenchRunner(ObfKey.from_hex('00000000deadbeef'), LfsrHash())
        >>> result = runner.run(bundled_corpus())
        >>> result.to_csv('./reports/bench.csv')
        >>> print(result.summary())
    """

    def __init__(
        self,
        key: ObfKey,
        scheme: HashScheme,
        variants: Sequence[ArchVariant] = DEFAULT_VARIANTS,
        base: Optional[SimConfig] = None,
        workers: int = 1,
        verbose: bool = True,
    ):
        """
        Args:
            key: Obfuscation key for every program
            scheme: Keyed hash used to obfuscate and by the keyed designs
            variants: Architecture variants, in report order
            base: Shared cost-model parameters (branch penalty, overlap, max_cycles)
            workers: Worker processes (1 = in-process)
            verbose: Print one progress line per program
        """
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        if not variants:
            raise ValueError("At least one architecture variant is required")
        self.key = key
        self.scheme = scheme
        self.variants = tuple(variants)
        self.base = base or SimConfig()
        self.workers = workers
        self.verbose = verbose

    def run(self, corpus: Mapping[str, Program]) -> BenchResult:
        ids = sorted(corpus)
        total = len(ids)
        width = len(str(total))
        tasks = [(pid, corpus[pid], self.key, self.scheme, self.variants, self.base) for pid in ids]

        if self.verbose:
            print(f"Benchmarking {total} programs under {len(self.variants)} variants...")

        if self.workers > 1:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                outcomes = list(pool.map(_bench_task, tasks))
        else:
            outcomes = [_bench_task(task) for task in tasks]

        rows: List[Dict] = []
        failures: List[Dict] = []
        for i, (pid, program_rows, error) in enumerate(outcomes, 1):
            counter = f"[{i:{width}}/{total}]"
            if error is None:
                mismatched = [r['variant'] for r in program_rows if not r['digest_match']]
                if mismatched:
                    error = f"trace mismatch under {', '.join(mismatched)}"
            if error is not None:
                logger.error(f"Benchmark of {pid} failed: {error}")
                failures.append({'program': pid, 'error': error})
                if self.verbose:
                    print(f"{counter} {pid}  FAILED: {error}")
            elif self.verbose:
                worst = max(program_rows, key=lambda r: r['overhead'])
                print(f"{counter} {pid}  worst {worst['variant']} {worst['overhead']:+.1%}")
            rows.extend(program_rows)

        table = pd.DataFrame(rows, columns=BENCH_COLUMNS)
        result = BenchResult(
            total_programs=total,
            successful=total - len(failures),
            failed=len(failures),
            table=table,
            failures=failures,
        )
        logger.info(f"Benchmark finished: {result.successful}/{total} programs verified")
        return result

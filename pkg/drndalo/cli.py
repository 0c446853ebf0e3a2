"""
Command-line entry point.

    drndalo [--config FILE] [-v] <command> [options]

Commands: obfuscate, deobfuscate, sim, soft-deobf, stealth, attack, bench.
Settings come from CLI flags, then the config file (--config or
DRNDALO_CONFIG), then DRNDALO_KEY, then built-in defaults.
"""

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from drndalo.config.feature_config import StealthConfig
from drndalo.config.hash_config import ObfKey
from drndalo.config.sim_config import Design
from drndalo.config.tool_config import ToolConfig
from drndalo.errors import DrndaloError
from drndalo.isa.assembler import print_asm
from drndalo.isa.program import Program

logger = logging.getLogger('drndalo.cli')

KEYED_COMMANDS = ('obfuscate', 'deobfuscate', 'stealth', 'bench')


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _windows(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected I[,I...], got '{text}'") from None


def _word(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 32:
        raise argparse.ArgumentTypeError(f"input word must fit in 32 bits, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='drndalo',
        description="Keyed branch-inversion obfuscation toolchain for RV32I programs.",
    )
    parser.add_argument('--config', help='Config file of key = value lines')
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    def keyed(p):
        p.add_argument('--key', help='64-bit key as up to 16 hex digits')
        p.add_argument('--scheme', choices=['lfsr', 'mix64'], help='Keyed hash')

    p = sub.add_parser('obfuscate', help='Invert branches selected by the keyed hash')
    p.add_argument('--in', dest='input', required=True, help='Plain assembly')
    p.add_argument('--out', required=True, help='Obfuscated assembly')
    p.add_argument('--emit-mask', help='Write the inversion mask file')
    keyed(p)

    p = sub.add_parser('deobfuscate', help='Undo obfuscation with the same key')
    p.add_argument('--in', dest='input', required=True)
    p.add_argument('--out', required=True)
    keyed(p)

    p = sub.add_parser('sim', help='Run a program under one processor design')
    p.add_argument('--in', dest='input', required=True)
    p.add_argument('--design', choices=[d.value for d in Design])
    p.add_argument('--hash-cycles', type=int)
    p.add_argument('--cache-lines', type=int)
    p.add_argument('--mask-file', help='Inversion mask (mask design)')
    p.add_argument('--input-word', type=_word, help='Value stored at the input data label')
    p.add_argument('--max-cycles', type=int)
    p.add_argument('--report', help='JSON report path (stdout if omitted)')
    keyed(p)

    p = sub.add_parser('soft-deobf', help='Estimate in-software deobfuscation overhead')
    p.add_argument('--in', dest='input', required=True)
    p.add_argument('--mode', required=True, choices=['jit-cached', 'jit-uncached', 'runtime'])
    p.add_argument('--mask-file', help='Inversions present in the input program')
    p.add_argument('--per-branch-cost', type=int, default=10)
    p.add_argument('--emit', help='Write the runtime-deobfuscated assembly (runtime mode)')
    p.add_argument('--report', help='JSON report path (stdout if omitted)')

    p = sub.add_parser('stealth', help='Classifier-based stealth evaluation')
    p.add_argument('--corpus', help='Corpus directory (default: config or bundled corpus)')
    p.add_argument('--synthetic', type=int, metavar='N', help='Use N generated programs instead')
    p.add_argument('--seed', type=int, default=0, help='Generator seed for --synthetic')
    p.add_argument('--window', type=_windows, help='Window sizes, e.g. 1,2,4,8')
    p.add_argument('--model', choices=list(StealthConfig.MODELS))
    p.add_argument('--split-seed', type=int)
    p.add_argument('--random-labels', action='store_true', help='Replace labels with coin flips')
    p.add_argument('--dataset', help='Write the dataset (line format, or .parquet)')
    p.add_argument('--figure', help='Write the window-sweep figure')
    p.add_argument('--workers', type=int)
    p.add_argument('--report', help='JSON report path (stdout if omitted)')
    keyed(p)

    p = sub.add_parser('attack', help='Keyless brute-force and divergence harness')
    p.add_argument('--obf', required=True, help='Obfuscated assembly')
    p.add_argument('--plain', required=True, help='Original assembly (success oracle)')
    mode = p.add_mutually_exclusive_group()
    mode.add_argument('--exhaustive', action='store_true')
    mode.add_argument('--trials', type=int)
    p.add_argument('--inputs', type=int, help='Random input words for the divergence check')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--max-cycles', type=int, help='Per-run guard for the divergence check')
    p.add_argument('--report', help='JSON report path (stdout if omitted)')

    p = sub.add_parser('bench', help='Benchmark a corpus under every design')
    p.add_argument('--corpus', help='Corpus directory (default: config or bundled corpus)')
    p.add_argument('--out', help='CSV path (default: <report dir>/bench.csv)')
    p.add_argument('--figure', help='Write the normalized-overhead figure')
    p.add_argument('--designs-only', action='store_true',
                   help='One variant per design instead of the full architecture set')
    p.add_argument('--workers', type=int)
    keyed(p)

    return parser


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _load_config(args: argparse.Namespace) -> ToolConfig:
    config = ToolConfig.from_env()
    if args.config:
        config = ToolConfig.from_file(args.config, base=config)
    changes: Dict = {}
    for flag, attr in (('key', 'key'), ('scheme', 'scheme'), ('design', 'design'),
                       ('hash_cycles', 'hash_cycles'), ('cache_lines', 'cache_lines'),
                       ('max_cycles', 'max_cycles'), ('window', 'windows'), ('model', 'model'),
                       ('split_seed', 'split_seed'), ('workers', 'workers'), ('corpus', 'corpus_dir')):
        value = getattr(args, flag, None)
        if value is not None:
            changes[attr] = value
    return dataclasses.replace(config, **changes) if changes else config


def _read_program(path: str) -> Program:
    from drndalo.corpus.loader import load_program

    return load_program(path)


def _write_text(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding='utf-8')


def _emit_report(data, path: Optional[str]) -> None:
    text = json.dumps(data, indent=2, sort_keys=True)
    if path:
        _write_text(path, text + '\n')
    else:
        print(text)


def _corpus(config: ToolConfig, args: argparse.Namespace) -> Dict[str, Program]:
    from drndalo.corpus import generate_corpus, load_corpus

    if getattr(args, 'synthetic', None):
        return generate_corpus(args.synthetic, seed=args.seed)
    return load_corpus(config.corpus_dir)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_obfuscate(args, config: ToolConfig, key: ObfKey) -> int:
    from drndalo.obfuscation import obfuscate

    program = _read_program(args.input)
    p_obf, mask = obfuscate(program, config.hash_scheme(), key)
    _write_text(args.out, print_asm(p_obf))
    if args.emit_mask:
        mask.save(args.emit_mask)
    logger.info(f"Inverted {sum(mask.entries.values())} of {mask.branch_count} branches")
    return 0


def cmd_deobfuscate(args, config: ToolConfig, key: ObfKey) -> int:
    from drndalo.obfuscation import deobfuscate

    program = _read_program(args.input)
    _write_text(args.out, print_asm(deobfuscate(program, config.hash_scheme(), key)))
    return 0


def cmd_sim(args, config: ToolConfig, key: Optional[ObfKey]) -> int:
    from drndalo.obfuscation import InversionMask
    from drndalo.simulation import simulate

    program = _read_program(args.input)
    mask = InversionMask.load(args.mask_file) if args.mask_file else None
    sim_config = config.sim_config(mask=mask)
    report = simulate(program, sim_config, input_word=args.input_word)
    _emit_report(report.to_dict(), args.report)
    return 0


def cmd_soft_deobf(args, config: ToolConfig, key: Optional[ObfKey]) -> int:
    from drndalo.obfuscation import InversionMask, apply_mask, runtime_deobf
    from drndalo.simulation import SoftDeobfModel, estimate, simulate

    program = _read_program(args.input)
    mask = InversionMask.load(args.mask_file) if args.mask_file else None
    plain = apply_mask(program, mask) if mask is not None else program
    baseline = simulate(plain, config.sim_config(design=Design.BASELINE.value))
    model = SoftDeobfModel(mode=args.mode, per_branch_cost=args.per_branch_cost)
    result = estimate(program, model, baseline, mask=mask, max_cycles=config.max_cycles)
    if args.emit and args.mode == 'runtime':
        rewritten = runtime_deobf(program, mask if mask is not None else InversionMask.zeros(program))
        _write_text(args.emit, print_asm(rewritten.program))
    _emit_report(result.to_dict(), args.report)
    return 0


def cmd_stealth(args, config: ToolConfig, key: ObfKey) -> int:
    from drndalo.stealth import build_dataset, gain_captured, relabel, sweep_dataset

    corpus = _corpus(config, args)
    windows = list(config.windows)
    dataset = build_dataset(
        corpus, key, config.hash_scheme(), windows[-1], workers=config.workers, verbose=args.verbose
    )
    if args.random_labels:
        dataset = relabel(dataset, seed=config.split_seed)
    if args.dataset:
        if args.dataset.endswith('.parquet'):
            dataset.to_parquet(args.dataset)
        else:
            dataset.save_lines(args.dataset)

    reports = sweep_dataset(dataset, windows, config.model, config.split_seed)
    if args.figure:
        from drndalo.visualization import plot_window_sweep

        plot_window_sweep(reports, args.figure)

    _emit_report({
        'programs': len(corpus),
        'samples': len(dataset),
        'class_counts': {str(k): v for k, v in dataset.class_counts().items()},
        'reports': [r.to_dict() for r in reports],
        'gain_captured': gain_captured(reports),
    }, args.report)
    return 0


def cmd_attack(args, config: ToolConfig, key: Optional[ObfKey]) -> int:
    from drndalo.attack import brute_force, measure_divergence, random_inputs
    from drndalo.attack.divergence import DEFAULT_DIVERGENCE_MAX_CYCLES
    from drndalo.config.isa_config import IsaConfig

    p_obf = _read_program(args.obf)
    p_plain = _read_program(args.plain)
    if args.exhaustive:
        report = brute_force(p_obf, p_plain, mode='exhaustive')
    else:
        report = brute_force(p_obf, p_plain, mode='sampled', trials=args.trials or 100_000, seed=args.seed)

    data = report.to_dict()
    if args.inputs is not None:
        inputs = None
        if IsaConfig.INPUT_LABEL in p_plain.data_labels():
            inputs = random_inputs(args.inputs, seed=args.seed)
        divergence = measure_divergence(
            p_plain, p_obf, inputs, max_cycles=args.max_cycles or DEFAULT_DIVERGENCE_MAX_CYCLES
        )
        data = dataclasses.replace(report, divergence=divergence.fraction).to_dict()
        data['divergence_detail'] = divergence.to_dict()
    _emit_report(data, args.report)
    return 0


def cmd_bench(args, config: ToolConfig, key: ObfKey) -> int:
    from drndalo.corpus import load_corpus
    from drndalo.experiments import DEFAULT_VARIANTS, FOUR_DESIGN_VARIANTS, BenchRunner

    corpus = load_corpus(config.corpus_dir)
    variants = FOUR_DESIGN_VARIANTS if args.designs_only else DEFAULT_VARIANTS
    if args.designs_only:
        variants = tuple(
            dataclasses.replace(v, hash_cycles=config.hash_cycles, cache_lines=config.cache_lines)
            for v in variants
        )
    runner = BenchRunner(
        key,
        config.hash_scheme(),
        variants=variants,
        base=config.sim_config(design=Design.BASELINE.value),
        workers=config.workers,
        verbose=args.verbose,
    )
    result = runner.run(corpus)
    out = args.out or str(Path(config.report_dir) / 'bench.csv')
    result.to_csv(out)
    if args.figure:
        from drndalo.visualization import plot_overheads

        plot_overheads(result.table, args.figure)
    print(result.summary().to_string(index=False))

    if not result.ok:
        for failure in result.failures:
            print(f"error: {failure['program']}: {failure['error']}", file=sys.stderr)
        return 1
    return 0


COMMANDS = {
    'obfuscate': cmd_obfuscate,
    'deobfuscate': cmd_deobfuscate,
    'sim': cmd_sim,
    'soft-deobf': cmd_soft_deobf,
    'stealth': cmd_stealth,
    'attack': cmd_attack,
    'bench': cmd_bench,
}


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments and dispatch one command.

    Returns:
        0 on success, 1 on a tool error, 2 on bad usage
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(asctime)s %(name)s %(levelname)s %(message)s',
    )

    try:
        config = _load_config(args)
        key = config.obf_key()
        needs_key = args.command in KEYED_COMMANDS or (
            args.command == 'sim' and Design(config.design).keyed
        )
        if needs_key and key is None:
            try:
                parser.error(f"'{args.command}' requires --key (or DRNDALO_KEY, or key in the config file)")
            except SystemExit as e:
                return int(e.code)
        return COMMANDS[args.command](args, config, key)
    except (DrndaloError, ValueError, OSError) as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == '__main__':
    main()

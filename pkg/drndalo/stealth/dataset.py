"""
Branching-basic-block datasets for stealth evaluation.

Each program of a corpus is obfuscated with the key; every branch of the
obfuscated program becomes one sample labeled with its mask bit, and every
branch of the plain program one more sample labeled 0.

Key classes:
    WindowRecord: One instruction of a window (opcode, rs1, rs2, rd)
    BbblSample: One labeled branch with its window
    BbblDataset: Sample collection with line-format and Parquet export
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from drndalo.config.feature_config import StealthConfig
from drndalo.config.hash_config import ObfKey
from drndalo.errors import DatasetError
from drndalo.isa.instruction import OPCODE_KIND, Instruction, Kind, Opcode
from drndalo.isa.program import Program
from drndalo.obfuscation.keyed_hash import HashScheme
from drndalo.obfuscation.obfuscator import obfuscate
from drndalo.stealth.cfg import branch_windows

logger = logging.getLogger('drndalo.stealth')

NO_REGISTER = -1

_RS1_KINDS = {Kind.ARITH_REG, Kind.ARITH_IMM, Kind.LOAD, Kind.STORE, Kind.JALR, Kind.COND_BRANCH}
_RS2_KINDS = {Kind.ARITH_REG, Kind.STORE, Kind.COND_BRANCH}


class WindowRecord(NamedTuple):
    """Operands an instruction does not have are NO_REGISTER."""
    opcode: Opcode
    rs1: int
    rs2: int
    rd: int

    @classmethod
    def of(cls, instr: Instruction) -> 'WindowRecord':
        kind = instr.kind
        dest = instr.destination()
        return cls(
            opcode=instr.opcode,
            rs1=instr.rs1 if kind in _RS1_KINDS else NO_REGISTER,
            rs2=instr.rs2 if kind in _RS2_KINDS else NO_REGISTER,
            rd=NO_REGISTER if dest is None else dest,
        )

    def to_text(self) -> str:
        return f"{self.opcode.value};{self.rs1};{self.rs2};{self.rd}"

    @classmethod
    def from_text(cls, text: str) -> 'WindowRecord':
        op, rs1, rs2, rd = text.split(';')
        return cls(Opcode(op), int(rs1), int(rs2), int(rd))


@dataclass(frozen=True)
class BbblSample:
    """
    One branch of a plain or obfuscated program.

    Attributes:
        program_id: Corpus identifier
        branch_address: Address of the branch
        window: Records oldest first; the last one is the branch
        br_up: 1 iff the branch target is below the branch (backward edge)
        label: 1 iff the branch was inverted
    """
    program_id: str
    branch_address: int
    window: Tuple[WindowRecord, ...]
    br_up: int
    label: int

    def __post_init__(self):
        if not self.window:
            raise ValueError("Window must hold at least the branch")
        if OPCODE_KIND[self.window[-1].opcode] is not Kind.COND_BRANCH:
            raise ValueError(f"Window of 0x{self.branch_address:x} does not end in a branch")

    @property
    def branch(self) -> WindowRecord:
        return self.window[-1]

    def truncated(self, window: int) -> 'BbblSample':
        """Same sample keeping only the last `window` records."""
        return replace(self, window=self.window[-window:])

    def to_line(self) -> str:
        records = '|'.join(r.to_text() for r in self.window)
        return f"{self.program_id},0x{self.branch_address:08x},{self.br_up},{self.label},window:[{records}]"

    @classmethod
    def from_line(cls, line: str) -> 'BbblSample':
        head, _, window = line.strip().partition(',window:[')
        program_id, address, br_up, label = head.rsplit(',', 3)
        records = tuple(WindowRecord.from_text(r) for r in window.rstrip(']').split('|'))
        return cls(
            program_id=program_id,
            branch_address=int(address, 0),
            window=records,
            br_up=int(br_up),
            label=int(label),
        )


def program_samples(
    program_id: str,
    program: Program,
    key: ObfKey,
    scheme: HashScheme,
    window: int,
) -> List[BbblSample]:
    """
    Samples of one program: obfuscated branches (label = mask bit), then
    plain branches (label 0).
    """
    obfuscated, mask = obfuscate(program, scheme, key)
    samples = []
    for variant, labels in ((obfuscated, mask.entries), (program, None)):
        for address, instrs in branch_windows(variant, window).items():
            branch = instrs[-1]
            samples.append(BbblSample(
                program_id=program_id,
                branch_address=address,
                window=tuple(WindowRecord.of(i) for i in instrs),
                br_up=int(branch.target_address < address),
                label=labels[address] if labels is not None else 0,
            ))
    return samples


def _program_samples_task(args) -> Tuple[str, List[BbblSample]]:
    program_id = args[0]
    return program_id, program_samples(*args)


class BbblDataset:
    """
    Samples built at a maximum window size; smaller windows are truncations.
    """

    def __init__(self, samples: Sequence[BbblSample], window: int):
        self.samples: List[BbblSample] = list(samples)
        self.window = window

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[BbblSample]:
        return iter(self.samples)

    @property
    def program_ids(self) -> List[str]:
        return sorted({s.program_id for s in self.samples})

    def truncated(self, window: int) -> 'BbblDataset':
        if window > self.window:
            raise ValueError(f"Dataset was built with window {self.window}, cannot widen to {window}")
        return BbblDataset([s.truncated(window) for s in self.samples], window)

    def with_labels(self, labels: Sequence[int]) -> 'BbblDataset':
        """Same samples with replacement labels."""
        if len(labels) != len(self.samples):
            raise ValueError(f"Expected {len(self.samples)} labels, got {len(labels)}")
        return BbblDataset(
            [replace(s, label=int(y)) for s, y in zip(self.samples, labels)], self.window
        )

    def class_counts(self) -> Dict[int, int]:
        counts = {0: 0, 1: 0}
        for s in self.samples:
            counts[s.label] += 1
        return counts

    # -------------------------------------------------------------------------
    # Export
    # -------------------------------------------------------------------------

    def to_lines(self) -> str:
        return ''.join(s.to_line() + '\n' for s in self.samples)

    def save_lines(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_lines(), encoding='utf-8')

    @classmethod
    def load_lines(cls, path: Union[str, Path]) -> 'BbblDataset':
        samples = [
            BbblSample.from_line(line)
            for line in Path(path).read_text(encoding='utf-8').splitlines()
            if line.strip()
        ]
        window = max((len(s.window) for s in samples), default=1)
        return cls(samples, window)

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for s in self.samples:
            rows.append({
                'program_id': s.program_id,
                'branch_address': s.branch_address,
                'br_up': s.br_up,
                'label': s.label,
                'window_length': len(s.window),
                'branch_opcode': s.branch.opcode.value,
                'window': '|'.join(r.to_text() for r in s.window),
            })
        return pd.DataFrame(rows, columns=[
            'program_id', 'branch_address', 'br_up', 'label',
            'window_length', 'branch_opcode', 'window',
        ])

    def to_parquet(self, path: Union[str, Path]) -> None:
        self.to_frame().to_parquet(path, compression='snappy', index=False)


def build_dataset(
    corpus: Mapping[str, Program],
    key: ObfKey,
    scheme: HashScheme,
    window: int,
    workers: int = 1,
    verbose: bool = False,
) -> BbblDataset:
    """
    Build a labeled branch dataset from a corpus.

    Args:
        corpus: program_id -> plain program
        key: Obfuscation key
        scheme: Decision function
        window: Window size I
        workers: Worker processes (1 = in-process)
        verbose: Print per-program progress

    Returns:
        BbblDataset ordered by program id

    Raises:
        DatasetError: If the corpus has fewer programs than a program-level split needs
    """
    if window < 1:
        raise ValueError(f"Window size must be >= 1, got {window}")
    if len(corpus) < StealthConfig.MIN_PROGRAMS:
        raise DatasetError(
            f"Corpus has {len(corpus)} programs; at least {StealthConfig.MIN_PROGRAMS} "
            f"are needed for a train/test split by program"
        )

    ids = sorted(corpus)
    tasks = [(pid, corpus[pid], key, scheme, window) for pid in ids]
    results: Dict[str, List[BbblSample]] = {}

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, (pid, samples) in enumerate(pool.map(_program_samples_task, tasks), 1):
                results[pid] = samples
                if verbose:
                    print(f"[{i}/{len(ids)}] {pid}: {len(samples)} samples")
    else:
        for i, task in enumerate(tasks, 1):
            pid, samples = _program_samples_task(task)
            results[pid] = samples
            if verbose:
                print(f"[{i}/{len(ids)}] {pid}: {len(samples)} samples")

    samples = [s for pid in ids for s in results[pid]]
    dataset = BbblDataset(samples, window)
    counts = dataset.class_counts()
    logger.info(
        f"Built dataset: {len(ids)} programs, {len(samples)} samples "
        f"(label 0: {counts[0]}, label 1: {counts[1]})"
    )
    return dataset


def relabel(dataset: BbblDataset, seed: Optional[int] = None) -> BbblDataset:
    """Replace every label with an independent fair coin flip."""
    rng = np.random.default_rng(seed)
    return dataset.with_labels(rng.integers(0, 2, size=len(dataset)).tolist())

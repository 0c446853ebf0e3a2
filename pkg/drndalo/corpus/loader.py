"""
Corpus loading: every `*.s` file in a directory becomes one program keyed by
its file stem.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

from drndalo.isa.assembler import parse_asm
from drndalo.isa.program import Program

logger = logging.getLogger('drndalo.corpus')

BUNDLED_DIR = Path(__file__).parent / 'programs'
ASM_SUFFIX = '.s'


def list_programs(directory: Union[str, Path]) -> List[Path]:
    """Assembly files directly under a directory, sorted by name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"Corpus directory not found: {directory}")
    return sorted(directory.glob(f"*{ASM_SUFFIX}"))


def load_program(path: Union[str, Path]) -> Program:
    return parse_asm(Path(path).read_text(encoding='utf-8'))


def load_corpus(directory: Optional[Union[str, Path]] = None) -> Dict[str, Program]:
    """
    Parse every program of a corpus directory.

    Args:
        directory: Corpus directory (None = bundled corpus)

    Returns:
        Dictionary mapping program id (file stem) to Program, sorted by id

    Raises:
        FileNotFoundError: If the directory does not exist
        AsmSyntaxError: If a program fails to assemble (message names the file)
    """
    paths = list_programs(directory if directory is not None else BUNDLED_DIR)
    corpus: Dict[str, Program] = {}
    for path in paths:
        try:
            corpus[path.stem] = load_program(path)
        except ValueError as e:
            logger.error(f"Failed to assemble {path.name}: {e}")
            raise
    logger.info(f"Loaded {len(corpus)} programs from {directory or BUNDLED_DIR}")
    return corpus


def bundled_corpus() -> Dict[str, Program]:
    return load_corpus(BUNDLED_DIR)

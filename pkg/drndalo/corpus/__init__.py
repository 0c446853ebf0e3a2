"""
Drndalo Corpus Module - Bundled Programs and Synthetic Generator

## Quick Start

```python
from drndalo.corpus import bundled_corpus, generate_corpus

corpus = bundled_corpus()                # {'bubble_sort': Program, ...}
synthetic = generate_corpus(100, seed=0)  # skewed BLT:BGE branch distribution
```
"""

from drndalo.corpus.generator import (
    DEFAULT_BRANCH_WEIGHTS,
    UNIFORM_BRANCH_WEIGHTS,
    GeneratorConfig,
    ProgramGenerator,
    generate_corpus,
)
from drndalo.corpus.loader import BUNDLED_DIR, bundled_corpus, list_programs, load_corpus, load_program

__all__ = [
    # Loading
    'BUNDLED_DIR',
    'bundled_corpus',
    'list_programs',
    'load_corpus',
    'load_program',

    # Generation
    'DEFAULT_BRANCH_WEIGHTS',
    'UNIFORM_BRANCH_WEIGHTS',
    'GeneratorConfig',
    'ProgramGenerator',
    'generate_corpus',
]

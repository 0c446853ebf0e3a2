"""
Tool-level configuration.

Loads the obfuscation key, hash parameters, simulator and stealth defaults and
paths from a line-oriented `key = value` file, a dictionary or the environment.
CLI flags override every value loaded here.
"""

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import TYPE_CHECKING, Dict, Optional, Tuple, Union

from dotenv import load_dotenv

from drndalo.config.feature_config import StealthConfig
from drndalo.config.hash_config import DEFAULT_LFSR_PRESET, LFSR_PRESETS, LfsrConfig, ObfKey
from drndalo.config.sim_config import Design, SimConfig

if TYPE_CHECKING:
    from drndalo.obfuscation.keyed_hash import HashScheme
    from drndalo.obfuscation.mask import InversionMask

_DEFAULT_LFSR = LFSR_PRESETS[DEFAULT_LFSR_PRESET]


def _hex_or_int(text: str) -> int:
    return int(text, 0)


def _windows(text: str) -> Tuple[int, ...]:
    return tuple(int(part) for part in text.split(',') if part.strip())


# Config-file key -> (ToolConfig field, parser)
FILE_KEYS = {
    'key': ('key', str),
    'scheme': ('scheme', str),
    'lfsr.n': ('lfsr_n', int),
    'lfsr.k': ('lfsr_k', int),
    'lfsr.taps': ('lfsr_taps', _hex_or_int),
    'sim.design': ('design', str),
    'sim.hash_cycles': ('hash_cycles', int),
    'sim.cache_lines': ('cache_lines', int),
    'sim.branch_penalty': ('branch_penalty', int),
    'sim.overlap': ('overlap', int),
    'sim.max_cycles': ('max_cycles', int),
    'stealth.windows': ('windows', _windows),
    'stealth.model': ('model', str),
    'stealth.split_seed': ('split_seed', int),
    'paths.corpus': ('corpus_dir', str),
    'paths.reports': ('report_dir', str),
    'workers': ('workers', int),
}


@dataclass
class ToolConfig:
    """
    Configuration for the drndalo command-line tool.

    Attributes:
        key: Obfuscation key as hex (None when not configured)
        scheme: Keyed hash, 'lfsr' or 'mix64'
        lfsr_n, lfsr_k, lfsr_taps: LFSR width, cycle count and taps
        design: Default processor design for `sim`
        hash_cycles, cache_lines, branch_penalty, overlap, max_cycles: Simulator defaults
        windows: Stealth window sizes, ascending
        model: Stealth classifier
        split_seed: Train/test split seed
        corpus_dir: Corpus directory (None = bundled corpus)
        report_dir: Directory for reports and figures
        workers: Worker processes for batch commands (1 = in-process)
    """

    key: Optional[str] = None
    scheme: str = 'lfsr'
    lfsr_n: int = _DEFAULT_LFSR['n']
    lfsr_k: int = _DEFAULT_LFSR['k']
    lfsr_taps: int = _DEFAULT_LFSR['taps']
    design: str = Design.BASELINE.value
    hash_cycles: int = 16
    cache_lines: int = 256
    branch_penalty: int = 2
    overlap: int = 1
    max_cycles: int = 10_000_000
    windows: Tuple[int, ...] = StealthConfig.DEFAULT_WINDOWS
    model: str = StealthConfig.DEFAULT_MODEL
    split_seed: int = StealthConfig.DEFAULT_SPLIT_SEED
    corpus_dir: Optional[str] = None
    report_dir: str = './reports'
    workers: int = 1

    def __post_init__(self):
        from drndalo.obfuscation.keyed_hash import SCHEME_NAMES

        if self.key is not None:
            ObfKey.from_hex(self.key)
        if self.scheme not in SCHEME_NAMES:
            raise ValueError(
                f"Unknown scheme '{self.scheme}'. Available: {', '.join(SCHEME_NAMES)}"
            )
        self.lfsr_config()
        self.design = Design(self.design).value
        self.windows = tuple(StealthConfig.validate_windows(self.windows))
        StealthConfig.validate_model(self.model)
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        # SimConfig checks the numeric ranges
        SimConfig(
            hash_cycles=self.hash_cycles,
            cache_lines=self.cache_lines,
            branch_penalty=self.branch_penalty,
            decode_to_execute_overlap=self.overlap,
            max_cycles=self.max_cycles,
        )

    # ------------------------------------------------------------------
    # Loading
    # ------------------------------------------------------------------

    @classmethod
    def from_dict(cls, config_dict: Dict) -> 'ToolConfig':
        """
        Create configuration from a dictionary of field names.

        Example:
            >>> config = ToolConfig.from_dict({'key': '00000000deadbeef', 'scheme': 'mix64'})
        """
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(config_dict) - known)
        if unknown:
            raise ValueError(f"Unknown config fields: {', '.join(unknown)}")
        return cls(**config_dict)

    @classmethod
    def parse_text(cls, text: str, base: Optional['ToolConfig'] = None) -> 'ToolConfig':
        """
        Parse `key = value` lines (dotted keys such as lfsr.taps) over a base config.

        Raises:
            ValueError: On malformed lines, unknown keys or invalid values
        """
        changes: Dict = {}
        for line_number, raw in enumerate(text.splitlines(), 1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ValueError(f"Config line {line_number}: expected 'key = value', got '{raw.strip()}'")
            name, value = (part.strip() for part in line.split('=', 1))
            if name not in FILE_KEYS:
                raise ValueError(
                    f"Config line {line_number}: unknown key '{name}'. "
                    f"Available: {', '.join(sorted(FILE_KEYS))}"
                )
            attr, parser = FILE_KEYS[name]
            try:
                changes[attr] = parser(value)
            except ValueError as e:
                raise ValueError(f"Config line {line_number}: bad value for '{name}': {value}") from e
        return replace(base or cls(), **changes)

    @classmethod
    def from_file(cls, path: Union[str, Path], base: Optional['ToolConfig'] = None) -> 'ToolConfig':
        return cls.parse_text(Path(path).read_text(encoding='utf-8'), base=base)

    @classmethod
    def from_env(cls) -> 'ToolConfig':
        """
        Load configuration from the environment (.env file included).

        Optional environment variables:
            - DRNDALO_CONFIG: Path of a `key = value` config file
            - DRNDALO_KEY: Obfuscation key, used when the file sets none

        Returns:
            ToolConfig instance
        """
        load_dotenv()

        config = cls()
        env_key = os.environ.get('DRNDALO_KEY')
        if env_key:
            config = replace(config, key=env_key)

        config_path = os.environ.get('DRNDALO_CONFIG')
        if config_path:
            config = cls.from_file(config_path, base=config)
        return config

    # ------------------------------------------------------------------
    # Derived objects
    # ------------------------------------------------------------------

    def obf_key(self) -> Optional[ObfKey]:
        return ObfKey.from_hex(self.key) if self.key is not None else None

    def lfsr_config(self) -> LfsrConfig:
        return LfsrConfig(n=self.lfsr_n, k=self.lfsr_k, taps=self.lfsr_taps)

    def hash_scheme(self) -> 'HashScheme':
        from drndalo.obfuscation.keyed_hash import scheme_from_name

        return scheme_from_name(self.scheme, lfsr=self.lfsr_config())

    def sim_config(
        self,
        design: Optional[str] = None,
        mask: Optional['InversionMask'] = None,
        **changes,
    ) -> SimConfig:
        """
        SimConfig for a design, filled from this config.

        Keyed designs get this config's key and scheme.
        """
        design = Design(design or self.design)
        params = dict(
            design=design,
            hash_cycles=self.hash_cycles,
            cache_lines=self.cache_lines,
            branch_penalty=self.branch_penalty,
            decode_to_execute_overlap=self.overlap,
            max_cycles=self.max_cycles,
            mask=mask,
        )
        if design.keyed:
            params['scheme'] = self.hash_scheme()
            params['key'] = self.obf_key()
        params.update(changes)
        return SimConfig(**params)

    def __repr__(self) -> str:
        """String representation with masked key."""
        key = f"***{self.key[-4:]}" if self.key else 'None'
        return (
            f"ToolConfig(\n"
            f"  key={key},\n"
            f"  scheme={self.scheme}, lfsr=(n={self.lfsr_n}, k={self.lfsr_k}, taps=0x{self.lfsr_taps:x}),\n"
            f"  sim=({self.design}, hash_cycles={self.hash_cycles}, cache_lines={self.cache_lines}, "
            f"penalty={self.branch_penalty}, overlap={self.overlap}, max_cycles={self.max_cycles}),\n"
            f"  stealth=(windows={list(self.windows)}, model={self.model}, split_seed={self.split_seed}),\n"
            f"  corpus_dir={self.corpus_dir}, report_dir={self.report_dir}, workers={self.workers}\n"
            f")"
        )

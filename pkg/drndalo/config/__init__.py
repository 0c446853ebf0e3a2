"""
Drndalo Configuration Module

Tool configuration, obfuscation keys and LFSR presets, simulator designs and
the stealth feature layout.
"""

from drndalo.config.feature_config import StealthConfig, feature_names, feature_width
from drndalo.config.hash_config import LFSR_PRESETS, LfsrConfig, ObfKey
from drndalo.config.isa_config import IsaConfig
from drndalo.config.sim_config import Design, SimConfig
from drndalo.config.tool_config import ToolConfig

__all__ = [
    'ToolConfig',
    'ObfKey',
    'LfsrConfig',
    'LFSR_PRESETS',
    'Design',
    'SimConfig',
    'IsaConfig',
    'StealthConfig',
    'feature_names',
    'feature_width',
]

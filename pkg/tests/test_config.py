"""Tests for tool configuration loading."""

import pytest

from drndalo.config import Design, ToolConfig
from drndalo.obfuscation import LfsrHash, Mix64Hash

CONFIG_TEXT = """
# drndalo settings
key = 0123456789abcdef
scheme = lfsr
lfsr.n = 7
lfsr.k = 8
lfsr.taps = 0x41
sim.design = cache
sim.hash_cycles = 8
stealth.windows = 1, 2, 4
stealth.model = tree
workers = 2
"""


def test_defaults():
    config = ToolConfig()
    assert config.key is None
    assert config.obf_key() is None
    assert (config.lfsr_n, config.lfsr_k, config.lfsr_taps) == (15, 16, 0x4001)
    assert config.windows == (1, 2, 4, 8)
    assert config.sim_config().design is Design.BASELINE


def test_parse_text():
    config = ToolConfig.parse_text(CONFIG_TEXT)
    assert config.obf_key().bits == 0x0123456789ABCDEF
    assert config.lfsr_config().taps == 0x41
    assert config.hash_scheme() == LfsrHash(config.lfsr_config())
    assert config.design == 'cache'
    assert config.windows == (1, 2, 4)
    assert config.model == 'tree'
    assert config.workers == 2


def test_file_values_override_base(tmp_path):
    path = tmp_path / 'drndalo.conf'
    path.write_text("scheme = mix64\n")
    base = ToolConfig(key='00000000deadbeef', workers=3)
    config = ToolConfig.from_file(path, base=base)
    assert config.scheme == 'mix64'
    assert config.key == '00000000deadbeef'
    assert config.workers == 3


@pytest.mark.parametrize('text, fragment', [
    ("colour = blue\n", "line 1: unknown key 'colour'"),
    ("\nscheme\n", "line 2: expected 'key = value'"),
    ("sim.hash_cycles = many\n", "bad value for 'sim.hash_cycles'"),
    ("scheme = sha3\n", "Unknown scheme"),
    ("key = nothex\n", "16 hex digits"),
    ("lfsr.n = 16\nlfsr.k = 16\n", "k must exceed n"),
    ("sim.cache_lines = 100\n", "power of two"),
    ("stealth.windows = 4, 2\n", "ascending"),
    ("workers = 0\n", "workers"),
])
def test_invalid_config_text(text, fragment):
    with pytest.raises(ValueError, match=fragment):
        ToolConfig.parse_text(text)


def test_from_dict_rejects_unknown_fields():
    assert ToolConfig.from_dict({'scheme': 'mix64'}).hash_scheme() == Mix64Hash()
    with pytest.raises(ValueError, match="Unknown config fields: colour"):
        ToolConfig.from_dict({'colour': 'blue'})


def test_from_env(monkeypatch, tmp_path, mocker):
    mocker.patch('drndalo.config.tool_config.load_dotenv')
    path = tmp_path / 'drndalo.conf'
    path.write_text("sim.design = stall\n")
    monkeypatch.setenv('DRNDALO_KEY', '00000000cafef00d')
    monkeypatch.setenv('DRNDALO_CONFIG', str(path))
    config = ToolConfig.from_env()
    assert config.key == '00000000cafef00d'
    assert config.design == 'stall'


def test_from_env_without_variables(monkeypatch, mocker):
    mocker.patch('drndalo.config.tool_config.load_dotenv')
    monkeypatch.delenv('DRNDALO_KEY', raising=False)
    monkeypatch.delenv('DRNDALO_CONFIG', raising=False)
    assert ToolConfig.from_env() == ToolConfig()


def test_from_env_reads_dotenv(monkeypatch, mocker):
    monkeypatch.delenv('DRNDALO_KEY', raising=False)
    monkeypatch.delenv('DRNDALO_CONFIG', raising=False)

    def fake_load_dotenv():
        monkeypatch.setenv('DRNDALO_KEY', '0000000000000abc')
        return True

    loader = mocker.patch('drndalo.config.tool_config.load_dotenv', side_effect=fake_load_dotenv)
    config = ToolConfig.from_env()
    loader.assert_called_once()
    assert config.obf_key().bits == 0xABC


def test_sim_config_for_keyed_design():
    config = ToolConfig(key='00000000deadbeef', scheme='mix64', hash_cycles=8)
    sim = config.sim_config('stall')
    assert sim.design is Design.STALLED_HASH
    assert sim.scheme == Mix64Hash()
    assert sim.key == config.obf_key()
    assert sim.stall_per_branch == 7
    assert config.sim_config('cache', max_cycles=5).max_cycles == 5


def test_sim_config_keyed_design_needs_key():
    with pytest.raises(ValueError, match="requires a hash scheme and a key"):
        ToolConfig().sim_config('stall')


def test_repr_masks_the_key():
    config = ToolConfig(key='0123456789abcdef')
    text = repr(config)
    assert '***cdef' in text
    assert '0123456789ab' not in text


def test_non_maximal_taps_warn_when_the_scheme_is_built(caplog):
    config = ToolConfig(lfsr_n=4, lfsr_k=5, lfsr_taps=0b1111)
    with caplog.at_level('WARNING', logger='drndalo.config'):
        scheme = config.hash_scheme()
    assert scheme == LfsrHash(config.lfsr_config())
    assert 'not maximal-length' in caplog.text


def test_default_taps_build_silently(caplog):
    with caplog.at_level('WARNING', logger='drndalo.config'):
        ToolConfig().hash_scheme()
    assert caplog.text == ''

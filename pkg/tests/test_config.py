from pathlib import Path

import pytest

from qswap.config import config_from_text, fill_auto, load_config, parse_array
from qswap.errors import ConfigError

EXAMPLE = Path(__file__).resolve().parents[1] / "configs" / "example.ini"


def test_example_config_loads():
    cfg = load_config(EXAMPLE)
    assert cfg.channel.dim_a == 4 and cfg.channel.dim_b == 5
    assert abs(sum(v * v for v in cfg.channel.d) - 1) < 1e-12
    assert cfg.swap.strategies == ("me", "mc", "smc")
    assert cfg.sweep.c_grid.num == 101
    assert cfg.check.n_channels == 100 and cfg.mc_samples == 100000


def test_parse_array():
    assert parse_array("[1, 2 ,3]", "k") == ["1", "2", "3"]
    assert parse_array("[]", "k") == []
    with pytest.raises(ConfigError, match="k"):
        parse_array("1, 2", "k")


def test_fill_auto():
    assert fill_auto([0.6, "auto"], "c") == pytest.approx([0.6, 0.8])
    with pytest.raises(ConfigError, match="c"):
        fill_auto([0.9, 0.9, "auto"], "c")


@pytest.mark.parametrize(
    "text,key",
    [
        ("[channel]\ndim_a=2\ndim_b=2\nc=[1,0]\nd=[1,0]\ncolour=red\n", "channel.colour"),
        ("[channel]\ndim_a=2\ndim_b=2\nc=[1,0]\n", "channel.d"),
        ("[channel]\ndim_a=2\ndim_b=2\nc=[1,x]\nd=[1,0]\n", "channel.c"),
        ("[channel]\ndim_a=2.5\ndim_b=2\nc=[1,0]\nd=[1,0]\n", "channel.dim_a"),
        ("[swap]\nbeta_max=-1\n", "swap.beta_max"),
        ("[swap]\nstrategies=[me, ud]\n", "swap.strategies"),
        ("[swap]\neffective=perhaps\n", "swap.effective"),
        ("[check]\ntolerance=0\n", "tolerance"),
        ("[check]\nseed=abc\n", "check.seed"),
        ("[sweep]\nc=[free, 0.1, 0.2]\n", "sweep"),
        ("[extras]\nx=1\n", "extras"),
    ],
)
def test_bad_configs_name_the_key(text, key):
    with pytest.raises(ConfigError, match=key.replace(".", r"\.")):
        config_from_text(text)


def test_normalization_is_checked():
    text = "[channel]\ndim_a=2\ndim_b=2\nc=[0.7, 0.7]\nd=[1, 0]\n"
    with pytest.raises(ConfigError, match="channel"):
        config_from_text(text)
    assert config_from_text(text, renormalize=True).channel.c[0] == pytest.approx(2**-0.5)


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/run.ini")

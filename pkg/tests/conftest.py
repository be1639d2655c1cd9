import pytest

from hetcache import NetworkConfig, dbm_to_watts
from hetcache.config import fig6_config


@pytest.fixture
def cfg():
    """Default typical parameter set."""
    return NetworkConfig()


@pytest.fixture
def cfg_lowpower():
    """Same set with the low-power D2D tier (P1 = 13 dBm)."""
    return NetworkConfig().with_updates(p1=dbm_to_watts(13.0))


@pytest.fixture
def cfg_queue():
    """Denser relay/BS set used for the queueing studies."""
    return fig6_config()

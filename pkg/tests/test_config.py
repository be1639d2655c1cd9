import json
import math

import pytest

from hetcache import NetworkConfig, dbm_to_watts, load_config, watts_to_dbm
from hetcache.config import DISK_500M_AREA, config_from_dict, db_to_linear


def test_unit_conversions_roundtrip():
    assert dbm_to_watts(30.0) == pytest.approx(1.0)
    assert dbm_to_watts(23.0) == pytest.approx(0.19952623, rel=1e-8)
    assert watts_to_dbm(dbm_to_watts(13.0)) == pytest.approx(13.0, abs=1e-12)
    assert db_to_linear(-10.0) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        watts_to_dbm(0.0)


def test_default_densities(cfg):
    assert cfg.lambda0 == pytest.approx(300.0 / DISK_500M_AREA)
    assert cfg.lambda2 == pytest.approx(5.0 / DISK_500M_AREA)
    assert cfg.lambda3 == pytest.approx(1.0 / DISK_500M_AREA)
    assert cfg.lambda1 == pytest.approx(0.1 * cfg.lambda0)
    assert cfg.densities == (cfg.lambda1, cfg.lambda2, cfg.lambda3)


@pytest.mark.parametrize("bad", [
    dict(alpha=1.5),
    dict(alpha=-0.1),
    dict(lambda2=1.0),            # violates lambda0 > lambda2
    dict(beta=1.5),
    dict(m1=50),                  # m1 >= m2
    dict(m2=200),                 # m2 >= n_contents
    dict(backhaul_kappa=1.0),
    dict(backhaul_kappa=0.0),
    dict(noise=-1e-9),
    dict(p1=0.0),
])
def test_invalid_configs_rejected(bad):
    with pytest.raises(ValueError):
        NetworkConfig(**bad)


def test_with_updates_is_functional(cfg):
    c2 = cfg.with_updates(alpha=0.3)
    assert c2.alpha == 0.3
    assert cfg.alpha == 0.1


def test_flat_dict_has_dbm_views(cfg):
    flat = cfg.to_flat_dict()
    assert flat["p1_dbm"] == pytest.approx(23.0)
    assert flat["p3_dbm"] == pytest.approx(43.0)
    assert flat["alpha"] == cfg.alpha


def test_config_from_dict_dbm_wins():
    cfg = config_from_dict({"p1_dbm": 13.0, "alpha": 0.2})
    assert cfg.p1 == pytest.approx(dbm_to_watts(13.0))
    assert cfg.alpha == 0.2


def test_config_from_dict_rejects_unknown_keys():
    with pytest.raises(Exception):
        config_from_dict({"frequency": 2.4e9})


def test_load_default_config_file(tmp_path):
    from importlib import resources

    with resources.files("hetcache").joinpath("default_config.json").open() as fh:
        raw = json.load(fh)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(raw))
    cfg = load_config(str(path))
    assert cfg.lambda0 == pytest.approx(300.0 / DISK_500M_AREA, rel=1e-9)
    assert math.isclose(cfg.p2, dbm_to_watts(33.0), rel_tol=1e-9)

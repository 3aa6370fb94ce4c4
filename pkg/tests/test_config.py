import json

import pytest

from densecell import config as cfgmod
from densecell.channel import AntennaScalingLaw
from densecell.config import NetworkConfig, digest, from_dict, load
from densecell.errors import ConfigError

BASE = {
    "network": {"densities": [1.0, 10.0]},
    "pathloss": {"variant": "stretched_exp", "eta": 0.9, "kappa": 0.52},
    "antennas": {"t_laws": [{"form": "power", "c": 1.0, "p": 1.0}]},
    "simulation": {"trials": 10, "seed": 7},
}


class TestParsing:
    def test_json_and_toml_agree(self, tmp_path):
        j = tmp_path / "c.json"
        j.write_text(json.dumps(BASE))
        t = tmp_path / "c.toml"
        t.write_text(
            "[network]\ndensities = [1.0, 10.0]\n"
            "[pathloss]\nvariant = \"stretched_exp\"\neta = 0.9\nkappa = 0.52\n"
            "[antennas]\nt_laws = [{ form = \"power\", c = 1.0, p = 1.0 }]\n"
            "[simulation]\ntrials = 10\nseed = 7\n")
        assert load(j) == load(t)
        assert digest(load(j)) == digest(load(t))

    def test_density_range(self):
        doc = dict(BASE, network={"densities": {"min": 1, "max": 1000, "points": 4}})
        assert from_dict(doc).densities == pytest.approx((1.0, 10.0, 100.0, 1000.0))

    def test_defaults(self):
        cfg = from_dict({"pathloss": BASE["pathloss"]})
        assert cfg.trials == 10_000 and cfg.master_seed == 2020
        assert cfg.t_laws == (AntennaScalingLaw.constant(1),)
        assert len(cfg.densities) == 8

    def test_bad_toml(self, tmp_path):
        p = tmp_path / "bad.toml"
        p.write_text("[network\n")
        with pytest.raises(ConfigError):
            load(p)

    @pytest.mark.parametrize("mutate", [
        lambda d: d.pop("pathloss"),
        lambda d: d.update(extra={}),
        lambda d: d["network"].update(densities=[10.0, 1.0]),
        lambda d: d["simulation"].update(trials=0),
        lambda d: d["antennas"].update(mode="siso"),
        lambda d: d["antennas"].update(mode="mimo", r_law={"form": "power", "c": 2.0, "p": 1.0}),
    ])
    def test_rejects(self, mutate):
        doc = json.loads(json.dumps(BASE))
        mutate(doc)
        with pytest.raises(ConfigError):
            from_dict(doc)

    def test_workers_env(self, monkeypatch):
        monkeypatch.setenv(cfgmod.WORKERS_ENV, "3")
        assert from_dict(BASE).workers == 3


class TestDigest:
    def test_workers_excluded(self):
        a = from_dict(BASE)
        assert digest(a) == digest(a.with_(workers=8))

    def test_seed_changes_digest(self):
        a = from_dict(BASE)
        assert digest(a) != digest(a.with_(master_seed=8))

    def test_stable_value(self):
        # frozen: a change here means cached outputs and CSV headers change too
        assert digest(from_dict(BASE)) == digest(from_dict(json.loads(json.dumps(BASE))))
        assert len(digest(from_dict(BASE))) == 64

"""On-disk container format: round trips, corruption detection, and
byte-level determinism of every emitter."""

import json
import struct

import numpy as np
import pytest

from locrate.container import (MAGIC, ContainerCorrupt, load_arrays,
                               load_capacity_map, load_environment,
                               save_arrays, save_capacity_map,
                               save_environment, write_csv, write_json)
from locrate.environment import (EnvConfig, generate_environment,
                                 outage_capacity_map)
from locrate.core import SystemConfig


def env_cfg(seed=3):
    return EnvConfig(
        cell=(0.0, 20.0, 0.0, 20.0), spacing_m=10.0, margin_m=10.0,
        bs_positions=((10.0, 10.0, 10.0),), ue_height_m=1.5,
        path_count=3, path_loss_exponent=2.0, path_gain=1.0,
        shadow_std_db=3.0, shadow_decorr_m=20.0,
        mean_excess_delay_s=30e-9, delay_decorr_m=10.0,
        pdp_decay_s=40e-9, seed=seed)


class TestArrays:
    def arrays(self):
        rng = np.random.default_rng(0)
        return {
            "a": rng.standard_normal((3, 4)),
            "b": (rng.standard_normal(5) + 1j * rng.standard_normal(5)),
            "flags": np.array([True, False, True]),
            "counts": np.arange(4, dtype=np.int64),
        }

    def test_round_trip(self, tmp_path):
        path = tmp_path / "t.bin"
        arrays = self.arrays()
        save_arrays(path, {"kind": "test", "note": 7}, arrays)
        meta, loaded = load_arrays(path)
        assert meta == {"kind": "test", "note": 7}
        assert set(loaded) == set(arrays)
        for name in arrays:
            assert np.array_equal(loaded[name], arrays[name])
            assert loaded[name].dtype == arrays[name].dtype

    def test_sidecar_mirrors_header(self, tmp_path):
        path = tmp_path / "t.bin"
        save_arrays(path, {"kind": "test"}, self.arrays())
        side = json.loads((tmp_path / "t.bin.json").read_text())
        assert side["meta"] == {"kind": "test"}
        assert {d["name"] for d in side["arrays"]} == set(self.arrays())

    def test_byte_identical_rewrites(self, tmp_path):
        p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
        save_arrays(p1, {"k": 1}, self.arrays())
        save_arrays(p2, {"k": 1}, self.arrays())
        assert p1.read_bytes() == p2.read_bytes()

    def test_rejects_unsupported_dtype(self, tmp_path):
        with pytest.raises(ValueError):
            save_arrays(tmp_path / "t.bin", {}, {"x": np.zeros(3, np.float32)})

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_arrays(tmp_path / "absent.bin")


class TestCorruption:
    def write(self, tmp_path):
        path = tmp_path / "t.bin"
        save_arrays(path, {"kind": "test"}, {"x": np.arange(6, dtype=np.float64)})
        return path

    def test_bad_magic(self, tmp_path):
        path = self.write(tmp_path)
        raw = bytearray(path.read_bytes())
        raw[:8] = b"NOTMAGIC"
        path.write_bytes(bytes(raw))
        with pytest.raises(ContainerCorrupt, match="magic"):
            load_arrays(path)

    def test_truncated_payload(self, tmp_path):
        path = self.write(tmp_path)
        raw = path.read_bytes()
        path.write_bytes(raw[:-8])
        with pytest.raises(ContainerCorrupt, match="truncated"):
            load_arrays(path)

    def test_trailing_bytes(self, tmp_path):
        path = self.write(tmp_path)
        path.write_bytes(path.read_bytes() + b"\x00")
        with pytest.raises(ContainerCorrupt, match="trailing"):
            load_arrays(path)

    def test_header_json_invalid(self, tmp_path):
        path = self.write(tmp_path)
        raw = bytearray(path.read_bytes())
        raw[16] = ord("X")  # clobber the first header byte
        path.write_bytes(bytes(raw))
        with pytest.raises(ContainerCorrupt):
            load_arrays(path)

    def test_unsupported_version(self, tmp_path):
        path = tmp_path / "t.bin"
        header = json.dumps({"version": 99, "meta": {}, "arrays": []},
                            sort_keys=True, separators=(",", ":")).encode()
        path.write_bytes(MAGIC + struct.pack("<Q", len(header)) + header)
        with pytest.raises(ContainerCorrupt, match="version"):
            load_arrays(path)

    def test_wrong_kind(self, tmp_path):
        path = self.write(tmp_path)
        with pytest.raises(ContainerCorrupt, match="not an environment"):
            load_environment(path)
        with pytest.raises(ContainerCorrupt, match="not a capacity-map"):
            load_capacity_map(path)


class TestDomainContainers:
    def test_environment_round_trip(self, tmp_path):
        env = generate_environment(env_cfg())
        path = tmp_path / "env.bin"
        save_environment(path, env)
        back = load_environment(path)
        assert np.array_equal(back.amplitudes, env.amplitudes)
        assert np.array_equal(back.delays, env.delays)
        assert np.array_equal(back.bs_positions, env.bs_positions)
        assert back.grid == env.grid
        assert back.seed == env.seed
        assert back.config == env.config

    def test_capacity_map_round_trip(self, tmp_path):
        env = generate_environment(env_cfg())
        sys_cfg = SystemConfig(bandwidth_hz=100e6, subcarrier_count=51,
                               tx_snr=1.0)
        cmap = outage_capacity_map(env, 0, 0.01, 300, sys_cfg)
        path = tmp_path / "cap.bin"
        save_capacity_map(path, cmap, seed=3)
        back = load_capacity_map(path)
        assert np.array_equal(back.values, cmap.values)
        assert back.grid == cmap.grid
        assert back.eps == cmap.eps
        assert back.sample_count == cmap.sample_count


class TestTextEmitters:
    def test_csv_values_round_trip_exactly(self, tmp_path):
        path = tmp_path / "t.csv"
        rng = np.random.default_rng(1)
        cols = [rng.standard_normal(20), np.pi * rng.standard_normal(20)]
        write_csv(path, "note", ["u", "v"], cols)
        back = np.genfromtxt(path, delimiter=",", names=True, skip_header=1)
        assert np.array_equal(back["u"], cols[0])  # .17g is lossless
        assert np.array_equal(back["v"], cols[1])
        assert path.read_text().startswith("# note\nu,v\n")

    def test_csv_deterministic(self, tmp_path):
        cols = [np.arange(5.0), np.arange(5.0) ** 2]
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(p1, "c", ["x", "y"], cols)
        write_csv(p2, "c", ["x", "y"], cols)
        assert p1.read_bytes() == p2.read_bytes()

    def test_json_sorted_with_newline(self, tmp_path):
        path = tmp_path / "t.json"
        write_json(path, {"b": 2, "a": 1})
        text = path.read_text()
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": 1, "b": 2}

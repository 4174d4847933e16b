import json
import math
import os
import time

import pytest

from maninlab.cache import DiskCache
from maninlab.cli import main
from maninlab.config import ExperimentConfig
from maninlab.reports import canonical_json, csv_text, fmt12


def test_config_roundtrip_defaults():
    cfg = ExperimentConfig()
    again = ExperimentConfig.from_yaml(cfg.to_yaml())
    assert cfg == again


def test_config_roundtrip_custom(tmp_path):
    cfg = ExperimentConfig(
        polynomial=[[1, [2, 0, 0]], [2, [0, 1, 1]]],
        n=3,
        bad_primes=[2, 7],
        s0=5.0,
        s1=4.0,
        B=250.0,
        grid=[10.0, 100.0],
        threads=4,
        seed=12,
        format="csv",
        timings="real",
    )
    path = tmp_path / "cfg.yaml"
    cfg.save(str(path))
    assert ExperimentConfig.load(str(path)) == cfg


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"no_such_knob": 1})
    with pytest.raises(ValueError):
        ExperimentConfig(format="xml")
    with pytest.raises(ValueError):
        ExperimentConfig(s0=4.0).s()


def test_config_grid_and_form():
    cfg = ExperimentConfig(grid="1:1000:4")
    assert cfg.grid_values() == pytest.approx([1, 10, 100, 1000])
    assert cfg.form().n == 3
    assert cfg.s() == (4, 3)


def test_cache_roundtrip_and_corruption(tmp_path):
    cache = DiskCache(str(tmp_path / "c"))
    key = cache.key("scan", {"B": 10})
    assert cache.load(key) is None
    cache.store(key, [[10.0, 19]])
    assert cache.load(key) == [[10.0, 19]]
    # key depends on the payload
    assert cache.key("scan", {"B": 11}) != key
    # corrupted entries read as misses
    with open(cache._path(key), "w") as fh:
        fh.write("{broken")
    assert cache.load(key) is None


def test_cache_eviction(tmp_path):
    cache = DiskCache(str(tmp_path / "c"), quota_bytes=200)
    keys = [cache.key("x", {"i": i}) for i in range(6)]
    for i, k in enumerate(keys):
        cache.store(k, "v" * 50)
        time.sleep(0.01)
    # the oldest entries were evicted to stay under quota
    assert cache.load(keys[0]) is None
    assert cache.load(keys[-1]) is not None


def test_fmt12_and_canonical_json():
    assert fmt12(2 * math.sqrt(3)) == "3.46410161514"
    from fractions import Fraction

    blob = canonical_json({"a": Fraction(52, 27), "b": [1.0, 0.5], "c": complex(1, -2)})
    data = json.loads(blob)
    assert data["a"] == "52/27"
    assert data["c"] == {"im": -2.0, "re": 1.0}


def _run(args):
    return main(args)


def test_cli_count_json(tmp_path, capsys):
    out = tmp_path / "count.json"
    rc = _run(["count", "--f", "x1^2+x2^2+x3^2", "--B", "3.5", "--out", str(out)])
    assert rc == 0
    data = json.loads(out.read_text())
    assert data == {"B": 3.5, "N": 7, "s": [4, 3], "seconds": 0.0}


def test_cli_count_csv_and_points(tmp_path):
    out = tmp_path / "count.csv"
    pts = tmp_path / "points.csv"
    rc = _run(
        [
            "count",
            "--f",
            "x1^2+x2^2+x3^2",
            "--B",
            "3.5",
            "--format",
            "csv",
            "--out",
            str(out),
            "--points",
            str(pts),
        ]
    )
    assert rc == 0
    text = out.read_text()
    assert text.splitlines()[0] == "B,N,seconds"
    assert text.splitlines()[1] == "3.5,7,0"
    lines = pts.read_text().splitlines()
    assert lines[0] == "b,a1,a2,a3,H"
    assert len(lines) == 8  # seven points
    assert lines[1] == "1,-1,0,0,3.46410161514"


def test_cli_scan_fit_roundtrip(tmp_path):
    scan_csv = tmp_path / "scan.csv"
    rc = _run(
        [
            "scan",
            "--f",
            "x1^2+x2^2+x3^2",
            "--grid",
            "100:100000:9",
            "--format",
            "csv",
            "--out",
            str(scan_csv),
            "--threads",
            "2",
        ]
    )
    assert rc == 0
    fit_json = tmp_path / "fit.json"
    rc = _run(["fit", "--scan", str(scan_csv), "--f", "x1^2+x2^2+x3^2", "--out", str(fit_json)])
    assert rc == 0
    fit = json.loads(fit_json.read_text())
    assert 0.2 < fit["theta_hat"] < 0.6


def test_cli_scan_cache_speedup(tmp_path):
    args = [
        "scan",
        "--f",
        "x1^2+x2^2+x3^2",
        "--grid",
        "100:60000:6",
        "--out",
        str(tmp_path / "s1.json"),
    ]
    t0 = time.perf_counter()
    assert _run(args) == 0
    cold = time.perf_counter() - t0
    args[-1] = str(tmp_path / "s2.json")
    t0 = time.perf_counter()
    assert _run(args) == 0
    warm = time.perf_counter() - t0
    assert (tmp_path / "s1.json").read_text() == (tmp_path / "s2.json").read_text()
    assert warm < cold / 10


def test_cli_scan_deterministic_across_threads(tmp_path):
    base = [
        "scan",
        "--f",
        "x1^2+x2^2+x3^2",
        "--grid",
        "10:10000:7",
    ]
    out1 = tmp_path / "t1.csv"
    out8 = tmp_path / "t8.csv"
    assert _run(base + ["--threads", "1", "--format", "csv", "--out", str(out1)]) == 0
    # defeat the cache: different artifact path, same key; force recompute
    assert (
        _run(
            base
            + ["--threads", "8", "--format", "csv", "--out", str(out8), "--no-cache"]
        )
        == 0
    )
    assert out1.read_bytes() == out8.read_bytes()


def test_cli_verify_exit_codes():
    assert _run(["verify", "volumes", "--f", "x1^2+x2^2+x3^2", "--p", "3"]) == 0


def test_cli_ff_count(tmp_path):
    out = tmp_path / "ff.csv"
    rc = _run(
        ["ff-count", "--f", "x1^2+x2^2+x3^2", "--p", "3", "--p", "5", "--format", "csv", "--out", str(out)]
    )
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "p,count,tau_p"
    assert lines[1] == "3,4,8/9"
    assert lines[2] == "5,6,24/25"


def test_cli_usage_error_exit_2():
    assert _run(["count", "--f", "x1^2+x2^3", "--B", "10"]) == 2
    assert _run(["no-such-command"]) == 2


def test_cli_theta_small(tmp_path):
    out = tmp_path / "theta.json"
    cfgp = tmp_path / "cfg.yaml"
    cfg = ExperimentConfig(p_max=100, qmc_samples=2**13, qmc_replicates=4)
    cfg.save(str(cfgp))
    rc = _run(["theta", "--config", str(cfgp), "--out", str(out)])
    assert rc == 0
    data = json.loads(out.read_text())
    assert data["alpha_cone"] == "1/12"
    assert data["brauer"] == 1
    assert data["theta"] > 0
    assert data["local_table"][0][:2] == [2, "9/4"]
    assert data["bad_primes"] == [2]
    # cached rerun is identical
    out2 = tmp_path / "theta2.json"
    assert _run(["theta", "--config", str(cfgp), "--out", str(out2)]) == 0
    assert out.read_bytes() == out2.read_bytes()


def test_cache_env_var_respected(tmp_path, monkeypatch):
    monkeypatch.setenv("MANINLAB_CACHE", str(tmp_path / "envcache"))
    assert DiskCache().directory == str(tmp_path / "envcache")


def test_verify_all_on_shipped_configs():
    # both example configs must pass the full verification battery
    assert _run(["verify", "all", "--config", "configs/reference_conic.yaml"]) == 0
    assert _run(["verify", "all", "--config", "configs/quadric4.yaml"]) == 0

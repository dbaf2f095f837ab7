import csv
import json
from pathlib import Path

import numpy as np
import pytest

from stokes_erosion import cli
from stokes_erosion.cli import ConfigError, RunConfig


def write_config(path, **overrides):
    doc = {
        "mode": "shrink",
        "bodies": [{"center": [0.0, 0.0], "radius": 0.2}],
        "n_inner": 64,
        "n_outer": 128,
        "dt": 2e-4,
        "t_end": 1e-3,
        "snapshot_every": 5,
        "out": str(Path(path).parent / "out"),
    }
    doc.update(overrides)
    with open(path, "w") as fh:
        json.dump(doc, fh)
    return doc


def test_config_defaults_and_validation():
    cfg = RunConfig(bodies=[{"center": [0, 0], "radius": 0.2}], n_inner=256)
    assert cfg.eps == 10.0 / 256
    cfg.validate()
    with pytest.raises(ConfigError):
        RunConfig(bodies=[], n_random=0).validate()
    with pytest.raises(ConfigError):
        RunConfig(bodies=[{"center": [0, 0], "radius": 0.2}], mode="nope").validate()
    with pytest.raises(ConfigError):
        RunConfig(bodies=[{"center": [0, 0], "radius": 0.2}], dt=-1.0).validate()


def test_load_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.json"
    with open(path, "w") as fh:
        json.dump({"mode": "shrink", "typo_key": 1}, fh)
    with pytest.raises(ConfigError):
        cli.load_config(path)


def test_random_packing_is_seeded_and_respects_gaps():
    cfg = RunConfig(bodies=[], n_random=8, seed=3, n_inner=64)
    a = cli.random_packing(cfg)
    b = cli.random_packing(cfg)
    for x, y in zip(a, b):
        assert np.array_equal(x.x_mean, y.x_mean)
        assert x.L == y.L
    centers = np.array([x.x_mean for x in a])
    radii = np.array([x.L / (2 * np.pi) for x in a])
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            gap = np.linalg.norm(centers[i] - centers[j]) - radii[i] - radii[j]
            assert gap >= 0.02 - 1e-12


def test_cli_run_produces_artifacts(tmp_path):
    cfg_path = tmp_path / "run.json"
    write_config(cfg_path)
    assert cli.main(["run", "--config", str(cfg_path)]) == 0
    out = tmp_path / "out"
    assert (out / "checkpoint.json").exists()
    assert (out / "run.json").exists()
    with open(out / "series.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert set(rows[0]) == {
        "t", "U", "FD_x", "FD_y", "FD_pressure_x", "FD_viscous_x", "area_fraction"
    }
    # shrink mode: monotone decreasing solid area fraction
    frac = [float(r["area_fraction"]) for r in rows]
    assert all(a < b for a, b in zip(frac[1:], frac[:-1]))
    snaps = sorted(out.glob("snapshot_*.csv"))
    assert [s.name for s in snaps] == ["snapshot_000000.csv", "snapshot_000005.csv"]


def test_cli_resume_is_bit_identical(tmp_path):
    full_cfg = tmp_path / "full.json"
    write_config(full_cfg, out=str(tmp_path / "full"))
    assert cli.main(["run", "--config", str(full_cfg)]) == 0

    part_cfg = tmp_path / "part.json"
    write_config(part_cfg, t_end=4e-4, out=str(tmp_path / "part"))
    assert cli.main(["run", "--config", str(part_cfg)]) == 0
    resume_cfg = tmp_path / "rest.json"
    write_config(resume_cfg, out=str(tmp_path / "part"))
    assert (
        cli.main(
            ["resume", "--config", str(resume_cfg), str(tmp_path / "part" / "checkpoint.json")]
        )
        == 0
    )

    with open(tmp_path / "full" / "checkpoint.json") as fh:
        a = json.load(fh)
    with open(tmp_path / "part" / "checkpoint.json") as fh:
        b = json.load(fh)
    assert a["bodies"] == b["bodies"]
    assert a["t"] == b["t"]


def test_cli_resume_refuses_dt_change(tmp_path):
    cfg_path = tmp_path / "run.json"
    write_config(cfg_path)
    assert cli.main(["run", "--config", str(cfg_path)]) == 0
    code = cli.main(
        [
            "resume",
            "--config", str(cfg_path),
            "--dt", "1e-4",
            str(tmp_path / "out" / "checkpoint.json"),
        ]
    )
    assert code == cli.EXIT_CONFIG


def test_cli_bad_config_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    with open(path, "w") as fh:
        fh.write("{not json")
    assert cli.main(["run", "--config", str(path)]) == cli.EXIT_CONFIG

    path2 = tmp_path / "bad2.json"
    write_config(path2, mode="warp")
    assert cli.main(["run", "--config", str(path2)]) == cli.EXIT_CONFIG


def test_cli_angles_and_fields(tmp_path):
    cfg_path = tmp_path / "run.json"
    write_config(cfg_path)
    assert cli.main(["run", "--config", str(cfg_path)]) == 0
    out = tmp_path / "out"

    assert cli.main(["angles", "--config", str(cfg_path), str(out)]) == 0
    with open(out / "metrics.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2  # one per snapshot
    assert abs(float(rows[0]["beta_front"]) - 180.0) < 2.0  # initial circle
    assert float(rows[0]["t"]) == 0.0
    assert float(rows[1]["t"]) == pytest.approx(1e-3)

    assert (
        cli.main(
            ["fields", "--config", str(cfg_path), str(out / "checkpoint.json"),
             "--nx", "30", "--ny", "12"]
        )
        == 0
    )
    with open(out / "fields.csv") as fh:
        frows = list(csv.DictReader(fh))
    assert len(frows) == 30 * 12


def test_shape_difference_requires_common_bodies():
    from stokes_erosion import geometry
    from stokes_erosion.evolution import SimulationState

    a = SimulationState(t=0, U=1, bodies=[geometry.circle((0, 0), 0.2, 64)])
    b = SimulationState(t=0, U=1, bodies=[geometry.circle((0, 0), 0.2, 64)])
    assert cli.shape_difference(a, b) == 0.0
    b.bodies[0].alive = False
    with pytest.raises(ConfigError):
        cli.shape_difference(a, b)

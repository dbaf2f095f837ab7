"""Batch driver: configuration, run loop, convergence studies, analysis."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import analysis, bie, evolution, geometry, postprocess, traction
from .bie import SolverError
from .domain import DomainError, make_domain, validate_startup
from .evolution import SimulationState
from .geometry import BodyState, GeometryError

EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

MODES = ("shrink", "fixed_area", "fixed_pressure_drop")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str = "shrink"
    bodies: list = field(default_factory=list)  # [{"center":[x,y],"radius":r}]
    n_inner: int = 128
    n_outer: int = 256
    dt: float = 1e-5
    t_end: float = 1e-3
    eps: float | None = None  # default 10/n_inner
    sigma: float | None = None
    U0: float = 1.0
    gmres_tol: float = 1e-8
    gmres_max_iters: int = 2000
    vanish_radius: float = 0.005
    snapshot_every: int = 50
    out: str = "out"
    seed: int = 0
    n_random: int = 0  # random packing body count (0 = use explicit bodies)
    random_radius: tuple = (0.08, 0.12)
    wall_fillet: float = 0.2
    write_fields: bool = False

    def __post_init__(self):
        if self.eps is None:
            self.eps = 10.0 / self.n_inner
        if self.sigma is None:
            self.sigma = 10.0 / self.n_inner

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        for name in ("n_inner", "n_outer", "snapshot_every"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("dt", "eps", "sigma", "gmres_tol", "vanish_radius", "U0"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.t_end < 0:
            raise ConfigError("t_end must be non-negative")
        if not self.bodies and self.n_random == 0:
            raise ConfigError("no bodies: give `bodies` or `n_random`")


def load_config(path) -> RunConfig:
    with open(path) as fh:
        doc = json.load(fh)
    known = {f for f in RunConfig.__dataclass_fields__}
    extra = set(doc) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    cfg = RunConfig(**doc)
    if isinstance(cfg.random_radius, list):
        cfg.random_radius = tuple(cfg.random_radius)
    return cfg


def build_bodies(cfg: RunConfig) -> list[BodyState]:
    """Initial bodies: explicit circles/point files or a seeded random packing."""
    out = []
    for spec in cfg.bodies:
        if "points_file" in spec:
            pts = np.loadtxt(spec["points_file"], delimiter=",")
            out.append(geometry.encode_curve(pts, n=cfg.n_inner))
        else:
            out.append(
                geometry.circle(spec["center"], spec["radius"], cfg.n_inner)
            )
    if cfg.n_random:
        out.extend(random_packing(cfg))
    return out


def random_packing(cfg: RunConfig) -> list[BodyState]:
    """Rejection-sampled circles in the center third with a minimum gap."""
    rng = np.random.default_rng(cfg.seed)
    placed = [
        (np.asarray(s["center"], float), s["radius"]) for s in cfg.bodies
    ]
    gap = 6.0 * 2.0 * np.pi * max(cfg.random_radius) / cfg.n_inner
    gap = max(gap, 0.02)
    # keep clear of the wall by five wall spacings (plus slack), the same
    # margin validate_startup enforces for body-wall pairs
    _, wall_s = geometry.wall_curve(cfg.n_outer, fillet_radius=cfg.wall_fillet)
    wall_margin = 5.0 * wall_s.h + 0.01
    tries = 0
    while len(placed) < len(cfg.bodies) + cfg.n_random:
        tries += 1
        if tries > 200000:
            raise ConfigError("random packing failed: too many rejections")
        r = rng.uniform(*cfg.random_radius)
        ymax = 1.0 - r - wall_margin
        c = rng.uniform([-1.0 + r + gap, -ymax], [1.0 - r - gap, ymax])
        ok = all(
            np.linalg.norm(c - c2) >= r + r2 + gap for c2, r2 in placed
        )
        if ok:
            placed.append((c, r))
    return [
        geometry.circle(c, r, cfg.n_inner)
        for c, r in placed[len(cfg.bodies) :]
    ]


class FlowDriver:
    """Owns the wall, the solver state, and warm starts across steps."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        _, self.wall = geometry.wall_curve(cfg.n_outer, fillet_radius=cfg.wall_fillet)
        self.channel_area = geometry.enclosed_area(self.wall)
        self.U = cfg.U0
        self._x0 = None
        self.last = None  # (domain, DensitySolution, taus) from the latest solve

    def begin_step(self):
        # warm starts are confined to within one step so that a resumed run
        # reproduces an uninterrupted one bit for bit
        self._x0 = None

    def solve(self, bodies: list[BodyState], cold: bool = False):
        cfg = self.cfg
        dom = make_domain(self.wall, bodies, U=self.U)
        x0 = self._x0 if not cold and self._x0 is not None and self._x0.eta.shape[0] == dom.n_points else None
        sol, info = bie.solve(dom, tol=cfg.gmres_tol, max_iters=cfg.gmres_max_iters, x0=x0)
        if cfg.mode == "fixed_pressure_drop":
            pm, pp = postprocess.averaged_pressures(dom, sol)
            sol, self.U = bie.rescale_fixed_pressure_drop(sol, pm, pp, self.U)
        taus = traction.shear_stress(dom, sol)
        self._x0 = sol
        self.last = (dom, sol, taus)
        return dom, sol, taus

    def __call__(self, bodies: list[BodyState]):
        return self.solve(bodies)[2]


def _series_row(driver: FlowDriver, state: SimulationState):
    dom, sol, _ = driver.last
    if dom.n_bodies:
        rep = postprocess.total_drag(dom, sol)
    else:
        z = np.zeros(2)
        rep = postprocess.DragReport(z, z, z)
    area = sum(
        geometry.enclosed_area(geometry.reconstruct(b)) for b in state.alive
    )
    return [
        state.t,
        driver.U,
        rep.total[0],
        rep.total[1],
        rep.pressure_part[0],
        rep.viscous_part[0],
        area / driver.channel_area,
    ]


def _write_series(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["t", "U", "FD_x", "FD_y", "FD_pressure_x", "FD_viscous_x", "area_fraction"]
        )
        for r in rows:
            w.writerow([repr(float(v)) for v in r])


def _write_snapshot(outdir: Path, step: int, state: SimulationState, taus):
    smps, ids, tlist = [], [], []
    k = 0
    for i, b in enumerate(state.bodies):
        if not b.alive:
            continue
        smps.append(geometry.reconstruct(b))
        ids.append(i)
        tlist.append(taus[k])
        k += 1
    geometry.write_snapshot_csv(
        outdir / f"snapshot_{step:06d}.csv", smps, taus=tlist, body_ids=ids
    )


def run(cfg: RunConfig, state: SimulationState | None = None, step0: int = 0):
    """Main loop: solve, step, handle vanishing, write artifacts."""
    cfg.validate()
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    driver = FlowDriver(cfg)

    if state is None:
        bodies = build_bodies(cfg)
        state = SimulationState(t=0.0, U=cfg.U0, bodies=bodies)
    else:
        driver.U = state.U
    if step0 == 0 and state.alive:
        validate_startup(make_domain(driver.wall, state.alive, U=driver.U))

    n_steps = int(round(cfg.t_end / cfg.dt)) if cfg.t_end > 0 else 0
    series = []
    fixed_area = cfg.mode == "fixed_area"
    step = step0
    try:
        driver.solve(state.alive, cold=True)
        state.U = driver.U
        series.append(_series_row(driver, state))
        _write_snapshot(outdir, step, state, driver.last[2])
        while step < n_steps and state.alive:
            driver.begin_step()
            state = evolution.rk2_step(
                state, cfg.dt, cfg.eps, cfg.sigma, driver, fixed_area=fixed_area
            )
            state = evolution.handle_vanishing(state, cfg.vanish_radius)
            state.U = driver.U
            step += 1
            if step % cfg.snapshot_every == 0 or step == n_steps or not state.alive:
                if state.alive:
                    driver.solve(state.alive, cold=True)
                    state.U = driver.U
                    series.append(_series_row(driver, state))
                    _write_snapshot(outdir, step, state, driver.last[2])
                else:
                    series.append(
                        [state.t, driver.U, 0.0, 0.0, 0.0, 0.0, 0.0]
                    )
    finally:
        _write_series(outdir / "series.csv", series)
        evolution.save_checkpoint(outdir / "checkpoint.json", state)
        with open(outdir / "run.json", "w") as fh:
            json.dump({"config": asdict(cfg), "steps": step}, fh, indent=1)
    if cfg.write_fields and state.alive:
        dom, sol, _ = driver.last
        grid = postprocess.field_grid(dom, sol)
        postprocess.write_field_csv(outdir / "fields.csv", grid)
    return state


def shape_difference(a: SimulationState, b: SimulationState) -> float:
    """Combined L2 difference of all body boundaries (paired by index)."""
    total, count = 0.0, 0
    for ba, bb in zip(a.bodies, b.bodies):
        if not (ba.alive and bb.alive):
            continue
        pa = geometry.reconstruct(ba).points
        pb = geometry.reconstruct(bb).points
        total += float(np.sum((pa - pb) ** 2))
        count += len(pa)
    if count == 0:
        raise ConfigError("no commonly alive bodies to compare")
    return np.sqrt(total / count)


def convergence_study(cfg: RunConfig, refinements: int):
    """Successive dt-halving runs; reports L2 shape differences and orders."""
    states, mismatch = [], []
    for k in range(refinements + 1):
        c = RunConfig(**{**asdict(cfg), "dt": cfg.dt / 2**k,
                         "out": str(Path(cfg.out) / f"dt_{k}")})
        states.append(run(c))
    rows = []
    for k in range(refinements):
        a, b = states[k], states[k + 1]
        flag = ""
        if [x.alive for x in a.bodies] != [x.alive for x in b.bodies]:
            flag = "body-count-mismatch"
            mismatch.append(k)
        err = shape_difference(a, b)
        rows.append([cfg.dt / 2**k, err, flag])
    out = []
    for k, (dt, err, flag) in enumerate(rows):
        order = np.log2(rows[k - 1][1] / err) if k > 0 and err > 0 else float("nan")
        out.append((dt, err, order, flag))
    path = Path(cfg.out) / "convergence.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dt", "l2_shape_difference", "order", "flag"])
        for dt, err, order, flag in out:
            w.writerow([repr(float(dt)), repr(float(err)), repr(float(order)), flag])
    return out


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    run(cfg)
    return 0


def cmd_converge(args) -> int:
    cfg = _config_from_args(args)
    convergence_study(cfg, args.refinements)
    return 0


def cmd_resume(args) -> int:
    cfg = _config_from_args(args)
    state = evolution.load_checkpoint(args.checkpoint)
    manifest = Path(args.checkpoint).parent / "run.json"
    if manifest.exists():
        with open(manifest) as fh:
            recorded = json.load(fh)["config"].get("dt")
        if recorded is not None and recorded != cfg.dt:
            print("resume with changed dt is not supported", file=sys.stderr)
            return EXIT_CONFIG
    k = state.t / cfg.dt
    if abs(k - round(k)) > 1e-6:
        print("checkpoint time is not on the dt grid", file=sys.stderr)
        return EXIT_CONFIG
    run(cfg, state=state, step0=int(round(k)))
    return 0


def cmd_angles(args) -> int:
    """Shape metrics from snapshot CSVs: t,aspect_ratio,beta_front,beta_rear,beta_unc."""
    rows = []
    manifest = Path(args.indir) / "run.json"
    dt = None
    if manifest.exists():
        with open(manifest) as fh:
            dt = json.load(fh)["config"].get("dt")
    for path in sorted(Path(args.indir).glob("snapshot_*.csv")):
        data = {}
        with open(path) as fh:
            for rec in csv.DictReader(fh):
                data.setdefault(int(rec["body_id"]), []).append(
                    (float(rec["x"]), float(rec["y"]), float(rec["tau"]))
                )
        step = float(path.stem.split("_")[1])
        t = step * dt if dt is not None else step
        for bid, pts in data.items():
            arr = np.asarray(pts)
            body = geometry.encode_curve(arr[:, :2])
            tau = arr[:, 2]
            bf, br, unc = analysis.measure_opening_angle(body, tau)
            rows.append(
                [t, analysis.aspect_ratio(body), np.degrees(bf), np.degrees(br), np.degrees(unc)]
            )
    outdir = Path(args.out or args.indir)
    outdir.mkdir(parents=True, exist_ok=True)
    analysis.write_metrics_csv(outdir / "metrics.csv", rows)
    return 0


def cmd_fields(args) -> int:
    cfg = _config_from_args(args)
    state = evolution.load_checkpoint(args.checkpoint)
    driver = FlowDriver(cfg)
    driver.U = state.U
    dom, sol, _ = driver.solve(state.alive)
    grid = postprocess.field_grid(dom, sol, nx=args.nx, ny=args.ny)
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    postprocess.write_field_csv(outdir / "fields.csv", grid)
    return 0


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig(bodies=[])
    for name in ("out", "dt", "mode", "seed"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if getattr(args, "tend", None) is not None:
        cfg.t_end = args.tend
    return cfg


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="stokes-erosion",
        description="Viscous erosion of solid bodies in 2D channel Stokes flow",
    )
    ap.add_argument("--threads", type=int, default=None, help="BLAS thread cap")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--config", default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--tend", type=float, default=None)
        p.add_argument("--mode", choices=MODES, default=None)
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("run", help="run a simulation")
    common(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("converge", help="dt-halving convergence study")
    common(p)
    p.add_argument("--refinements", type=int, default=4)
    p.set_defaults(fn=cmd_converge)

    p = sub.add_parser("resume", help="continue from a checkpoint")
    common(p)
    p.add_argument("checkpoint")
    p.set_defaults(fn=cmd_resume)

    p = sub.add_parser("angles", help="shape metrics from snapshot CSVs")
    common(p)
    p.add_argument("indir")
    p.set_defaults(fn=cmd_angles)

    p = sub.add_parser("fields", help="field grid from a checkpoint")
    common(p)
    p.add_argument("checkpoint")
    p.add_argument("--nx", type=int, default=100)
    p.add_argument("--ny", type=int, default=40)
    p.set_defaults(fn=cmd_fields)

    args = ap.parse_args(argv)
    if args.threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    try:
        return args.fn(args)
    except (ConfigError, GeometryError, DomainError, json.JSONDecodeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

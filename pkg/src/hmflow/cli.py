"""Command-line front end: run flows, fit snapshots, detect collisions.

Subcommands
-----------
simulate          run a flow from a config file, write series/snapshots/verdict
analyze           build the proximity series for a run directory, write reports
fit-bubbles       fit a single snapshot file on one disc
detect-collisions scan a written proximity series for collision episodes
batch             run a manifest of configs with bounded parallelism
make-report       bundle a run's CSVs plus a checksum manifest

Config files are flat structured text, one ``key = value`` per line, keys
dotted at most two levels deep, ``#`` comments.  Keys:

    label, seed, output, gamma0
    domain = radial | cartesian
    grid.r_min grid.r_max grid.ratio grid.h_max grid.k     (radial)
    grid.half_width grid.n                                 (cartesian)
    initial.family = bubble | excess | small | random
    initial.lam initial.amplitude initial.eps initial.modes
    flow.t_final flow.cfl flow.dt_max flow.record_every flow.snapshot_dt
    flow.theta flow.stop_scale_nodes
    analyze.center analyze.mode analyze.fit_every analyze.eps analyze.eta

A batch manifest uses ``width = N`` plus one ``run.<label> = <config path>``
line per run; labels must be unique.

Every text output starts with ``#`` header lines recording the tool
version, the sha256 of the config file and the seed, so identical inputs
give bit-identical outputs.  The default output root is the environment
variable HMFLOW_OUTPUT_ROOT when set.
"""

import argparse
import concurrent.futures
import hashlib
import json
import os
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import __version__
from .bubbles import check_gamma0, default_gamma0
from .collisions import (FOUR_PI, UPPER_BOUND_NOTE, DeltaSeries,
                         build_delta_series, detect_collisions,
                         duration_law_check, quantization_check)
from .errors import ConfigError, HmflowError
from .fields import (Disc, Grid2D, RadialGrid, dirichlet_energy,
                     read_snapshot, write_snapshot)
from .fitting import extract_bubbles, fit_config
from .flow import (FlowParams, TIMESERIES_COLUMNS, initial_bubble_profile,
                   initial_excess_angle, initial_random_smooth,
                   initial_small_radial, run_flow)

ENV_OUTPUT_ROOT = "HMFLOW_OUTPUT_ROOT"

DELTA_CSV_COLUMNS = ("t", "y_x", "y_y", "rho", "M", "d_total", "lambda_max")
QUANT_CSV_COLUMNS = ("t", "rho", "energy", "K_level", "deviation_rel",
                     "resolved")
COLLISION_CSV_COLUMNS = ("sigma", "tau", "y_x", "y_y", "rho", "K_level",
                         "duration", "duration_over_lambdamax_sq")
SUMMARY_CSV_COLUMNS = ("label", "verdict", "t_blowup", "final_E", "K_last")


# ---------------------------------------------------------------------------
# flat config text
# ---------------------------------------------------------------------------


def parse_flat_text(text):
    """Parse ``key = value`` lines into an ordered dict.

    Raises ConfigError with the offending line number for missing '=',
    empty keys, keys nested deeper than two levels, and duplicates.
    """
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key.count(".") > 1:
            raise ConfigError(
                f"line {lineno}: key {key!r} nested deeper than two levels")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def _typed(cfg, key, kind, default=None, required=False):
    if key not in cfg or cfg[key] == "":
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        if kind is bool:
            return cfg[key].lower() in ("1", "true", "yes", "on")
        return kind(cfg[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot read {cfg[key]!r} as "
                          f"{kind.__name__}") from None


def _pair(cfg, key, default):
    if key not in cfg:
        return default
    parts = cfg[key].split(",")
    if len(parts) != 2:
        raise ConfigError(f"key {key!r}: expected 'x,y'")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot read {cfg[key]!r}") from None


@dataclass
class RunConfig:
    """One run: grid, initial data, flow controls and analysis toggles."""

    label: str
    seed: int
    output: str
    domain: str
    grid_spec: dict
    initial: dict
    flow: FlowParams
    gamma0: float            # validated against the initial energy
    initial_energy: float
    analyze_center: tuple = (0.0, 0.0)
    analyze_mode: str = "auto"
    fit_every: int = 1
    eps: float = 0.05
    eta: float = 0.3
    config_sha256: str = ""
    config_text: str = ""

    def build_grid(self):
        g = self.grid_spec
        if self.domain == "radial":
            return RadialGrid.graded(g["r_min"], g["r_max"], g["k"],
                                     ratio=g["ratio"], h_max=g["h_max"])
        return Grid2D.square(g["half_width"], g["n"])

    def build_initial(self):
        grid = self.build_grid()
        fam = self.initial["family"]
        if fam == "bubble":
            return initial_bubble_profile(grid, self.initial["lam"])
        if fam == "excess":
            return initial_excess_angle(grid, self.initial["amplitude"])
        if fam == "small":
            return initial_small_radial(grid, self.initial["eps"])
        if fam == "random":
            return initial_random_smooth(grid, seed=self.seed,
                                         amplitude=self.initial["amplitude"],
                                         modes=self.initial["modes"])
        raise ConfigError(f"unknown initial.family {fam!r}")


def load_run_config(path):
    """Read and validate a config file; computes the initial energy so the
    capture tolerance can be checked at load time."""
    with open(path, "r") as f:
        text = f.read()
    cfg = parse_flat_text(text)
    domain = cfg.get("domain", "radial")
    if domain not in ("radial", "cartesian"):
        raise ConfigError(f"key 'domain': unknown value {domain!r}")
    if domain == "radial":
        grid_spec = {"r_min": _typed(cfg, "grid.r_min", float, required=True),
                     "r_max": _typed(cfg, "grid.r_max", float, required=True),
                     "ratio": _typed(cfg, "grid.ratio", float, 1.05),
                     "h_max": _typed(cfg, "grid.h_max", float, None),
                     "k": _typed(cfg, "grid.k", int, 1)}
    else:
        grid_spec = {"half_width": _typed(cfg, "grid.half_width", float,
                                          required=True),
                     "n": _typed(cfg, "grid.n", int, required=True)}
    fam = cfg.get("initial.family", "bubble")
    initial = {"family": fam,
               "lam": _typed(cfg, "initial.lam", float, 1.0),
               "amplitude": _typed(cfg, "initial.amplitude", float,
                                   np.pi + 0.5 if fam == "excess" else 0.5),
               "eps": _typed(cfg, "initial.eps", float, 0.3),
               "modes": _typed(cfg, "initial.modes", int, 3)}
    flow = FlowParams(
        t_final=_typed(cfg, "flow.t_final", float, 1.0),
        cfl=_typed(cfg, "flow.cfl", float, 0.2),
        dt_max=_typed(cfg, "flow.dt_max", float, 0.02),
        record_every=_typed(cfg, "flow.record_every", int, 1),
        snapshot_dt=_typed(cfg, "flow.snapshot_dt", float, None),
        theta=_typed(cfg, "flow.theta", float, 1.0),
        stop_scale_nodes=_typed(cfg, "flow.stop_scale_nodes", float, 16.0),
    )
    rc = RunConfig(
        label=cfg.get("label", "run"),
        seed=_typed(cfg, "seed", int, 0),
        output=cfg.get("output", ""),
        domain=domain,
        grid_spec=grid_spec,
        initial=initial,
        flow=flow,
        gamma0=np.nan,
        initial_energy=np.nan,
        analyze_center=_pair(cfg, "analyze.center", (0.0, 0.0)),
        analyze_mode=cfg.get("analyze.mode", "auto"),
        fit_every=_typed(cfg, "analyze.fit_every", int, 1),
        eps=_typed(cfg, "analyze.eps", float, 0.05),
        eta=_typed(cfg, "analyze.eta", float, 0.3),
        config_sha256=hashlib.sha256(text.encode()).hexdigest(),
        config_text=text,
    )
    if rc.analyze_mode not in ("auto", "blow-up", "global"):
        raise ConfigError(f"key 'analyze.mode': unknown value "
                          f"{rc.analyze_mode!r}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        f0 = rc.build_initial()
        rc.initial_energy = dirichlet_energy(f0)
    wanted = _typed(cfg, "gamma0", float, None)
    try:
        if wanted is None:
            rc.gamma0 = default_gamma0(rc.initial_energy)
        else:
            rc.gamma0 = check_gamma0(wanted, rc.initial_energy)
    except HmflowError as e:
        raise ConfigError(f"key 'gamma0': {e}") from None
    return rc


# ---------------------------------------------------------------------------
# deterministic writers
# ---------------------------------------------------------------------------


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return "%d" % x
    return "%.17g" % x


def write_csv(path, columns, rows, header):
    """CSV with '# key=value' preamble; floats as %.17g for determinism."""
    lines = ["# %s=%s" % (k, header[k]) for k in header]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def read_csv(path):
    """Inverse of write_csv: (header dict, column names, float array)."""
    header, columns, rows = {}, None, []
    with open(path, "r") as f:
        for line in f:
            line = line.rstrip("\n")
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition("=")
                header[k] = v
            elif columns is None:
                columns = line.split(",")
            elif line:
                rows.append([float(v) for v in line.split(",")])
    data = np.array(rows) if rows else np.zeros((0, len(columns or ())))
    return header, columns or [], data


def _base_header(rc, **extra):
    h = {"version": __version__, "config_sha256": rc.config_sha256,
         "seed": rc.seed}
    h.update(extra)
    return h


def _write_json(path, payload):
    with open(path, "w", newline="\n") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def _sha256_file(path):
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _resolve_out(explicit, rc_output, fallback):
    root = os.environ.get(ENV_OUTPUT_ROOT, "")
    out = explicit or rc_output or fallback
    if root and not os.path.isabs(out):
        out = os.path.join(root, out)
    return out


def cmd_simulate(args):
    rc = load_run_config(args.config)
    out = _resolve_out(args.out, rc.output, rc.label)
    try:
        os.makedirs(os.path.join(out, "snapshots"), exist_ok=True)
        probe = os.path.join(out, ".writable")
        with open(probe, "w") as f:
            f.write("ok")
        os.remove(probe)
    except OSError as e:
        # refuse before running anything so no partial files appear
        print(f"error: output directory {out!r} not writable: {e}",
              file=sys.stderr)
        return 2
    f0 = rc.build_initial()
    series, snaps, verdict = run_flow(f0, rc.flow)
    header = _base_header(rc, label=rc.label)
    with open(os.path.join(out, "config.cfg"), "w", newline="\n") as f:
        f.write(rc.config_text)
    rows = zip(*(series.column(c) for c in TIMESERIES_COLUMNS))
    write_csv(os.path.join(out, "series.csv"), TIMESERIES_COLUMNS, rows,
              header)
    index_rows = []
    for i, (t, fld) in enumerate(snaps):
        name = "snap_%05d.hmhf" % i
        write_snapshot(fld, os.path.join(out, "snapshots", name))
        index_rows.append((i, t))
    write_csv(os.path.join(out, "snapshots", "index.csv"), ("index", "t"),
              index_rows, header)
    E = series.column("E_total")
    _write_json(os.path.join(out, "verdict.json"), {
        "version": __version__, "config_sha256": rc.config_sha256,
        "seed": rc.seed, "label": rc.label, "kind": verdict.kind,
        "t_blowup": _fmt(verdict.t_blowup),
        "concentration_point": [_fmt(v) for v in
                                verdict.concentration_point],
        "records": len(series), "snapshots": len(snaps),
        "final_E": _fmt(float(E[-1])) if E.size else "nan",
        "gamma0": _fmt(rc.gamma0),
        "initial_energy": _fmt(rc.initial_energy)})
    print(f"{rc.label}: {verdict.kind} after {len(series)} records, "
          f"{len(snaps)} snapshots -> {out}")
    return 0


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _load_run_dir(run_dir):
    cfg_path = os.path.join(run_dir, "config.cfg")
    verdict_path = os.path.join(run_dir, "verdict.json")
    index_path = os.path.join(run_dir, "snapshots", "index.csv")
    if not os.path.exists(index_path):
        raise ConfigError(f"{run_dir!r} has no snapshots/index.csv")
    rc = load_run_config(cfg_path)
    with open(verdict_path, "r") as f:
        verdict = json.load(f)
    _, _, idx = read_csv(index_path)
    snaps = []
    for i, t in idx:
        name = os.path.join(run_dir, "snapshots", "snap_%05d.hmhf" % int(i))
        snaps.append((float(t), read_snapshot(name)))
    return rc, verdict, snaps


def _series_rows(series):
    cols = [series.column(c) for c in
            ("t", "rho", "d_total", "lambda_max", "M", "energy", "resolved")]
    y = series.y
    for t, rho, d, lam, M, E, res in zip(*cols):
        yield (t, y[0], y[1], rho, int(M), d, lam), (t, rho, E, res)


def _write_series_reports(out, rc, series, eps, eta):
    mode = series.mode
    common = _base_header(rc, mode=mode, t_plus=_fmt(series.t_plus),
                          y_x=_fmt(series.y[0]), y_y=_fmt(series.y[1]),
                          note=UPPER_BOUND_NOTE)
    delta_rows, quant_rows = [], []
    quant = quantization_check(series)
    for i, (drow, qpart) in enumerate(_series_rows(series)):
        delta_rows.append(drow)
        quant_rows.append((qpart[0], qpart[1], qpart[2], quant.k_levels[i],
                           quant.deviations[i], int(qpart[3])))
    write_csv(os.path.join(out, "delta.csv"), DELTA_CSV_COLUMNS, delta_rows,
              common)
    write_csv(os.path.join(out, "quantization.csv"), QUANT_CSV_COLUMNS,
              quant_rows, common)
    intervals = detect_collisions(series, eps=eps, eta=eta)
    dur = duration_law_check(intervals, series)
    rows = [(e.interval.sigma, e.interval.tau, e.interval.y[0],
             e.interval.y[1], e.interval.rho, e.interval.K_level,
             e.interval.duration, e.ratio) for e in dur.entries]
    write_csv(os.path.join(out, "collisions.csv"), COLLISION_CSV_COLUMNS,
              rows, dict(common, eps=_fmt(eps), eta=_fmt(eta)))
    return len(delta_rows), len(intervals)


def cmd_analyze(args):
    rc, verdict, snaps = _load_run_dir(args.run_dir)
    mode = args.mode or rc.analyze_mode
    if mode == "auto":
        mode = "blow-up" if verdict["kind"] == "blow-up-detected" else "global"
    t_plus = float(verdict["t_blowup"]) if mode == "blow-up" else None
    y = _pair({"c": args.center}, "c", None) if args.center else \
        rc.analyze_center
    snaps = snaps[::max(rc.fit_every, 1)] if rc.fit_every > 1 else snaps
    if mode == "blow-up":
        snaps = [sf for sf in snaps if sf[0] < t_plus]
    if args.last > 0:
        snaps = snaps[-args.last:]
    series = build_delta_series(snaps, y, mode, t_plus=t_plus,
                                gamma0=rc.gamma0)
    n, hits = _write_series_reports(args.run_dir, rc, series, rc.eps, rc.eta)
    print(f"{rc.label}: {n} records analyzed, {hits} collision intervals "
          f"-> {args.run_dir}")
    return 0


# ---------------------------------------------------------------------------
# fit a single snapshot
# ---------------------------------------------------------------------------


def _fit_report_lines(t, y, rho, outcome):
    config, radii, report = outcome
    lines = [f"t = {_fmt(t)}",
             f"y = {_fmt(y[0])},{_fmt(y[1])}",
             f"rho = {_fmt(rho)}",
             f"M = {config.M}",
             "omega = " + ",".join(_fmt(v) for v in config.omega_inf)]
    for j, b in enumerate(config.bubbles):
        deg = abs(b.map.signed_degree)
        lines += [f"bubble.{j}.degree = {deg}",
                  f"bubble.{j}.center = {_fmt(b.center[0])},"
                  f"{_fmt(b.center[1])}",
                  f"bubble.{j}.scale = {_fmt(b.scale)}",
                  f"bubble.{j}.orientation = {b.orientation}"]
    lines += [f"radii.nu = {_fmt(radii.nu)}", f"radii.xi = {_fmt(radii.xi)}",
              "radii.nu_j = " + ",".join(_fmt(v) for v in radii.nu_j),
              "radii.xi_j = " + ",".join(_fmt(v) for v in radii.xi_j)]
    names = ("energy_mismatch", "bubble_sup", "neck_sup", "neck_energy",
             "radii_ratio", "separation", "containment", "nested_exclusion")
    for name in names:
        lines.append(f"d.{name} = {_fmt(getattr(report, name))}")
    lines += [f"d.total = {_fmt(report.total)}",
              f"converged = {1 if outcome.converged else 0}"]
    return lines


def cmd_fit_bubbles(args):
    fld = read_snapshot(args.snapshot)
    y = _pair({"c": args.center}, "c", (0.0, 0.0))
    disc = Disc(y, args.radius)
    seeds = extract_bubbles(fld, disc)
    outcome = fit_config(fld, disc, seeds, gamma0=args.gamma0)
    header = {"version": __version__,
              "config_sha256": _sha256_file(args.snapshot),
              "seed": args.seed, "note": UPPER_BOUND_NOTE}
    out = args.out or os.path.dirname(os.path.abspath(args.snapshot))
    os.makedirs(out, exist_ok=True)
    report_path = os.path.join(out, "fit_report.txt")
    body = _fit_report_lines(args.t, y, args.radius, outcome)
    with open(report_path, "w", newline="\n") as f:
        f.write("\n".join("# %s=%s" % (k, v) for k, v in header.items()))
        f.write("\n" + "\n".join(body) + "\n")
    csv_path = os.path.join(out, "fits.csv")
    scales = [b.scale for b in outcome.config.bubbles]
    row = (args.t, y[0], y[1], args.radius, outcome.config.M,
           outcome.report.total, max(scales) if scales else 0.0)
    if os.path.exists(csv_path):
        with open(csv_path, "a", newline="\n") as f:
            f.write(",".join(_fmt(v) for v in row) + "\n")
    else:
        write_csv(csv_path, DELTA_CSV_COLUMNS, [row], header)
    print(f"M = {outcome.config.M}, d_total = {outcome.report.total:.6g} "
          f"-> {report_path}")
    return 0


# ---------------------------------------------------------------------------
# detect collisions from written reports
# ---------------------------------------------------------------------------


def cmd_detect_collisions(args):
    dheader, _, ddata = read_csv(os.path.join(args.run_dir, "delta.csv"))
    _, _, qdata = read_csv(os.path.join(args.run_dir, "quantization.csv"))
    if ddata.shape[0] != qdata.shape[0]:
        raise ConfigError("delta.csv and quantization.csv disagree on rows")
    mode = dheader.get("mode", "global")
    series = DeltaSeries((float(dheader["y_x"]), float(dheader["y_y"])),
                         mode, float(dheader.get("t_plus", "nan")))
    for drow, qrow in zip(ddata, qdata):
        series.append(t=drow[0], rho=drow[3], d_total=drow[5],
                      lambda_max=drow[6], M=drow[4], energy=qrow[2],
                      resolved=qrow[5])
    intervals = detect_collisions(series, eps=args.eps, eta=args.eta)
    dur = duration_law_check(intervals, series)
    rows = [(e.interval.sigma, e.interval.tau, e.interval.y[0],
             e.interval.y[1], e.interval.rho, e.interval.K_level,
             e.interval.duration, e.ratio) for e in dur.entries]
    header = dict(dheader, eps=_fmt(args.eps), eta=_fmt(args.eta),
                  note=UPPER_BOUND_NOTE)
    write_csv(os.path.join(args.run_dir, "collisions.csv"),
              COLLISION_CSV_COLUMNS, rows, header)
    print(f"{len(rows)} collision intervals -> "
          f"{os.path.join(args.run_dir, 'collisions.csv')}")
    return 0


# ---------------------------------------------------------------------------
# batch
# ---------------------------------------------------------------------------


def load_manifest(path):
    with open(path, "r") as f:
        cfg = parse_flat_text(f.read())
    width = _typed(cfg, "width", int, 1)
    if width < 1:
        raise ConfigError("key 'width': must be >= 1")
    runs = [(k[len("run."):], v) for k, v in cfg.items()
            if k.startswith("run.")]
    if not runs:
        raise ConfigError("manifest has no 'run.<label> = <config>' lines")
    return width, runs


def _batch_child(label, cfg_path, out_dir):
    ns = argparse.Namespace(config=cfg_path, out=out_dir)
    try:
        code = cmd_simulate(ns)
        if code != 0:
            return label, {"verdict": "failed: output not writable"}
        with open(os.path.join(out_dir, "verdict.json"), "r") as f:
            v = json.load(f)
        K = int(round(float(v["final_E"]) / FOUR_PI))
        return label, {"verdict": v["kind"], "t_blowup": v["t_blowup"],
                       "final_E": v["final_E"], "K_last": K}
    except (HmflowError, OSError, ValueError) as e:
        return label, {"verdict": f"failed: {e}"}


def cmd_batch(args):
    width, runs = load_manifest(args.manifest)
    out_root = _resolve_out(args.out, "",
                            os.path.splitext(os.path.basename(
                                args.manifest))[0])
    os.makedirs(out_root, exist_ok=True)
    jobs = [(label, cfg, os.path.join(out_root, label))
            for label, cfg in runs]
    if width == 1:
        results = [_batch_child(*j) for j in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=width) as ex:
            results = list(ex.map(_batch_child, *zip(*jobs)))
    results.sort(key=lambda lv: lv[0])
    rows = []
    failures = 0
    for label, v in results:
        ok = not v["verdict"].startswith("failed")
        failures += 0 if ok else 1
        rows.append((label, v["verdict"],
                     float(v.get("t_blowup", "nan")) if ok else np.nan,
                     float(v.get("final_E", "nan")) if ok else np.nan,
                     v.get("K_last", -1) if ok else -1))
        print(f"{label}: {v['verdict']}")
    header = {"version": __version__,
              "config_sha256": _sha256_file(args.manifest), "seed": "batch"}
    write_csv(os.path.join(out_root, "summary.csv"), SUMMARY_CSV_COLUMNS,
              rows, header)
    return 0 if failures < len(results) else 1


# ---------------------------------------------------------------------------
# make-report
# ---------------------------------------------------------------------------


def cmd_make_report(args):
    names = [n for n in sorted(os.listdir(args.run_dir))
             if n.endswith(".csv") or n == "verdict.json"]
    if not any(n.endswith(".csv") for n in names):
        raise ConfigError(f"{args.run_dir!r} has no CSV outputs to bundle")
    out = args.out or os.path.join(args.run_dir, "report")
    os.makedirs(out, exist_ok=True)
    checksums = {}
    for n in names:
        src = os.path.join(args.run_dir, n)
        with open(src, "rb") as f:
            blob = f.read()
        with open(os.path.join(out, n), "wb") as f:
            f.write(blob)
        checksums[n] = hashlib.sha256(blob).hexdigest()
    meta = {"version": __version__, "files": checksums,
            "note": UPPER_BOUND_NOTE}
    verdict_path = os.path.join(args.run_dir, "verdict.json")
    if os.path.exists(verdict_path):
        with open(verdict_path, "r") as f:
            v = json.load(f)
        meta["config_sha256"] = v.get("config_sha256", "")
        meta["seed"] = v.get("seed", 0)
    _write_json(os.path.join(out, "report.json"), meta)
    print(f"{len(checksums)} files bundled -> {out}")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(
        prog="hmflow",
        description="harmonic map heat flow: simulate, fit, analyze")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a flow from a config file")
    s.add_argument("config")
    s.add_argument("--out", default="", help="output directory")
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("analyze", help="proximity series for a run directory")
    a.add_argument("run_dir")
    a.add_argument("--mode", choices=("blow-up", "global"), default="")
    a.add_argument("--center", default="", help="disc center 'x,y'")
    a.add_argument("--last", type=int, default=0,
                   help="only fit the final N snapshots")
    a.set_defaults(func=cmd_analyze)

    fb = sub.add_parser("fit-bubbles", help="fit one snapshot on one disc")
    fb.add_argument("snapshot")
    fb.add_argument("--center", default="0,0")
    fb.add_argument("--radius", type=float, required=True)
    fb.add_argument("--t", type=float, default=np.nan)
    fb.add_argument("--gamma0", type=float, default=None)
    fb.add_argument("--seed", type=int, default=0)
    fb.add_argument("--out", default="")
    fb.set_defaults(func=cmd_fit_bubbles)

    dc = sub.add_parser("detect-collisions",
                        help="scan written delta/quantization CSVs")
    dc.add_argument("run_dir")
    dc.add_argument("--eps", type=float, default=0.05)
    dc.add_argument("--eta", type=float, default=0.3)
    dc.set_defaults(func=cmd_detect_collisions)

    b = sub.add_parser("batch", help="run a manifest of configs")
    b.add_argument("manifest")
    b.add_argument("--out", default="")
    b.set_defaults(func=cmd_batch)

    mr = sub.add_parser("make-report", help="bundle CSVs with checksums")
    mr.add_argument("run_dir")
    mr.add_argument("--out", default="")
    mr.set_defaults(func=cmd_make_report)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HmflowError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

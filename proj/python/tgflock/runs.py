"""Reader for run directories written by the scenario runner.

Plotting code consumes runs only through this module: every figure id maps
to the files it needs, and a missing or empty input raises MissingInput
instead of producing an empty figure.
"""

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

FIGURE_IDS = ("fig3a", "fig3b", "fig3c", "sec53a", "sec53b", "heatmaps", "snapshots")


class MissingInput(Exception):
    pass


class ParseError(Exception):
    pass


def _read(path):
    path = Path(path)
    if not path.is_file():
        raise MissingInput(f"{path} does not exist")
    return path.read_text()


def load_manifest(run_dir, verify=True):
    run_dir = Path(run_dir)
    try:
        manifest = json.loads(_read(run_dir / "manifest.json"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"manifest.json: {exc}") from exc
    if verify:
        for entry in manifest["files"]:
            data = (run_dir / entry["path"]).read_bytes() if (run_dir / entry["path"]).is_file() else None
            if data is None:
                raise MissingInput(f"{entry['path']} listed in the manifest is missing")
            if hashlib.sha256(data).hexdigest() != entry["sha256"]:
                raise ParseError(f"{entry['path']} does not match its recorded digest")
    return manifest


def load_summary(run_dir):
    try:
        return json.loads(_read(Path(run_dir) / "summary.json"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"summary.json: {exc}") from exc


def read_series(path):
    """(t, value) columns of a metric CSV."""
    rows = list(csv.reader(_read(path).splitlines()))
    if not rows or rows[0] != ["t", "value"]:
        raise ParseError(f"{path}: expected header t,value")
    if len(rows) < 2:
        raise MissingInput(f"{path}: series is empty")
    try:
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return data[:, 0], data[:, 1]


def read_matrix(path):
    rows = [r for r in csv.reader(_read(path).splitlines()) if r]
    if not rows:
        raise MissingInput(f"{path}: matrix is empty")
    try:
        m = np.array([[float(x) for x in r] for r in rows])
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return m


def read_angles(path):
    """Per-agent velocity polar angles in degrees."""
    table = read_table(path)
    if list(table) != ["agent", "angle_deg"]:
        raise ParseError(f"{path}: expected header agent,angle_deg")
    try:
        return np.array([float(a) for a in table["angle_deg"]])
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def read_table(path):
    """Header-keyed columns of a CSV such as sweep.csv or twobody.csv."""
    rows = list(csv.DictReader(_read(path).splitlines()))
    if not rows:
        raise MissingInput(f"{path}: table is empty")
    return {k: [r[k] for r in rows] for k in rows[0]}


def _label(x):
    # Same spelling as the runner's shortest round-trip formatting.
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def _family(run_dir, config):
    params = config["params"]
    metric = params.get("metric", "diameter")
    out = {}
    for entry in params["series"]:
        name = entry["name"]
        out[name] = read_series(run_dir / f"{name}_{metric}.csv")
        if "envelope" in params and params["envelope"].get("kind"):
            out[f"{name}_envelope"] = read_series(run_dir / f"{name}_envelope.csv")
    return out


def _snapshots(run_dir, config):
    out = {}
    seed = config["seed"]
    for variant in config["params"].get("variants", []):
        label = f"{variant['label']}_s{seed}"
        for t in variant.get("snapshot_times", []):
            out[f"{label}_angles_t{_label(t)}"] = read_angles(run_dir / f"{label}_angles_t{_label(t)}.csv")
        for t in variant.get("kappa_times", []):
            out[f"{label}_kappa_t{_label(t)}"] = read_matrix(run_dir / f"{label}_kappa_t{_label(t)}.csv")
        for t in variant.get("distance_times", []):
            out[f"{label}_distance_t{_label(t)}"] = read_matrix(run_dir / f"{label}_distance_t{_label(t)}.csv")
    if not out:
        raise MissingInput("run has no snapshot outputs")
    return out


def figure_inputs(figure_id, run_dir):
    """Parsed inputs for one figure id; raises MissingInput or ParseError."""
    if figure_id not in FIGURE_IDS:
        raise ValueError(f"unknown figure id {figure_id!r}")
    run_dir = Path(run_dir)
    config = load_manifest(run_dir, verify=False)["config"]
    if figure_id in ("fig3a", "fig3b", "fig3c"):
        return _family(run_dir, config)
    if figure_id == "sec53a":
        return {"sweep": read_table(run_dir / "sweep.csv")}
    if figure_id == "sec53b":
        radii = config["params"]["radii"]
        return {f"d{_label(d)}": read_series(run_dir / f"d{_label(d)}_velocity_deviation.csv") for d in radii}
    if figure_id == "heatmaps":
        radii = config["params"].get("heatmap_radii", [])
        if not radii:
            raise MissingInput("run was not configured with heatmap radii")
        return {f"d{_label(d)}": read_matrix(run_dir / f"d{_label(d)}_psi_a.csv") for d in radii}
    return _snapshots(run_dir, config)

"""Configuration parsing and deterministic file writers.

Configs are JSON with three sections::

    {"model": {...}, "contact": {...}, "simulation": {...}}

``model`` is required and takes either ``i_cover`` or ``m_cover`` (mapped
through the hinged-rod inertia). ``contact`` and ``simulation`` fields fall
back to their defaults. Unknown keys are rejected.

Floats are always written with 17 significant digits so files round-trip
exactly and are byte-identical across runs and platforms.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import EnergyReport, OscillationMetrics
from .errors import ConfigError, InvariantError
from .integrator import EventKind, SimConfig, SimMode, Trajectory
from .model import ContactMode, ContactParams, ModelParams, mass_to_inertia
from .sweep import SweepResult

TRAJECTORY_COLUMNS = ("t", "x_ball", "v_ball", "theta", "omega", "x_cover", "gap",
                      "f_out", "ke_ball", "ke_cover")
EVENT_COLUMNS = ("t", "kind", "x_ball", "v_ball", "theta", "omega", "energy_transferred")

MODEL_KEYS = ("m_ball", "k_ball", "c_ball", "i_cover", "m_cover", "k_cover", "c_cover",
              "f_in", "s_d", "x_size", "h", "l_cover")
CONTACT_KEYS = ("mode", "k_contact", "c_contact", "restitution")
SIM_KEYS = ("dt", "t_end", "event_tol", "max_event_iters", "sample_stride", "mode")
SECTIONS = {"model": MODEL_KEYS, "contact": CONTACT_KEYS, "simulation": SIM_KEYS}


def fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % (value + 0.0)  # folds -0.0 into 0
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def _number(section, key, value, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key}: expected a number, got {value!r}", key=key)
    if integer:
        if int(value) != value:
            raise ConfigError(f"{section}.{key}: expected an integer", key=key)
        return int(value)
    return float(value)


def _section(doc, name, required):
    body = doc.get(name)
    if body is None:
        if required:
            raise ConfigError(f"missing section {name!r}", key=name)
        return {}
    if not isinstance(body, dict):
        raise ConfigError(f"section {name!r} must be an object", key=name)
    for key in body:
        if key not in SECTIONS[name]:
            raise ConfigError(f"unknown key {key!r} in section {name!r}", key=key)
    return body


def config_from_dict(doc: dict) -> tuple[ModelParams, SimConfig]:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    for key in doc:
        if key not in SECTIONS:
            raise ConfigError(f"unknown top-level key {key!r}", key=key)
    model = _section(doc, "model", required=True)
    contact = _section(doc, "contact", required=False)
    sim = _section(doc, "simulation", required=False)

    if ("i_cover" in model) == ("m_cover" in model):
        raise ConfigError("model needs exactly one of 'i_cover' or 'm_cover'", key="i_cover")
    values = {}
    for key in MODEL_KEYS:
        if key in ("i_cover", "m_cover"):
            continue
        if key not in model:
            raise ConfigError(f"missing key {key!r} in section 'model'", key=key)
        values[key] = _number("model", key, model[key])
    if "i_cover" in model:
        values["i_cover"] = _number("model", "i_cover", model["i_cover"])
    else:
        values["i_cover"] = mass_to_inertia(_number("model", "m_cover", model["m_cover"]),
                                            values["l_cover"])

    contact_kwargs = {}
    for key, value in contact.items():
        if key == "mode":
            try:
                contact_kwargs[key] = ContactMode(value)
            except ValueError:
                raise ConfigError(f"contact.mode: expected 'penalty' or 'impulse', got {value!r}",
                                  key=key) from None
        else:
            contact_kwargs[key] = _number("contact", key, value)

    sim_kwargs = {}
    for key, value in sim.items():
        if key == "mode":
            try:
                sim_kwargs[key] = SimMode(value)
            except ValueError:
                raise ConfigError(f"simulation.mode: expected 'covered' or 'uncovered', got {value!r}",
                                  key=key) from None
        else:
            sim_kwargs[key] = _number("simulation", key, value,
                                      integer=key in ("max_event_iters", "sample_stride"))

    params = ModelParams(**values, contact=ContactParams(**contact_kwargs))
    return params, SimConfig(**sim_kwargs)


def parse_config(path) -> tuple[ModelParams, SimConfig]:
    """Read and validate a JSON config file.

    Raises ``ConfigError`` for a missing file or schema problems (naming the
    key, or the line for JSON syntax errors) and ``InvariantError`` for values
    outside their allowed range.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}", line=exc.lineno) from None
    return config_from_dict(doc)


def config_to_dict(params: ModelParams, config: SimConfig) -> dict:
    model = {k: getattr(params, k) for k in MODEL_KEYS if k != "m_cover"}
    contact = {"mode": params.contact.mode.value, "k_contact": params.contact.k_contact,
               "c_contact": params.contact.c_contact,
               "restitution": params.contact.restitution}
    sim = {"dt": config.dt, "t_end": config.t_end, "event_tol": config.event_tol,
           "max_event_iters": int(config.max_event_iters),
           "sample_stride": int(config.sample_stride), "mode": config.mode.value}
    return {"model": model, "contact": contact, "simulation": sim}


def write_config(params: ModelParams, config: SimConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(params, config), indent=2) + "\n",
                          encoding="utf-8")


def reference_config_path() -> Path:
    return Path(str(resources.files("hipo_sim") / "data" / "reference.json"))


def reference_box_path() -> Path:
    return Path(str(resources.files("hipo_sim") / "data" / "reference_box.json"))


def load_reference() -> tuple[ModelParams, SimConfig]:
    """The frozen reference parameter set and its simulation settings."""
    return parse_config(reference_config_path())


def parse_box(path) -> tuple[dict, int, bool]:
    """Read a scan box: ``{"name": [low, high], ..., "resolution": n, "log": bool}``."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"box file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}", line=exc.lineno) from None
    resolution = int(doc.pop("resolution", 3))
    log = bool(doc.pop("log", False))
    box = {}
    allowed = set(MODEL_KEYS) | {"k_contact", "c_contact", "restitution"}
    for key, rng in doc.items():
        if key not in allowed:
            raise ConfigError(f"unknown box parameter {key!r}", key=key)
        if not (isinstance(rng, list) and len(rng) == 2):
            raise ConfigError(f"box range for {key!r} must be [low, high]", key=key)
        lo, hi = (_number("box", key, v) for v in rng)
        if hi < lo:
            raise InvariantError(key, "box range needs low <= high")
        box[key] = (lo, hi)
    if not box:
        raise ConfigError("box is empty")
    return box, resolution, log


def config_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    tool_version: str = __version__
    config_hash: str = ""
    command_line: str = ""
    wall_clock_s: float = 0.0
    outputs: list = field(default_factory=list)

    def stable_items(self) -> dict:
        """Manifest fields that do not vary between identical runs."""
        return {"manifest.tool_version": self.tool_version,
                "manifest.config_hash": self.config_hash,
                "manifest.command_line": self.command_line,
                "manifest.outputs": ";".join(sorted(self.outputs))}

    def write(self, path) -> None:
        items = dict(self.stable_items())
        items["manifest.wall_clock_s"] = self.wall_clock_s
        _write_kv(items, path)


def events_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".events.csv")


def _write_rows(path, header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def write_trajectory_csv(trajectory: Trajectory, path) -> None:
    """Write samples to ``path`` and events to the sibling ``<name>.events.csv``."""
    tr = trajectory
    if len(tr):
        cols = np.column_stack([tr.t, tr.x_ball, tr.v_ball, tr.theta, tr.omega,
                                tr.x_cover, tr.gap, tr.f_out, tr.ke_ball, tr.ke_cover])
        rows = cols.tolist()
    else:
        rows = []
    _write_rows(path, TRAJECTORY_COLUMNS, rows)
    ev_rows = [(e.t_event, e.kind.value, e.state_at_event.x_ball, e.state_at_event.v_ball,
                e.state_at_event.theta, e.state_at_event.omega, e.energy_transferred)
               for e in tr.events]
    _write_rows(events_path(path), EVENT_COLUMNS, ev_rows)


def read_trajectory_csv(path) -> tuple[dict, list]:
    """Read columns written by ``write_trajectory_csv``.

    Returns ``(columns, events)``; ``events`` is a list of dicts and is empty
    when no sibling events file exists.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    if tuple(header) != TRAJECTORY_COLUMNS:
        raise ConfigError(f"{path}: unexpected trajectory header {header}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    columns = {name: data[:, i] if data.size else np.empty(0)
               for i, name in enumerate(TRAJECTORY_COLUMNS)}
    events = []
    ev_path = events_path(path)
    if ev_path.exists():
        with open(ev_path, encoding="utf-8") as fh:
            fh.readline()
            for line in fh:
                parts = line.strip().split(",")
                if len(parts) != len(EVENT_COLUMNS):
                    continue
                row = {k: float(v) for k, v in zip(EVENT_COLUMNS, parts) if k != "kind"}
                row["kind"] = EventKind(parts[1])
                events.append(row)
    return columns, events


def _flatten(obj, prefix=""):
    if dataclasses.is_dataclass(obj):
        obj = {f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)}
    items = {}
    for key, value in obj.items():
        name = f"{prefix}{key}"
        if dataclasses.is_dataclass(value) or isinstance(value, dict):
            items.update(_flatten(value, name + "."))
        else:
            items[name] = value
    return items


def summary_items(obj) -> dict:
    """Flat key/value view of metrics, sweep results or energy reports."""
    if isinstance(obj, OscillationMetrics):
        return _flatten(obj)
    if isinstance(obj, SweepResult):
        spec = obj.spec
        items = {"sweep.parameter": spec.parameter, "sweep.n_points": len(obj.points),
                 "sweep.transient_fraction": spec.transient_fraction}
        width = max(3, len(str(len(obj.points) - 1)))
        for p in obj.points:
            block = f"point.{p.index:0{width}d}."
            items[block + "value"] = p.value
            items[block + "failure"] = p.failure
            items[block + "last_good_time"] = p.last_good_time
            items.update(_flatten(p.metrics, block))
        return items
    if isinstance(obj, EnergyReport):
        items = {"energy.method": obj.method, "energy.max_abs_residual": obj.max_residual}
        for name in ("ke_ball", "ke_cover", "pe_ball", "pe_cover", "pe_contact", "work_in",
                     "work_in_gross", "work_out", "diss_ball", "diss_cover", "diss_contact",
                     "diss_impact", "cover_received", "residual"):
            series = getattr(obj, name)
            items[f"energy.final.{name}"] = float(series[-1]) if len(series) else None
        return items
    if isinstance(obj, dict):
        return _flatten(obj)
    raise TypeError(f"cannot summarise {type(obj).__name__}")


def _write_kv(items, path):
    lines = [f"{k}={fmt(v)}" for k, v in sorted(items.items())]
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def write_summary(obj, path, manifest: RunManifest | None = None, extra: dict | None = None) -> None:
    """Sorted ``key=value`` report, one entry per line, UTF-8.

    ``obj`` may be metrics, a sweep result, an energy report, a plain dict, or
    a list of those (merged). Run-to-run varying manifest fields (wall-clock
    time) are left out so the file is diff-stable.
    """
    items = {}
    for part in obj if isinstance(obj, (list, tuple)) else [obj]:
        items.update(summary_items(part))
    if extra:
        items.update(extra)
    if manifest is not None:
        items.update(manifest.stable_items())
    _write_kv(items, path)


def _float_or_none(text):
    if text == "none":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        value = float(text)
    except ValueError:
        return text
    return int(value) if text.lstrip("-").isdigit() else value


def read_summary(path) -> dict:
    items = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            key, _, value = line.partition("=")
            items[key] = _float_or_none(value)
    return items


def finite_or_none(x):
    return x if x is not None and math.isfinite(x) else None

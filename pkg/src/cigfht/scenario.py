"""Scenario files: flat ``key = value`` documents with ``[section]`` headers.

Keys are addressed with dots (``drift.kind``); a key may be written either
inside its section or fully dotted at top level::

    name = fig3

    [drift]
    kind = sinusoidal
    A = 2.0
    omega = 6.283185307179586

    [sim]
    t_max = 5.0

Anything not given falls back to the standard channel: ``x0 = 0``,
``ell = 5``, ``sigma2 = 2``, ``v0 = 1``, 10^5 trajectories, ``dt = 1e-3``,
seed 42.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .density import ChannelParams, FluxDistance, PrefactorMode
from .drift import DriftKind, DriftProfile
from .simulate import SimConfig
from .validation import ConfigError

__all__ = [
    "Scenario",
    "ScenarioError",
    "parse_scenario",
    "serialize_scenario",
    "scenario_from_dict",
    "load_scenario",
    "scenario_to_dict",
    "with_override",
    "FIXTURES",
]

FIXTURES = ("baseline", "fig3", "fig4")

_NAME_RE = re.compile(r"^[A-Za-z0-9_.-]+$")

_DEFAULTS = {
    "channel.x0": 0.0,
    "channel.ell": 5.0,
    "channel.sigma2": 2.0,
    "drift.v0": 1.0,
    "model.mode": "instantaneous",
    "model.flux_distance": "boundary",
    "sim.n_trajectories": 100_000,
    "sim.dt": 1e-3,
    "sim.t_max": 5.0,
    "sim.seed": 42,
    "output.grid": 10_000,
    "output.bins": 200,
}

_FLOAT_KEYS = {
    "channel.x0", "channel.ell", "channel.sigma2",
    "drift.v0", "drift.A", "drift.omega", "drift.t_switch",
    "sim.dt", "sim.t_max",
}
_INT_KEYS = {"sim.n_trajectories", "sim.seed", "output.grid", "output.bins"}
_STR_KEYS = {"name", "drift.kind", "model.mode", "model.flux_distance", "drift.table"}
_KNOWN = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS

_KIND_KEYS = {
    DriftKind.CONSTANT: set(),
    DriftKind.SINUSOIDAL: {"drift.A", "drift.omega"},
    DriftKind.STEP: {"drift.A", "drift.t_switch"},
    DriftKind.TABULATED: {"drift.table"},
}


class ScenarioError(ConfigError):
    def __init__(self, message, key=None, line=None):
        where = []
        if key:
            where.append(f"key {key!r}")
        if line:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class Scenario:
    name: str
    params: ChannelParams
    profile: DriftProfile
    mode: PrefactorMode
    flux_distance: FluxDistance
    sim: SimConfig
    grid: int
    bins: int

    @property
    def t_max(self):
        return self.sim.t_max


def _read_document(text):
    """Flatten the document into ``{dotted_key: (raw_value, line_no)}``."""
    entries = {}
    section = ""
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or not line[1:-1].strip():
                raise ScenarioError("malformed section header", line=no)
            section = line[1:-1].strip()
            continue
        if "=" not in line:
            raise ScenarioError("expected 'key = value'", line=no)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ScenarioError("empty key", line=no)
        full = key if "." in key or not section else f"{section}.{key}"
        if full in entries:
            raise ScenarioError("duplicate key", key=full, line=no)
        entries[full] = (value, no)
    return entries


def _coerce(key, value, line):
    if key in _FLOAT_KEYS:
        try:
            out = float(value)
        except ValueError:
            raise ScenarioError(f"not a number: {value!r}", key, line) from None
        if not math.isfinite(out):
            raise ScenarioError("value must be finite", key, line)
        return out
    if key in _INT_KEYS:
        text = str(value).strip()
        try:
            return int(text)
        except ValueError:
            pass
        # accept integral floats such as 1e5
        try:
            out = float(text)
        except ValueError:
            raise ScenarioError(f"not an integer: {value!r}", key, line) from None
        if not math.isfinite(out) or out != int(out):
            raise ScenarioError(f"not an integer: {value!r}", key, line)
        return int(out)
    return value


def _parse_table(value, line):
    pairs = []
    for item in str(value).split(","):
        item = item.strip()
        if not item:
            continue
        if ":" not in item:
            raise ScenarioError(f"table entry {item!r} is not 't:v'", "drift.table", line)
        t, v = item.split(":", 1)
        try:
            pairs.append((float(t), float(v)))
        except ValueError:
            raise ScenarioError(f"table entry {item!r} is not numeric", "drift.table", line) from None
    return tuple(pairs)


def scenario_from_dict(values, lines=None):
    """Build a validated :class:`Scenario` from flat dotted keys."""
    lines = lines or {}
    for key in values:
        if key not in _KNOWN:
            raise ScenarioError("unknown key", key, lines.get(key))
    merged = dict(_DEFAULTS)
    for key, value in values.items():
        merged[key] = _coerce(key, value, lines.get(key))

    name = merged.get("name")
    if not name:
        raise ScenarioError("missing scenario name", "name")
    if not _NAME_RE.match(str(name)):
        raise ScenarioError("name must be filesystem-safe ([A-Za-z0-9_.-])", "name", lines.get("name"))

    if "drift.kind" not in merged:
        raise ScenarioError("missing drift kind", "drift.kind")
    try:
        kind = DriftKind(str(merged["drift.kind"]).lower())
    except ValueError:
        raise ScenarioError(f"unknown drift kind {merged['drift.kind']!r}", "drift.kind",
                            lines.get("drift.kind")) from None
    needed = _KIND_KEYS[kind]
    for key in sorted(needed):
        if key not in merged:
            raise ScenarioError(f"{kind.value} drift requires this key", key)
    for key in sorted(_KIND_KEYS[DriftKind.SINUSOIDAL] | _KIND_KEYS[DriftKind.STEP] | {"drift.table"}):
        if key in values and key not in needed:
            raise ScenarioError(f"key does not apply to {kind.value} drift", key, lines.get(key))

    def build(factory, key_for_errors):
        try:
            return factory()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ScenarioError(str(exc), key_for_errors, lines.get(key_for_errors)) from None

    table = _parse_table(merged["drift.table"], lines.get("drift.table")) if kind is DriftKind.TABULATED else ()
    profile = build(lambda: DriftProfile(
        kind, merged["drift.v0"],
        amplitude=merged.get("drift.A", 0.0),
        omega=merged.get("drift.omega", 0.0),
        t_switch=merged.get("drift.t_switch", 0.0),
        table=table,
    ), "drift.kind")
    params = build(lambda: ChannelParams(merged["channel.x0"], merged["channel.ell"], merged["channel.sigma2"]),
                   "channel.ell")
    try:
        mode = PrefactorMode(str(merged["model.mode"]).lower())
    except ValueError:
        raise ScenarioError(f"unknown mode {merged['model.mode']!r}", "model.mode",
                            lines.get("model.mode")) from None
    try:
        flux = FluxDistance(str(merged["model.flux_distance"]).lower())
    except ValueError:
        raise ScenarioError("flux_distance must be 'boundary' or 'gap'", "model.flux_distance",
                            lines.get("model.flux_distance")) from None
    try:
        sim = SimConfig(params, profile, merged["sim.n_trajectories"], merged["sim.dt"],
                        merged["sim.t_max"], merged["sim.seed"])
    except ConfigError as exc:
        raise ScenarioError(str(exc), "sim") from None
    grid, bins = merged["output.grid"], merged["output.bins"]
    if grid < 2:
        raise ScenarioError("grid must be >= 2", "output.grid", lines.get("output.grid"))
    if bins < 1:
        raise ScenarioError("bins must be >= 1", "output.bins", lines.get("output.bins"))
    return Scenario(str(name), params, profile, mode, flux, sim, int(grid), int(bins))


def parse_scenario(text):
    entries = _read_document(text)
    values = {k: v for k, (v, _) in entries.items()}
    lines = {k: no for k, (_, no) in entries.items()}
    return scenario_from_dict(values, lines)


def scenario_to_dict(scenario):
    p = scenario.profile
    out = {
        "name": scenario.name,
        "channel.x0": scenario.params.x0,
        "channel.ell": scenario.params.ell,
        "channel.sigma2": scenario.params.sigma2,
        "drift.kind": p.kind.value,
        "drift.v0": p.v0,
    }
    if p.kind is DriftKind.SINUSOIDAL:
        out.update({"drift.A": p.amplitude, "drift.omega": p.omega})
    elif p.kind is DriftKind.STEP:
        out.update({"drift.A": p.amplitude, "drift.t_switch": p.t_switch})
    elif p.kind is DriftKind.TABULATED:
        out["drift.table"] = ", ".join(f"{t!r}:{v!r}" for t, v in p.table)
    out.update({
        "model.mode": scenario.mode.value,
        "model.flux_distance": scenario.flux_distance.value,
        "sim.n_trajectories": scenario.sim.n_trajectories,
        "sim.dt": scenario.sim.dt,
        "sim.t_max": scenario.sim.t_max,
        "sim.seed": scenario.sim.seed,
        "output.grid": scenario.grid,
        "output.bins": scenario.bins,
    })
    return out


def serialize_scenario(scenario):
    """Canonical text form; ``parse_scenario(serialize_scenario(s)) == s``."""
    flat = scenario_to_dict(scenario)
    lines = [f"name = {flat.pop('name')}"]
    section = None
    for key, value in flat.items():
        sec, sub = key.split(".", 1)
        if sec != section:
            lines.append("")
            lines.append(f"[{sec}]")
            section = sec
        lines.append(f"{sub} = {value!r}" if isinstance(value, float) else f"{sub} = {value}")
    return "\n".join(lines) + "\n"


def with_override(scenario, key, value):
    """Copy of ``scenario`` with one dotted key replaced (used by sweeps)."""
    flat = scenario_to_dict(scenario)
    if key not in _KNOWN or key == "name":
        raise ScenarioError("cannot override this key", key)
    flat[key] = value
    return scenario_from_dict(flat)


def load_scenario(ref):
    """Load a scenario from a path, or from a shipped fixture name like ``fig3.scn``."""
    path = Path(ref)
    if path.is_file():
        return parse_scenario(path.read_text(encoding="utf-8"))
    stem = path.name[:-4] if path.name.endswith(".scn") else path.name
    if stem in FIXTURES:
        text = resources.files("cigfht").joinpath("scenarios", f"{stem}.scn").read_text(encoding="utf-8")
        return parse_scenario(text)
    raise ScenarioError(f"scenario {ref!r} not found (shipped: {', '.join(FIXTURES)})")


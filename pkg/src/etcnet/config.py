"""Campaign configuration files.

Two formats are accepted: an INI-style text file (the hand-edited
workflow) and a JSON file with the same structure (for machine
generation).  Node indices are 1-based in config files and converted to
0-based internally.

INI layout::

    [campaign]
    name = example1
    seeds = 0:20            ; half-open range, or a comma list
    output = runs/example1

    [defaults]              ; shared scenario keys
    n = 4
    edges = 1-2, 2-3, 3-4
    leaders = 1
    ...

    [scenario:setc_a1]
    mode = setc
    a_const = 1

    [pairing:low_gain]
    proposed = petc_low
    baseline = setc_a1
"""

from __future__ import annotations

import configparser
import json
from dataclasses import dataclass
from pathlib import Path

from .graph import build_topology
from .signals import CommandSpec
from .sim import ConfigError, ScenarioConfig


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class Pairing:
    name: str
    proposed: str
    baseline: str


@dataclass(frozen=True)
class Campaign:
    name: str
    scenarios: tuple[ScenarioConfig, ...]
    seeds: tuple[int, ...]
    pairings: tuple[Pairing, ...]
    output_dir: str

    def scenario(self, name: str) -> ScenarioConfig:
        for s in self.scenarios:
            if s.name == name:
                return s
        raise KeyError(name)


_SCENARIO_FLOATS = {
    "delta", "epsilon", "zeta1", "zeta2", "psi", "gamma_lower", "gamma_upper",
    "a_min", "a_max", "a_const", "a_init", "theta_init", "dt", "horizon",
    "init_low", "init_high", "exclusion_tolerance",
    "command_amplitude", "command_period", "command_tau", "command_offset",
}
_SCENARIO_STRS = {"mode", "exclusion_clear", "command_kind"}
_SCENARIO_KEYS = _SCENARIO_FLOATS | _SCENARIO_STRS | {"n", "edges", "leaders"}


def parse_seed_list(text: str) -> tuple[int, ...]:
    """"0:20" (half-open range) or "0,1,5"."""
    text = text.strip()
    if ":" in text:
        lo, hi = text.split(":")
        return tuple(range(int(lo), int(hi)))
    return tuple(int(v) for v in text.split(",") if v.strip() != "")


def _parse_edges(text: str) -> list[tuple[int, int]]:
    edges = []
    for chunk in text.replace(";", ",").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            i, j = chunk.split("-")
            edges.append((int(i) - 1, int(j) - 1))
        except ValueError as exc:
            raise ParseError(f"bad edge spec {chunk!r} (expected 'i-j')") from exc
    return edges


def _build_scenario(name: str, raw: dict[str, str]) -> ScenarioConfig:
    unknown = set(raw) - _SCENARIO_KEYS
    if unknown:
        raise ParseError(f"scenario {name!r}: unknown keys {sorted(unknown)}")
    for key in ("n", "edges", "leaders"):
        if key not in raw:
            raise ParseError(f"scenario {name!r}: missing required key {key!r}")
    try:
        n = int(raw["n"])
        edges = _parse_edges(raw["edges"])
        leaders = [int(v) - 1 for v in raw["leaders"].replace(";", ",").split(",")]
        topology = build_topology(n, edges, leaders)
    except ValueError as exc:
        raise ParseError(f"scenario {name!r}: {exc}") from exc

    cmd_kwargs = {}
    kwargs = {}
    for key, val in raw.items():
        if key in ("n", "edges", "leaders"):
            continue
        if key.startswith("command_"):
            field = key[len("command_"):]
            cmd_kwargs[field] = val if field == "kind" else float(val)
        elif key in _SCENARIO_FLOATS:
            kwargs[key] = float(val)
        else:
            kwargs[key] = val
    try:
        command = CommandSpec(**cmd_kwargs)
        return ScenarioConfig(name=name, topology=topology, command=command, **kwargs)
    except (ConfigError, ValueError) as exc:
        raise ConfigError(f"scenario {name!r}: {exc}") from exc


def _campaign_from_dicts(
    meta: dict[str, str],
    defaults: dict[str, str],
    scenarios: list[tuple[str, dict[str, str]]],
    pairings: list[Pairing],
) -> Campaign:
    if not scenarios:
        raise ParseError("config defines no scenarios")
    names = [name for name, _ in scenarios]
    if len(set(names)) != len(names):
        raise ParseError(f"duplicate scenario names in {names}")
    built = tuple(
        _build_scenario(name, {**defaults, **raw}) for name, raw in scenarios
    )
    by_name = {s.name: s for s in built}
    for p in pairings:
        for role, ref in (("proposed", p.proposed), ("baseline", p.baseline)):
            if ref not in by_name:
                raise ParseError(f"pairing {p.name!r}: unknown {role} scenario {ref!r}")
        a, b = by_name[p.proposed], by_name[p.baseline]
        if (
            a.topology != b.topology
            or a.command != b.command
            or a.dt != b.dt
            or a.horizon != b.horizon
        ):
            raise ConfigError(
                f"pairing {p.name!r}: scenarios must share topology, command, "
                "dt, and horizon"
            )
    seeds = parse_seed_list(meta.get("seeds", "0:20"))
    if not seeds:
        raise ParseError("empty seed list")
    return Campaign(
        name=meta.get("name", "campaign"),
        scenarios=built,
        seeds=seeds,
        pairings=tuple(pairings),
        output_dir=meta.get("output", "runs"),
    )


def parse_config(path: str | Path) -> Campaign:
    """Load and fully validate a campaign file (.cfg/.ini or .json)."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"config file not found: {path}")
    if path.suffix == ".json":
        return _parse_json(path)
    return _parse_ini(path)


def _parse_ini(path: Path) -> Campaign:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise ParseError(f"{path}: {exc}") from exc
    meta = dict(cp["campaign"]) if cp.has_section("campaign") else {}
    defaults = dict(cp["defaults"]) if cp.has_section("defaults") else {}
    scenarios = []
    pairings = []
    for section in cp.sections():
        if section.startswith("scenario:"):
            scenarios.append((section.split(":", 1)[1], dict(cp[section])))
        elif section.startswith("pairing:"):
            body = cp[section]
            for key in ("proposed", "baseline"):
                if key not in body:
                    raise ParseError(f"[{section}] is missing {key!r}")
            pairings.append(
                Pairing(section.split(":", 1)[1], body["proposed"], body["baseline"])
            )
        elif section not in ("campaign", "defaults"):
            raise ParseError(f"unknown section [{section}]")
    return _campaign_from_dicts(meta, defaults, scenarios, pairings)


def _parse_json(path: Path) -> Campaign:
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    meta = {k: str(v) for k, v in doc.get("campaign", {}).items()}
    defaults = {k: str(v) for k, v in doc.get("defaults", {}).items()}
    scenarios = [
        (name, {k: str(v) for k, v in body.items()})
        for name, body in doc.get("scenarios", {}).items()
    ]
    pairings = [
        Pairing(p["name"], p["proposed"], p["baseline"])
        for p in doc.get("pairings", [])
    ]
    return _campaign_from_dicts(meta, defaults, scenarios, pairings)

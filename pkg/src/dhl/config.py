"""Strict ``key = value`` run configuration with dotted sections."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError

COMMANDS = ("verify", "index", "amodel", "flow", "corpus")


def _int(v):
    return int(v)


def _float(v):
    return float(v)


def _str(v):
    return v.strip()


def _ints(v):
    return tuple(int(x) for x in v.replace(",", " ").split())


def _floats(v):
    return tuple(float(x) for x in v.replace(",", " ").split())


def _complexes(v):
    return tuple(complex(x.replace(" ", "")) for x in v.split(","))


def _strs(v):
    return tuple(x.strip() for x in v.split(",") if x.strip())


def _choice(*opts):
    def parse(v):
        v = v.strip()
        if v not in opts:
            raise ValueError(f"expected one of {opts}")
        return v

    return parse


SCHEMA = {
    "seed": (_int, 0),
    "resolution": (_int, 32),
    "points": (_int, 100),
    "surface.kind": (_choice("sphere", "torus"), "sphere"),
    "surface.radius": (_float, 1.0),
    "map.family": (_choice("power", "rational", "line", "torus_identity", "torus_constant"), "power"),
    "map.degree": (_int, 2),
    "map.numerator": (_complexes, (0j, 0j, 1 + 0j)),
    "map.denominator": (_complexes, (1 + 0j,)),
    "map.n": (_int, 2),
    "twist.kind": (_choice("trivial", "spin_half", "canonical_power"), "trivial"),
    "twist.m": (_int, 0),
    "selectors": (_strs, ("prime+dprime", "prime*+dprime*", "prime+dprime*", "dprime+prime*")),
    "amodel.n": (_int, 3),
    "amodel.g": (_int, 0),
    "amodel.c1A": (_int, 0),
    "flow.eps": (_floats, (0.05, 0.1)),
    "flow.steps": (_int, 200),
    "tolerance.residual": (_float, 1e-8),
    "tolerance.algebraic": (_float, 1e-12),
    "tolerance.quadrature": (_float, 1e-6),
    "tolerance.energy_flow": (_float, 1e-4),
    "corpus.sphere_degrees": (_ints, (0, 1, 2, 3)),
    "corpus.include_line": (_choice("yes", "no"), "yes"),
    "corpus.include_torus": (_choice("yes", "no"), "yes"),
    "corpus.twisted_q": (_ints, (1, 2)),
}


@dataclass
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)
    out: str = "out"

    def __getitem__(self, key):
        return self.values[key]

    @property
    def seed(self):
        return self.values["seed"]

    @property
    def N(self):
        return self.values["resolution"]


def parse_text(text: str, source="<config>") -> dict:
    vals = {k: d for k, (_, d) in SCHEMA.items()}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        seen.add(key)
        parse, _ = SCHEMA[key]
        try:
            vals[key] = parse(val)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from None
    _validate(vals)
    return vals


def _validate(vals):
    if vals["resolution"] < 8:
        raise ConfigError("resolution: must be at least 8")
    if vals["points"] < 1:
        raise ConfigError("points: must be positive")
    if vals["surface.radius"] <= 0:
        raise ConfigError("surface.radius: must be positive")
    if vals["flow.steps"] < 0:
        raise ConfigError("flow.steps: must be non-negative")
    if any(q < 1 for q in vals["corpus.twisted_q"]):
        raise ConfigError("corpus.twisted_q: entries must be positive")
    for sel in vals["selectors"]:
        from .constructions import parse_selector

        try:
            parse_selector(sel)
        except ValueError as exc:
            raise ConfigError(f"selectors: {exc}") from None


def load(command: str, path: str | None, seed=None, resolution=None, out=None) -> RunConfig:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    text = ""
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    vals = parse_text(text, path or "<defaults>")
    if seed is not None:
        vals["seed"] = int(seed)
    if resolution is not None:
        vals["resolution"] = int(resolution)
        _validate(vals)
    return RunConfig(command, vals, out or "out")

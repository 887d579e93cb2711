"""Flat key=value configuration files and the named experiment presets."""

from dataclasses import dataclass, fields, replace

from .simulator import SimParams, SweepAxis

__all__ = [
    "PRESET_NAMES",
    "ExperimentPreset",
    "format_config",
    "get_preset",
    "load_config",
    "parse_config_text",
]

# Scalar coercion per SimParams field. "ofloat"/"oint" admit "none".
_FIELD_TYPES = {
    "protocol": "str",
    "k0": "int",
    "tau_p": "int",
    "m": "int",
    "p_a": "float",
    "sigma2": "float",
    "rho_bar": "float",
    "q": "ofloat",
    "epsilon": "ofloat",
    "sigma_beta": "float",
    "interference": "bool",
    "max_attempts": "int",
    "backoff_window": "int",
    "n_blocks": "int",
    "warmup_frac": "float",
    "mode": "str",
    "n_contenders": "oint",
    "d_max": "float",
    "d_min": "float",
    "shadow_sigma_db": "float",
    "tx_power_watts": "float",
    "omega_bar_samples": "int",
}

assert set(_FIELD_TYPES) == {f.name for f in fields(SimParams)}


def _parse_value(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    try:
        if kind.startswith("o"):
            if raw.lower() == "none":
                return None
            kind = kind[1:]
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            if raw.lower() in ("true", "false"):
                return raw.lower() == "true"
            raise ValueError
        return raw
    except ValueError:
        raise ValueError(f"config key {key!r}: cannot parse {raw!r} as {kind}") from None


def _format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_config_text(text: str) -> dict:
    """key=value lines to a typed override dict. '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ValueError(f"unknown config key {key!r}")
        out[key] = _parse_value(key, raw)
    return out


def format_config(params: SimParams) -> str:
    """Echo of the full effective configuration; parses back to params."""
    lines = [f"{f.name} = {_format_value(getattr(params, f.name))}" for f in fields(SimParams)]
    return "\n".join(lines) + "\n"


def load_config(path=None, sets=(), base: SimParams | None = None) -> SimParams:
    """Base params overlaid with a config file and then key=value overrides.

    Raises ValueError naming the offending key for unknown keys or unparseable
    values; SimParams itself rejects invariant violations.
    """
    overrides = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            overrides.update(parse_config_text(fh.read()))
    for item in sets:
        if "=" not in item:
            raise ValueError(f"override {item!r}: expected key=value")
        key, raw = (s.strip() for s in item.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ValueError(f"unknown config key {key!r}")
        overrides[key] = _parse_value(key, raw)
    params = base if base is not None else SimParams()
    return replace(params, **overrides) if overrides else params


@dataclass(frozen=True)
class ExperimentPreset:
    """One figure-style experiment: series of configs swept over one axis."""

    name: str
    series: tuple[SimParams, ...]
    axis: SweepAxis
    bound_table: bool = False


def _series(*combos, **common) -> tuple[SimParams, ...]:
    return tuple(
        SimParams(protocol=p, interference=i, **common) for p, i in combos
    )


def _build_presets() -> dict[str, ExperimentPreset]:
    k0_axis = SweepAxis("k0", tuple(range(1000, 28001, 1000)))
    st_axis = SweepAxis("st", tuple(range(1, 14)))
    dist_axis = SweepAxis("distance")

    fig1 = _series(
        ("sucre", True), ("sucre", False),
        ("acbpc", True), ("acbpc", False),
    )
    fig2a = _series(
        ("sucre", True), ("sucre", False),
        ("acbpc", True), ("acbpc", False),
    )
    # Per-distance figures: crowded cell, interference on. The imperfect-beta
    # variant is one `--set sigma_beta=0.2` away rather than its own series.
    dist = _series(("sucre", True), ("acbpc", True), k0=15000)

    presets = [
        ExperimentPreset("fig1-attempts", fig1, k0_axis),
        ExperimentPreset("fig1-failures", fig1, k0_axis),
        ExperimentPreset("fig2a-res-vs-st", fig2a, st_axis),
        ExperimentPreset("fig2b-res-vs-dist", dist, dist_axis),
        ExperimentPreset("fig3-dist-performance", dist, dist_axis),
        ExperimentPreset("fig4-power-energy", dist, dist_axis),
        ExperimentPreset(
            "bound-table",
            _series(("acbpc", False)),
            SweepAxis("st", tuple(range(1, 11))),
            bound_table=True,
        ),
    ]
    return {p.name: p for p in presets}


_PRESETS = _build_presets()
PRESET_NAMES = tuple(_PRESETS)


def get_preset(name: str) -> ExperimentPreset:
    if name not in _PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return _PRESETS[name]

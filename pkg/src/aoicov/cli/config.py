"""Flat ``key = value`` experiment configuration.

Lines are ``key = value``; ``#`` starts a comment; blank lines are ignored.
Unspecified keys fall back to the defaults below (two interferer classes at
8.7e-5 /m^2 with 40 and 30 mW, d = 20 m, alpha = 3.5, ...).
``overlay.<i>.<key>`` lines override any base key for series ``i`` of a sweep.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..channel import Environment, InterfererClass, SystemParams, dbm_to_mw
from ..coverage import CorrelationParams
from ..energy import EnergyParams
from ..errors import ConfigError, ValidationError


class Kind(enum.Enum):
    AVG_AOI_SWEEP = "AvgAoiSweep"
    VIOLATION_SWEEP = "ViolationSweep"
    ENERGY_SWEEP = "EnergySweep"
    OPTIMAL_POWER_VS_N = "OptimalPowerVsN"
    VALIDATE = "Validate"

    @classmethod
    def parse(cls, text: str) -> "Kind":
        key = re.sub(r"[^a-z]", "", str(text).lower())
        for kind in cls:
            if kind.value.lower() == key:
                return kind
        raise ValueError(f"unknown experiment kind {text!r}; expected one of "
                         + ", ".join(k.value for k in cls))


DEFAULTS: dict[str, object] = {
    "tx_power_dbm": 0.0,
    "link_distance": 20.0,
    "pathloss_exp": 3.5,
    "noise": 1e-5,
    "target_sinr": 1.0,
    "retx_interval": 1.0,
    "tx_duration": 1.0,
    "max_retx": 10,
    "corr_u": 1.76e-2,
    "corr_v": 1.2e-3,
    "theta_th": 0.1,
    "eta": 0.6,
    "eps_target": 0.6,
    "sensing_energy": 1.0,
    "environment": "general",
    "v_th_override": None,
    "seed": 0,
    "periods": 100_000,
    "experiment": "Validate",
}
DEFAULT_INTERFERERS = {1: {"density": 8.7e-5, "power": 40.0},
                       2: {"density": 8.7e-5, "power": 30.0}}

_INT_KEYS = {"max_retx", "seed", "periods"}
_STR_KEYS = {"environment", "experiment"}
_SWEEP_KEYS = {"sweep.min", "sweep.max", "sweep.step"}
_INTERFERER_RE = re.compile(r"^interferer\.(\d+)\.(density|power)$")
_OVERLAY_RE = re.compile(r"^overlay\.(\d+)\.(.+)$")

SWEEP_DEFAULTS = {
    Kind.AVG_AOI_SWEEP: ("pt_dbm", -10.0, 25.0, 1.0),
    Kind.VIOLATION_SWEEP: ("pt_dbm", -10.0, 25.0, 1.0),
    Kind.ENERGY_SWEEP: ("pt_dbm", -10.0, 5.0, 0.1),
    Kind.OPTIMAL_POWER_VS_N: ("max_retx", 5.0, 14.0, 1.0),
    Kind.VALIDATE: (None, 0.0, 0.0, 1.0),
}


@dataclass(frozen=True)
class Sweep:
    axis: str | None
    lo: float
    hi: float
    step: float

    def points(self) -> list[float]:
        if self.axis is None:
            return []
        n = int(round((self.hi - self.lo) / self.step + 1e-9)) + 1
        return [self.lo + i * self.step for i in range(n)]


@dataclass(frozen=True)
class BaseParams:
    system: SystemParams
    corr: CorrelationParams
    energy: EnergyParams
    env: Environment
    v_th_override: float | None


@dataclass(frozen=True)
class ExperimentSpec:
    kind: Kind
    sweep: Sweep
    base: BaseParams
    seed: int
    periods: int
    overlays: tuple[BaseParams, ...] = field(default_factory=tuple)
    overlay_labels: tuple[str, ...] = field(default_factory=tuple)

    def series(self) -> list[tuple[str, BaseParams]]:
        if not self.overlays:
            return [("base", self.base)]
        return list(zip(self.overlay_labels, self.overlays))


def _parse_value(key: str, raw: str, line: int):
    name = key.rsplit(".", 1)[-1] if key.startswith("overlay.") else key
    if raw.lower() in ("", "none", "null") and name == "v_th_override":
        return None
    if name in _STR_KEYS:
        return raw
    try:
        if name in _INT_KEYS:
            val = float(raw)
            if val != int(val):
                raise ValueError
            return int(val)
        return float(raw)
    except ValueError:
        kind = "an integer" if name in _INT_KEYS else "a number"
        raise ConfigError(f"expected {kind}, got {raw!r}", key=key, line=line) from None


def parse_text(text: str) -> tuple[dict, dict]:
    """Split a config text into {key: value} and {key: line number}."""
    values, lines = {}, {}
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", line=no)
        key, val = (s.strip() for s in body.split("=", 1))
        if not key:
            raise ConfigError("missing key", line=no)
        _check_key(key, no)
        if key in values:
            raise ConfigError("duplicate key", key=key, line=no)
        values[key] = _parse_value(key, val.strip().strip('"').strip("'"), no)
        lines[key] = no
    return values, lines


def _check_key(key: str, line: int) -> None:
    if key in DEFAULTS or key in _SWEEP_KEYS or _INTERFERER_RE.match(key):
        return
    m = _OVERLAY_RE.match(key)
    if m:
        inner = m.group(2)
        if inner in DEFAULTS or _INTERFERER_RE.match(inner):
            if inner in ("seed", "periods", "experiment"):
                raise ConfigError("cannot be overridden per overlay", key=key, line=line)
            return
    raise ConfigError("unknown key", key=key, line=line)


def _build_base(values: dict, lines: dict, prefix: str = "") -> BaseParams:
    def get(name):
        full = prefix + name
        if full in values:
            return values[full], full
        if name in values:
            return values[name], name
        return DEFAULTS[name], None

    interferers = {j: dict(v) for j, v in DEFAULT_INTERFERERS.items()}
    for source in (values, {k[len(prefix):]: v for k, v in values.items()
                            if prefix and k.startswith(prefix)}):
        for k, v in source.items():
            m = _INTERFERER_RE.match(k)
            if m:
                interferers.setdefault(int(m.group(1)), {})[m.group(2)] = v
    classes = []
    for j in sorted(interferers):
        spec = interferers[j]
        if "density" not in spec or "power" not in spec:
            missing = "density" if "density" not in spec else "power"
            key = f"interferer.{j}.{missing}"
            raise ConfigError("required when the class is declared", key=key,
                              line=lines.get(f"interferer.{j}.density")
                              or lines.get(f"interferer.{j}.power"))
        classes.append((j, spec))

    def guard(build, names):
        try:
            return build()
        except (ValidationError, ValueError) as exc:
            msg = str(exc)
            for n in names:
                if n in msg or n.replace("_", " ") in msg:
                    key = prefix + n if prefix + n in values else n
                    raise ConfigError(msg, key=key, line=lines.get(key)) from None
            raise ConfigError(msg) from None

    sys_names = ["tx_power_dbm", "link_distance", "pathloss_exp", "noise", "target_sinr",
                 "retx_interval", "tx_duration", "max_retx"]
    vals = {n: get(n)[0] for n in sys_names}

    def make_classes():
        out = []
        for j, spec in classes:
            try:
                out.append(InterfererClass(spec["density"], spec["power"]))
            except ValidationError as exc:
                key = f"interferer.{j}.density"
                raise ConfigError(str(exc), key=key, line=lines.get(key)) from None
        return tuple(out)

    ints = make_classes()
    system = guard(lambda: SystemParams(
        tx_power=dbm_to_mw(vals["tx_power_dbm"]),
        link_distance=vals["link_distance"],
        pathloss_exp=vals["pathloss_exp"],
        noise=vals["noise"],
        target_sinr=vals["target_sinr"],
        interferers=ints,
        retx_interval=vals["retx_interval"],
        tx_duration=vals["tx_duration"],
        max_retx=vals["max_retx"],
    ), ["max_retx", "pathloss_exp", "tx_duration", "retx_interval", "link_distance",
        "noise", "target_sinr", "tx_power"])
    corr = guard(lambda: CorrelationParams(
        u=get("corr_u")[0], v=get("corr_v")[0], theta_th=get("theta_th")[0],
        eta=get("eta")[0], eps_target=get("eps_target")[0],
    ), ["corr_u", "corr_v", "theta_th", "eta", "eps_target"])
    energy = guard(lambda: EnergyParams(system, get("sensing_energy")[0]), ["sensing_energy"])
    env_raw, env_key = get("environment")
    try:
        env = Environment.parse(env_raw)
    except ValueError as exc:
        raise ConfigError(str(exc), key=env_key or "environment",
                          line=lines.get(env_key)) from None
    v_override, v_key = get("v_th_override")
    if v_override is not None and not v_override > 0:
        raise ConfigError("v_th_override must be > 0", key=v_key, line=lines.get(v_key))
    return BaseParams(system, corr, energy, env, v_override)


def load_spec_text(text: str, experiment: str | None = None) -> ExperimentSpec:
    values, lines = parse_text(text)
    try:
        kind = Kind.parse(experiment or values.get("experiment", DEFAULTS["experiment"]))
    except ValueError as exc:
        raise ConfigError(str(exc), key="experiment", line=lines.get("experiment")) from None

    axis, lo, hi, step = SWEEP_DEFAULTS[kind]
    lo = values.get("sweep.min", lo)
    hi = values.get("sweep.max", hi)
    step = values.get("sweep.step", step)
    if not step > 0:
        raise ConfigError("sweep step must be > 0", key="sweep.step", line=lines.get("sweep.step"))
    if hi < lo:
        raise ConfigError("sweep bounds must satisfy min <= max", key="sweep.max",
                          line=lines.get("sweep.max"))
    if axis == "max_retx" and (lo < 1 or int(lo) != lo or int(step) != step):
        raise ConfigError("max_retx sweep needs integer bounds >= 1", key="sweep.min",
                          line=lines.get("sweep.min"))

    seed = values.get("seed", DEFAULTS["seed"])
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer", key="seed",
                          line=lines.get("seed"))
    periods = values.get("periods", DEFAULTS["periods"])
    if periods < 1:
        raise ConfigError("periods must be >= 1", key="periods", line=lines.get("periods"))

    base = _build_base(values, lines)
    ids = sorted({int(m.group(1)) for k in values if (m := _OVERLAY_RE.match(k))})
    overlays = tuple(_build_base(values, lines, prefix=f"overlay.{i}.") for i in ids)
    labels = tuple(_overlay_label(values, i) for i in ids)
    return ExperimentSpec(kind, Sweep(axis, lo, hi, step), base, int(seed), int(periods),
                          overlays, labels)


def _overlay_label(values: dict, i: int) -> str:
    prefix = f"overlay.{i}."
    parts = [f"{k[len(prefix):]}={values[k]:g}" if isinstance(values[k], (int, float))
             else f"{k[len(prefix):]}={values[k]}"
             for k in sorted(values) if k.startswith(prefix)]
    return ";".join(parts) or f"overlay{i}"


def load_config(path: str | Path | None, experiment: str | None = None) -> ExperimentSpec:
    """Read and validate a config file; ``None`` means all defaults."""
    text = "" if path is None else Path(path).read_text(encoding="utf-8")
    return load_spec_text(text, experiment)

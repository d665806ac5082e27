"""Monte-Carlo sample paths of the sensing / retransmission / update process."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from ..channel import SystemParams
from ..errors import ValidationError
from . import geometry
from .kernels import aoi_path, slot_interference

# bounded working set for the physical sampler, in PPP points per chunk
_POINTS_PER_CHUNK = 2_000_000
_PERIODS_PER_CHUNK = 1 << 16


@dataclass(frozen=True)
class AbstractMode:
    """Each attempt succeeds independently with probability ``p_s``."""

    p_s: float
    retx_interval: float = 1.0
    tx_duration: float = 1.0
    max_retx: int = 1

    def __post_init__(self):
        if not 0.0 < self.p_s <= 1.0:
            raise ValidationError(f"p_s must lie in (0, 1], got {self.p_s}")
        if not 0 < self.tx_duration <= self.retx_interval:
            raise ValidationError("need 0 < tx_duration <= retx_interval")
        if int(self.max_retx) != self.max_retx or self.max_retx < 1:
            raise ValidationError(f"max_retx must be an integer >= 1, got {self.max_retx}")

    @property
    def timing(self):
        return self.retx_interval, self.tx_duration, int(self.max_retx)


@dataclass(frozen=True)
class PhysicalMode:
    """Per-slot SINR from Rayleigh fading and a freshly drawn PPP field.

    ``field_radius=None`` picks :func:`geometry.physical_field_radius`.
    ``static_field`` freezes interferer positions across slots (fading is
    still redrawn); it breaks slot independence and is not meant for
    checking the closed forms.
    """

    params: SystemParams
    field_radius: float | None = None
    exclusion_radius: float = 0.0
    far_field: bool = True
    static_field: bool = False

    def __post_init__(self):
        if self.field_radius is not None and not self.field_radius > 0:
            raise ValidationError(f"field_radius must be > 0, got {self.field_radius}")
        if self.exclusion_radius < 0:
            raise ValidationError("exclusion_radius must be >= 0")
        if self.field_radius is not None and self.exclusion_radius >= self.field_radius:
            raise ValidationError("exclusion_radius must be smaller than field_radius")

    @property
    def timing(self):
        p = self.params
        return p.retx_interval, p.tx_duration, p.max_retx

    def resolved_radius(self) -> float:
        if self.field_radius is not None:
            return self.field_radius
        return geometry.physical_field_radius(self.params)


Mode = Union[AbstractMode, PhysicalMode]


@dataclass(frozen=True)
class SimConfig:
    mode: Mode
    periods: int
    seed: int = 0
    v_th: float | Sequence[float] | None = None

    def __post_init__(self):
        if int(self.periods) != self.periods or self.periods < 1:
            raise ValidationError(f"periods must be an integer >= 1, got {self.periods}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must fit in an unsigned 64-bit integer")

    @property
    def thresholds(self) -> tuple[float, ...]:
        if self.v_th is None:
            return ()
        if np.ndim(self.v_th) == 0:
            return (float(self.v_th),)
        return tuple(float(v) for v in self.v_th)


@dataclass(frozen=True)
class SimRun:
    """Aggregates of one sample path.

    The time axis spans complete inter-update intervals only (first to last
    update), so ``aoi_integral / time_horizon`` is a renewal-reward estimate
    without edge effects. ``violated_time[i]`` belongs to ``thresholds[i]``.
    """

    periods: int
    retx_interval: float
    tx_duration: float
    max_retx: int
    time_horizon: float
    aoi_integral: float
    thresholds: tuple[float, ...]
    violated_time: np.ndarray
    updates: int
    transmissions: int
    z_samples: np.ndarray = field(repr=False)

    def violated(self, v_th: float) -> float:
        for v, t in zip(self.thresholds, self.violated_time):
            if v == v_th:
                return float(t)
        raise KeyError(f"threshold {v_th} was not tracked; tracked: {self.thresholds}")

    def aggregate_key(self) -> tuple:
        """Hashable summary used for determinism checks."""
        return (self.periods, self.time_horizon, self.aoi_integral,
                tuple(float(x) for x in self.violated_time), self.updates,
                self.transmissions, self.z_samples.tobytes())


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def trial_seed(seed: int, index: int) -> np.random.SeedSequence:
    """Counter-based child stream ``index`` of master ``seed``."""
    return np.random.SeedSequence(int(seed), spawn_key=(int(index),))


def sample_interference(params: SystemParams, field_radius: float,
                        rng: np.random.Generator, size: int | None = None,
                        exclusion_radius: float = 1.0):
    """Aggregate PPP interference at the receiver.

    Per class, a Poisson(lambda * area) number of interferers placed uniformly
    on the annulus [exclusion_radius, field_radius], each with Exp(1) fading.
    Returns a float, or an array of ``size`` independent draws.
    """
    n = 1 if size is None else int(size)
    out = _interference_draws(params, n, field_radius, exclusion_radius, rng)
    return float(out[0]) if size is None else out


def _interference_draws(params, n, r_out, r_in, rng):
    dens = np.array([c.density for c in params.interferers], dtype=np.float64)
    powers = np.array([c.power for c in params.interferers], dtype=np.float64)
    if dens.size == 0 or not np.any(dens > 0):
        return np.zeros(n)
    area = math.pi * (r_out**2 - r_in**2)
    counts = rng.poisson(dens * area, size=(n, dens.size))
    total = int(counts.sum())
    r2_unit = rng.random(total)
    fading = rng.standard_exponential(total)
    return slot_interference(counts, r2_unit, fading, powers, r_in, r_out,
                             params.pathloss_exp)


def sample_slot_successes(mode: PhysicalMode, n_slots: int,
                          rng: np.random.Generator) -> np.ndarray:
    """Boolean SINR >= delta outcome of ``n_slots`` consecutive slots."""
    sp = mode.params
    r_out = mode.resolved_radius()
    r_in = mode.exclusion_radius
    far = geometry.far_field_success_factor(sp, r_out) if mode.far_field else 1.0
    gain = sp.tx_power * sp.link_distance ** (-sp.pathloss_exp) / sp.target_sinr
    mean_pts = sum(c.density for c in sp.interferers) * math.pi * (r_out**2 - r_in**2)
    chunk = max(1, int(_POINTS_PER_CHUNK / max(mean_pts, 1.0)))

    if mode.static_field:
        return _static_field_successes(mode, n_slots, rng, r_in, r_out, far, gain)

    out = np.empty(n_slots, dtype=bool)
    for start in range(0, n_slots, chunk):
        m = min(chunk, n_slots - start)
        interference = _interference_draws(sp, m, r_out, r_in, rng)
        h = rng.standard_exponential(m)
        ok = gain * h >= interference + sp.noise
        if mode.far_field:
            ok &= rng.random(m) < far
        out[start:start + m] = ok
    return out


def _static_field_successes(mode, n_slots, rng, r_in, r_out, far, gain):
    sp = mode.params
    area = math.pi * (r_out**2 - r_in**2)
    radii2, powers = [], []
    for c in sp.interferers:
        k = rng.poisson(c.density * area)
        radii2.append(r_in**2 + rng.random(k) * (r_out**2 - r_in**2))
        powers.append(np.full(k, c.power))
    r2 = np.concatenate(radii2) if radii2 else np.zeros(0)
    pw = np.concatenate(powers) if powers else np.zeros(0)
    path = pw * r2 ** (-0.5 * sp.pathloss_exp)
    out = np.empty(n_slots, dtype=bool)
    step = max(1, _POINTS_PER_CHUNK // max(path.size, 1))
    for start in range(0, n_slots, step):
        m = min(step, n_slots - start)
        fading = rng.standard_exponential((m, path.size))
        interference = fading @ path
        h = rng.standard_exponential(m)
        ok = gain * h >= interference + sp.noise
        if mode.far_field:
            ok &= rng.random(m) < far
        out[start:start + m] = ok
    return out


def _first_success(config: SimConfig, rng: np.random.Generator):
    mode = config.mode
    _, _, N = mode.timing
    if isinstance(mode, AbstractMode):
        attempts = rng.geometric(mode.p_s, size=config.periods)
        fs = np.where(attempts <= N, attempts, 0)
        return fs, int(np.minimum(attempts, N).sum())

    fs = np.empty(config.periods, dtype=np.int64)
    transmissions = 0
    if mode.field_radius is None:
        mode = PhysicalMode(mode.params, mode.resolved_radius(), mode.exclusion_radius,
                            mode.far_field, mode.static_field)
    for start in range(0, config.periods, _PERIODS_PER_CHUNK):
        m = min(_PERIODS_PER_CHUNK, config.periods - start)
        ok = sample_slot_successes(mode, m * N, rng).reshape(m, N)
        hit = ok.any(axis=1)
        first = np.argmax(ok, axis=1) + 1
        fs[start:start + m] = np.where(hit, first, 0)
        transmissions += int(np.where(hit, first, N).sum())
    return fs, transmissions


def run(config: SimConfig, seed_seq: np.random.SeedSequence | None = None) -> SimRun:
    """Simulate ``config.periods`` sensing periods and account the AoI exactly."""
    rng = _rng(config.seed if seed_seq is None else seed_seq)
    T_R, T_o, N = config.mode.timing
    fs, transmissions = _first_success(config, rng)
    thresholds = config.thresholds
    horizon, area, violated, updates, z = aoi_path(
        fs, N, T_R, T_o, np.asarray(thresholds, dtype=np.float64)
    )
    return SimRun(
        periods=config.periods,
        retx_interval=T_R,
        tx_duration=T_o,
        max_retx=N,
        time_horizon=horizon,
        aoi_integral=area,
        thresholds=thresholds,
        violated_time=np.asarray(violated, dtype=np.float64),
        updates=updates,
        transmissions=transmissions,
        z_samples=np.asarray(z, dtype=np.float64),
    )


def run_trials(config: SimConfig, trials: int, workers: int = 1) -> list[SimRun]:
    """Independent trials on child streams of ``config.seed``, returned in index order."""
    seeds = [trial_seed(config.seed, i) for i in range(trials)]
    if workers <= 1:
        return [run(config, s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: run(config, s), seeds))

"""Stochastic validation engine.

Discrete-event simulation of the Markovian queue family (M/M/s, finite
buffer, abandonment, nonhomogeneous arrivals with a time-varying number
of servers), the bulk-service recursion, and Euler-Maruyama integration
of the piecewise-linear diffusion limits.  Every analytic quantity in the
package has a counterpart estimator here.

Randomness: counter-based Philox streams keyed by (seed, replication,
purpose), so arrival/service/patience draws are mutually independent and
replications can be computed in any order with identical results.
Estimates carry standard errors across independent replications.
"""

from __future__ import annotations

import json
import math
import warnings
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Union

import numpy as np

from .bulk import BulkModel
from .errors import ConfigurationError, DomainError
from .exact import QueueModel, mms_pi
from .timevarying import RateFunction, StaffingSchedule

__all__ = [
    "TimeVaryingModel",
    "DiffusionModel",
    "SimConfig",
    "SimEstimate",
    "SamplePath",
    "TimeVaryingProfile",
    "simulate",
    "sample_path",
    "nhpp_arrivals",
    "time_varying_delay_profile",
    "diffusion_samples",
    "estimates_csv",
    "estimates_json",
    "path_csv",
]

# stream purposes
_ARRIVAL, _SERVICE, _PATIENCE, _INIT = 0, 1, 2, 3

_Z95 = 1.959963984540054


def _stream(seed: int, rep: int, purpose: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(rep, purpose))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class TimeVaryingModel:
    """Nonhomogeneous arrivals served under a staffing schedule.

    ``initial_load``: offered load used to draw the time-0 occupancy from
    a stationary law; default is the rate's stationary offered load when
    it extends to the past, else rate(0)/mu.
    """

    rate: RateFunction
    schedule: StaffingSchedule
    mu: float = 1.0
    initial_load: Optional[float] = None

    def __post_init__(self):
        if not (self.mu > 0.0):
            raise DomainError("service rate must be positive, got %r" % (self.mu,))


@dataclass(frozen=True)
class DiffusionModel:
    """Piecewise-linear-drift diffusion: drift -beta - theta x above zero,
    -beta - x below, variance 2 (the QED process limit)."""

    beta: float
    theta: float = 0.0
    step: float = 1e-3

    def __post_init__(self):
        if self.theta < 0.0:
            raise DomainError("theta must be >= 0, got %r" % (self.theta,))
        if self.theta == 0.0 and not (self.beta > 0.0):
            raise DomainError("beta must be positive when theta = 0")
        if not (self.step > 0.0):
            raise DomainError("step must be positive, got %r" % (self.step,))


Model = Union[QueueModel, BulkModel, TimeVaryingModel, DiffusionModel]


@dataclass(frozen=True)
class SimConfig:
    model: Model
    horizon: float
    warmup: float = 0.0
    replications: int = 20
    seed: int = 0

    def __post_init__(self):
        if not (self.horizon > 0.0):
            raise DomainError("horizon must be positive, got %r" % (self.horizon,))
        if not (0.0 <= self.warmup < self.horizon):
            raise DomainError("need 0 <= warmup < horizon")
        if self.replications < 1:
            raise DomainError("replications must be >= 1")


class SimEstimate(NamedTuple):
    point: float
    stderr: float
    ci95: tuple
    replications: int

    @staticmethod
    def from_reps(values: np.ndarray) -> "SimEstimate":
        values = np.asarray(values, dtype=float)
        point = float(values.mean())
        if len(values) > 1:
            stderr = float(values.std(ddof=1) / math.sqrt(len(values)))
        else:
            stderr = float("nan")
        half = _Z95 * stderr
        return SimEstimate(point, stderr, (point - half, point + half), len(values))

    def ci(self, z: float) -> tuple:
        return (self.point - z * self.stderr, self.point + z * self.stderr)


@dataclass(frozen=True)
class SamplePath:
    times: np.ndarray
    values: np.ndarray
    scaling: str                     # "raw" or "centered_scaled"
    levels: Optional[np.ndarray] = None  # active server count (mt models)


class TimeVaryingProfile(NamedTuple):
    bin_mid: np.ndarray
    delay_prob: np.ndarray
    arrivals: np.ndarray


_QUEUE_METRICS = {"delay_prob", "mean_delay", "p_empty", "mean_queue", "frac_above_zero"}
_METRICS_BY_KIND = {
    "mms": _QUEUE_METRICS,
    "mmsn": _QUEUE_METRICS | {"block_prob"},
    "mmsm": _QUEUE_METRICS | {"abandon_prob"},
    "mt": {"delay_prob", "mean_delay", "mean_queue"},
    "bulk": {"p_empty", "mean_queue"},
    "hw": {"frac_above_zero"},
}


def _model_kind(model: Model) -> str:
    if isinstance(model, QueueModel):
        if model.n is not None:
            return "mmsn"
        if model.theta is not None:
            return "mmsm"
        return "mms"
    if isinstance(model, BulkModel):
        return "bulk"
    if isinstance(model, TimeVaryingModel):
        return "mt"
    if isinstance(model, DiffusionModel):
        return "hw"
    raise ConfigurationError("unknown model type %r" % (type(model),))


def nhpp_arrivals(rate: RateFunction, horizon: float, rng: np.random.Generator,
                  cells: int = 64) -> np.ndarray:
    """Arrival epochs of a nonhomogeneous Poisson process on [0, horizon].

    Thinning against a piecewise-constant majorant (the exact per-cell
    maximum of the rate); within each cell candidates are an ordinary
    Poisson sample placed uniformly.
    """
    if not (horizon > 0.0):
        raise DomainError("horizon must be positive, got %r" % (horizon,))
    edges = np.linspace(0.0, horizon, cells + 1)
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        m = rate.max_on(float(a), float(b))
        if not np.isfinite(m):
            raise ConfigurationError("rate unbounded on [%g, %g]" % (a, b))
        if m <= 0.0:
            continue
        n = rng.poisson(m * (b - a))
        if n == 0:
            continue
        cand = rng.uniform(a, b, n)
        keep = rng.uniform(0.0, m, n) < np.asarray(rate.rate(cand), dtype=float)
        out.append(cand[keep])
    if not out:
        return np.empty(0)
    return np.sort(np.concatenate(out))


def _homogeneous_arrivals(lam: float, horizon: float,
                          rng: np.random.Generator) -> np.ndarray:
    n = rng.poisson(lam * horizon)
    return np.sort(rng.uniform(0.0, horizon, n))


def _markov_rep(model: QueueModel, horizon: float, warmup: float,
                seed: int, rep: int,
                initial: Optional[int] = None,
                record: Optional[list] = None) -> dict:
    """One replication of the constant-parameter Markovian queue family."""
    rng_a = _stream(seed, rep, _ARRIVAL)
    rng_s = _stream(seed, rep, _SERVICE)
    rng_p = _stream(seed, rep, _PATIENCE)
    lam, mu, s = model.lam, model.mu, int(model.s)
    theta = model.theta or 0.0
    nbuf = model.n

    arrivals = _homogeneous_arrivals(lam, horizon, rng_a)
    n_arr_total = len(arrivals)

    busy = 0
    queue: deque = deque()
    if initial:
        busy = min(initial, s)
        for _ in range(initial - busy):
            queue.append(0.0)
    t = 0.0
    ai = 0
    arrivals_seen = delayed = blocked = abandoned = served = 0
    wait_sum = 0.0
    area_queue = area_empty = area_above = 0.0
    if record is not None:
        record.append((0.0, busy + len(queue)))

    while True:
        q = len(queue)
        rate_dep = mu * busy
        rate_ab = theta * q
        t_dep = t + rng_s.exponential(1.0 / rate_dep) if rate_dep > 0.0 else math.inf
        t_ab = t + rng_p.exponential(1.0 / rate_ab) if rate_ab > 0.0 else math.inf
        t_arr = arrivals[ai] if ai < n_arr_total else math.inf
        t_next = min(t_arr, t_dep, t_ab, horizon)
        if t_next > warmup:
            dt = t_next - max(t, warmup)
            if dt > 0.0:
                area_queue += q * dt
                if busy == 0 and q == 0:
                    area_empty += dt
                if q > 0:
                    area_above += dt
        t = t_next
        if t >= horizon:
            break
        if t_next == t_arr:
            post = t > warmup
            if nbuf is not None and busy + q >= nbuf:
                if post:
                    arrivals_seen += 1
                    blocked += 1
            else:
                if post:
                    arrivals_seen += 1
                if busy < s:
                    busy += 1
                    if post:
                        served += 1
                else:
                    queue.append(t)
                    if post:
                        delayed += 1
            ai += 1
        elif t_next == t_dep:
            busy -= 1
            if queue and busy < s:
                at = queue.popleft()
                busy += 1
                if at > warmup:
                    wait_sum += t - at
                    served += 1
        else:
            i = int(rng_p.integers(len(queue)))
            at = queue[i]
            del queue[i]
            if at > warmup:
                abandoned += 1
        if record is not None:
            record.append((t, busy + len(queue)))

    span = horizon - warmup
    admitted = max(arrivals_seen - blocked, 1)
    return {
        "delay_prob": delayed / admitted,
        "mean_delay": wait_sum / max(served, 1),
        "p_empty": area_empty / span,
        "mean_queue": area_queue / span,
        "frac_above_zero": area_above / span,
        "abandon_prob": abandoned / admitted,
        "block_prob": blocked / max(arrivals_seen, 1),
    }


def _mt_initial_load(model: TimeVaryingModel) -> float:
    if model.initial_load is not None:
        return model.initial_load
    if model.rate.supports_past:
        return model.rate.stationary_offered_load(model.mu)
    return float(model.rate.rate(0.0)) / model.mu


def _mt_rep(model: TimeVaryingModel, horizon: float, warmup: float,
            seed: int, rep: int,
            bins: Optional[np.ndarray] = None,
            bin_delayed: Optional[np.ndarray] = None,
            bin_arrivals: Optional[np.ndarray] = None,
            record: Optional[list] = None,
            record_levels: Optional[list] = None) -> dict:
    """One replication with nonhomogeneous arrivals and a staffing schedule.

    Late switching: a server removed by the schedule finishes its job in
    progress; added servers pull from the queue immediately.  The time-0
    occupancy is drawn from the stationary M/M/s(0) law at the model's
    initial offered load, so a warm-up of one service time suffices.
    """
    rng_a = _stream(seed, rep, _ARRIVAL)
    rng_s = _stream(seed, rep, _SERVICE)
    rng_i = _stream(seed, rep, _INIT)
    sched = model.schedule
    mu = model.mu
    grid = sched.grid
    levels = sched.levels
    nlev = len(levels)

    arrivals = _homogeneous_arrivals(model.rate.level, horizon, rng_a) \
        if hasattr(model.rate, "level") else nhpp_arrivals(model.rate, horizon, rng_a)
    n_arr = len(arrivals)

    s0 = int(levels[0])
    a0 = _mt_initial_load(model)
    if a0 >= s0:
        a0 = 0.99 * s0
    pi0, _ = mms_pi(max(a0, 1e-9), s0)
    n_init = int(np.searchsorted(np.cumsum(pi0), rng_i.uniform()))
    busy = min(n_init, s0)
    queue: deque = deque([0.0] * (n_init - busy))

    t = 0.0
    ai = 0
    gi = int(np.searchsorted(grid, 0.0, side="right")) - 1
    arrivals_seen = delayed = served = 0
    wait_sum = 0.0
    area_queue = 0.0
    if record is not None:
        record.append((0.0, busy + len(queue)))
        record_levels.append(s0)

    while True:
        q = len(queue)
        s_now = int(levels[min(max(gi, 0), nlev - 1)])
        t_bound = grid[gi + 1] if gi + 1 < nlev else math.inf
        t_dep = t + rng_s.exponential(1.0 / (mu * busy)) if busy > 0 else math.inf
        t_arr = arrivals[ai] if ai < n_arr else math.inf
        t_next = min(t_arr, t_dep, t_bound, horizon)
        if t_next > warmup:
            dt = t_next - max(t, warmup)
            if dt > 0.0:
                area_queue += q * dt
        t = t_next
        if t >= horizon:
            break
        if t_next == t_arr:
            post = t > warmup
            if post:
                arrivals_seen += 1
            if bins is not None:
                b = min(int(np.searchsorted(bins, t, side="right")) - 1, len(bin_arrivals) - 1)
                if b >= 0:
                    bin_arrivals[b] += 1
            if busy < s_now and not queue:
                busy += 1
                if post:
                    served += 1
            else:
                queue.append(t)
                if post:
                    delayed += 1
                if bins is not None and b >= 0:
                    bin_delayed[b] += 1
            ai += 1
        elif t_next == t_dep:
            busy -= 1
            if queue and busy < s_now:
                at = queue.popleft()
                busy += 1
                if at > warmup:
                    wait_sum += t - at
                    served += 1
        else:
            gi += 1
            s_now = int(levels[min(gi, nlev - 1)])
            while queue and busy < s_now:
                at = queue.popleft()
                busy += 1
                if at > warmup:
                    wait_sum += t - at
                    served += 1
        if record is not None:
            record.append((t, busy + len(queue)))
            record_levels.append(s_now)

    span = horizon - warmup
    return {
        "delay_prob": delayed / max(arrivals_seen, 1),
        "mean_delay": wait_sum / max(served, 1),
        "mean_queue": area_queue / span,
    }


def _bulk_rep(model: BulkModel, periods: int, warmup: int,
              seed: int, rep: int) -> dict:
    """Reflected-walk recursion over whole periods, vectorized via the
    running-minimum representation of the reflection map."""
    rng = _stream(seed, rep, _ARRIVAL)
    steps = rng.poisson(model.lam, periods) - int(model.s)
    walk = np.cumsum(steps)
    floor = np.minimum.accumulate(np.minimum(walk, 0))
    q = walk - floor
    q = q[warmup:]
    return {"p_empty": float(np.mean(q == 0)), "mean_queue": float(q.mean())}


def _diffusion_run(model: DiffusionModel, horizon: float, warmup: float,
                   replications: int, seed: int,
                   sample_dt: Optional[float] = None):
    """Euler-Maruyama for all replications in lockstep.

    Returns per-replication fractions of time above zero and, if
    ``sample_dt`` is given, the post-warmup state samples at that spacing.
    """
    step = model.step
    beta, theta = model.beta, model.theta
    nsteps = int(round(horizon / step))
    nwarm = int(round(warmup / step))
    every = max(int(round(sample_dt / step)), 1) if sample_dt else 0
    gens = [_stream(seed, r, _SERVICE) for r in range(replications)]
    x = np.zeros(replications)
    above = np.zeros(replications)
    count = 0
    samples = []
    sq = math.sqrt(2.0 * step)
    block = 8192
    done = 0
    while done < nsteps:
        m = min(block, nsteps - done)
        z = np.empty((m, replications))
        for j, gen in enumerate(gens):
            z[:, j] = gen.standard_normal(m)
        for i in range(m):
            drift = np.where(x > 0.0, -beta - theta * x, -beta - x)
            x = x + drift * step + sq * z[i]
            done += 1
            if done > nwarm:
                above += x > 0.0
                count += 1
                if every and (done - nwarm) % every == 0:
                    samples.append(x.copy())
    fracs = above / max(count, 1)
    if sample_dt:
        return fracs, (np.concatenate(samples) if samples else np.empty(0))
    return fracs, None


def diffusion_samples(model: DiffusionModel, horizon: float, warmup: float,
                      sample_dt: float, replications: int, seed: int) -> np.ndarray:
    """Near-stationary state samples of the diffusion, pooled over paths."""
    _, samples = _diffusion_run(model, horizon, warmup, replications, seed,
                                sample_dt=sample_dt)
    return samples


def simulate(config: SimConfig, metrics: Iterable[str]) -> dict:
    """Monte Carlo estimates (with replication-based standard errors).

    ``metrics`` must be applicable to the configured model; estimates are
    deterministic in (seed, replications) regardless of evaluation order.
    """
    kind = _model_kind(config.model)
    names = sorted(set(metrics))
    if not names:
        raise ConfigurationError("no metrics requested")
    allowed = _METRICS_BY_KIND[kind]
    for m in names:
        if m not in allowed:
            raise ConfigurationError("metric %r not available for %s models" % (m, kind))

    if kind in ("mms", "mmsn", "mmsm"):
        model = config.model
        if kind == "mms" and model.rho >= 1.0:
            warnings.warn("rho >= 1: no steady state; estimates are transient only")
        reps = [_markov_rep(model, config.horizon, config.warmup, config.seed, r)
                for r in range(config.replications)]
    elif kind == "mt":
        reps = [_mt_rep(config.model, config.horizon, config.warmup, config.seed, r)
                for r in range(config.replications)]
    elif kind == "bulk":
        periods = int(round(config.horizon))
        warm = int(round(config.warmup))
        reps = [_bulk_rep(config.model, periods, warm, config.seed, r)
                for r in range(config.replications)]
    else:  # diffusion
        fracs, _ = _diffusion_run(config.model, config.horizon, config.warmup,
                                  config.replications, config.seed)
        reps = [{"frac_above_zero": float(f)} for f in fracs]

    return {m: SimEstimate.from_reps(np.array([r[m] for r in reps])) for m in names}


def time_varying_delay_profile(config: SimConfig, bin_width: float = 1.0) -> TimeVaryingProfile:
    """Pooled time-dependent delay probability for a TimeVaryingModel.

    Arrivals are binned by epoch; the profile is (delayed jobs)/(arrivals)
    per bin pooled over replications.  Bins covering the warm-up period
    are dropped.
    """
    if not isinstance(config.model, TimeVaryingModel):
        raise ConfigurationError("delay profile requires a TimeVaryingModel")
    if not (bin_width > 0.0):
        raise DomainError("bin_width must be positive")
    edges = np.arange(0.0, config.horizon + bin_width, bin_width)
    nb = len(edges) - 1
    delayed = np.zeros(nb)
    arrivals = np.zeros(nb)
    for r in range(config.replications):
        _mt_rep(config.model, config.horizon, config.warmup, config.seed, r,
                bins=edges, bin_delayed=delayed, bin_arrivals=arrivals)
    mids = edges[:-1] + bin_width / 2.0
    keep = mids > config.warmup
    p = delayed[keep] / np.maximum(arrivals[keep], 1.0)
    return TimeVaryingProfile(bin_mid=mids[keep], delay_prob=p, arrivals=arrivals[keep])


def sample_path(config: SimConfig, centered: bool = False) -> SamplePath:
    """Occupancy path of a single replication (replication index 0).

    Queue-family paths start at full occupancy (the natural centering
    level); centered scaling maps occupancy q to (q - s)/sqrt(s) with the
    instantaneous server count for time-varying models.
    """
    model = config.model
    kind = _model_kind(model)
    if kind in ("mms", "mmsn", "mmsm"):
        rec: list = []
        _markov_rep(model, config.horizon, 0.0, config.seed, 0,
                    initial=int(model.s), record=rec)
        times = np.array([p[0] for p in rec])
        vals = np.array([p[1] for p in rec], dtype=float)
        if centered:
            s = float(model.s)
            return SamplePath(times, (vals - s) / math.sqrt(s), "centered_scaled")
        return SamplePath(times, vals, "raw")
    if kind == "mt":
        rec, lev = [], []
        _mt_rep(model, config.horizon, 0.0, config.seed, 0,
                record=rec, record_levels=lev)
        times = np.array([p[0] for p in rec])
        vals = np.array([p[1] for p in rec], dtype=float)
        levels = np.array(lev, dtype=float)
        if centered:
            return SamplePath(times, (vals - levels) / np.sqrt(levels),
                              "centered_scaled", levels=levels)
        return SamplePath(times, vals, "raw", levels=levels)
    if kind == "bulk":
        periods = int(round(config.horizon))
        rng = _stream(config.seed, 0, _ARRIVAL)
        steps = rng.poisson(model.lam, periods) - int(model.s)
        walk = np.cumsum(steps)
        q = walk - np.minimum.accumulate(np.minimum(walk, 0))
        times = np.arange(1, periods + 1, dtype=float)
        vals = q.astype(float)
        if centered:
            s = float(model.s)
            return SamplePath(times, (vals - s) / math.sqrt(s), "centered_scaled")
        return SamplePath(times, vals, "raw")
    # diffusion: record every step
    step = model.step
    n = int(round(config.horizon / step))
    gen = _stream(config.seed, 0, _SERVICE)
    x = 0.0
    times = np.arange(1, n + 1) * step
    vals = np.empty(n)
    sq = math.sqrt(2.0 * step)
    z = gen.standard_normal(n)
    beta, theta = model.beta, model.theta
    for i in range(n):
        drift = (-beta - theta * x) if x > 0.0 else (-beta - x)
        x += drift * step + sq * z[i]
        vals[i] = x
    return SamplePath(times, vals, "raw")


def _config_dict(config: SimConfig) -> dict:
    model = config.model
    kind = _model_kind(model)
    d = {"kind": kind, "horizon": config.horizon, "warmup": config.warmup,
         "replications": config.replications, "seed": config.seed}
    if isinstance(model, QueueModel):
        d.update({"lam": model.lam, "mu": model.mu, "s": int(model.s)})
        if model.n is not None:
            d["n"] = int(model.n)
        if model.theta is not None:
            d["theta"] = model.theta
    elif isinstance(model, BulkModel):
        d.update({"lam": model.lam, "s": int(model.s)})
    elif isinstance(model, DiffusionModel):
        d.update({"beta": model.beta, "theta": model.theta, "step": model.step})
    else:
        d.update({"mu": model.mu, "rate": repr(model.rate),
                  "schedule_method": model.schedule.method,
                  "epsilon": model.schedule.epsilon})
    return d


def estimates_csv(estimates: dict, precision: int = 6) -> str:
    lines = ["metric,point,stderr,lo,hi"]
    for name in sorted(estimates):
        e = estimates[name]
        lines.append("%s,%.*g,%.*g,%.*g,%.*g" % (
            name, precision, e.point, precision, e.stderr,
            precision, e.ci95[0], precision, e.ci95[1]))
    return "\n".join(lines) + "\n"


def estimates_json(estimates: dict, config: SimConfig, precision: int = 6) -> str:
    payload = {
        "config": _config_dict(config),
        "estimates": {
            name: {
                "point": round(e.point, precision),
                "stderr": round(e.stderr, precision) if math.isfinite(e.stderr) else None,
                "ci95": [round(e.ci95[0], precision), round(e.ci95[1], precision)],
                "replications": e.replications,
            }
            for name, e in estimates.items()
        },
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def path_csv(path: SamplePath, precision: int = 6) -> str:
    lines = ["time,value"]
    for t, v in zip(path.times, path.values):
        lines.append("%.*g,%.*g" % (precision, t, precision, v))
    return "\n".join(lines) + "\n"

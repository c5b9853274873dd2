"""Seeded Monte Carlo of N ONUs contending in periodic discovery windows.

Online and power-off holding times run on continuous clocks; registration
attempts happen only at window starts ``t_n = n*T``. Every registering ONU
draws a REQ offset uniform on [0, omega] and succeeds iff its REQ interval
[offset, offset + L] overlaps no other REQ. Propagation delay does not enter
the contention; it only lengthens the window M used in delay accounting.

Random streams are keyed by (seed, replication, purpose) and every draw is a
full length-N vector, so ONU ``i`` always consumes column ``i``.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, InsufficientDataError
from .model import SystemParams


class Mode(enum.IntEnum):
    ONLINE = 0
    OFF = 1
    REGISTERING = 2


class _Stream(enum.IntEnum):
    INIT = 0
    OFFSET = 1
    ONLINE_HOLD = 2
    OFF_HOLD = 3


@dataclass(frozen=True)
class OnuState:
    mode: Mode
    next_event_time: float
    turn_on_time: float
    attempts: int


# (rng, size) -> unit-mean holding times; exponential unless overridden
HoldingSampler = Callable[[np.random.Generator, int], np.ndarray]


def _exponential(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.standard_exponential(size)


@dataclass(frozen=True)
class SimConfig:
    params: SystemParams
    init_fraction_r: float = 0.0
    n_cycles: int = 10_000
    burn_in_cycles: Optional[int] = None
    seed: int = 0
    replications: int = 1
    holding_sampler: HoldingSampler = field(default=_exponential, compare=False, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.init_fraction_r <= 1.0:
            raise ConfigError(f"init_fraction_r must lie in [0, 1], got {self.init_fraction_r!r}")
        if int(self.n_cycles) != self.n_cycles or self.n_cycles < 1:
            raise ConfigError(f"n_cycles must be a positive integer, got {self.n_cycles!r}")
        if self.burn_in_cycles is None:
            object.__setattr__(self, "burn_in_cycles", self.n_cycles // 10)
        if not 0 <= self.burn_in_cycles < self.n_cycles:
            raise ConfigError("burn_in_cycles must satisfy 0 <= burn_in < n_cycles")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ConfigError("replications must be a positive integer")


WINDOW_DTYPE = np.dtype(
    [
        ("window_index", np.int64),
        ("time", np.float64),
        ("count_a", np.int64),
        ("count_f", np.int64),
        ("count_r", np.int64),
        ("n_attempts", np.int64),
        ("n_successes", np.int64),
    ]
)

DELAY_DTYPE = np.dtype(
    [
        ("onu_id", np.int64),
        ("turn_on_time", np.float64),
        ("success_time", np.float64),
        ("delay", np.float64),
        ("attempts", np.int64),
        ("residual", np.float64),
    ]
)


@dataclass(frozen=True)
class SteadyState:
    pi_r_hat: float
    pi_r_se: float
    lambda_out_hat: float
    mean_delay_hat: float
    mean_residual_hat: float
    efficiency_hat: float
    n_windows: int
    n_delay_samples: int


@dataclass
class SimTrace:
    config: SimConfig
    replication: int
    per_window: np.ndarray
    delay_samples: np.ndarray
    steady_state: Optional[SteadyState] = None

    @property
    def frac_r(self) -> np.ndarray:
        return self.per_window["count_r"] / self.config.params.n_onus


def resolve_window(offsets, req_len: float) -> np.ndarray:
    """Success flag per REQ: True iff [o, o+L] overlaps no other REQ.

    Two REQs collide when their start offsets differ by less than ``req_len``.
    """
    offsets = np.asarray(offsets, dtype=float)
    n = offsets.size
    if n == 0:
        return np.zeros(0, dtype=bool)
    if n == 1:
        return np.ones(1, dtype=bool)
    order = np.argsort(offsets, kind="stable")
    gaps = np.diff(offsets[order])
    clear = gaps >= req_len
    ok_sorted = np.ones(n, dtype=bool)
    ok_sorted[1:] &= clear
    ok_sorted[:-1] &= clear
    success = np.empty(n, dtype=bool)
    success[order] = ok_sorted
    return success


def _streams(seed: int, replication: int) -> dict[_Stream, np.random.Generator]:
    return {
        s: np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(replication, int(s)))))
        for s in _Stream
    }


def run(config: SimConfig, replication: int = 0) -> SimTrace:
    """Simulate ``config.n_cycles`` discovery windows of one replication."""
    p = config.params
    n = p.n_onus
    T, omega, L, M = p.cycle, p.max_wait, p.req_len, p.window
    sample = config.holding_sampler
    rng = _streams(config.seed, replication)

    mode = np.empty(n, dtype=np.int8)
    next_t = np.full(n, np.inf)
    turn_on = np.zeros(n)
    first_attempt = np.zeros(n)
    attempts = np.zeros(n, dtype=np.int64)

    n_reg = int(round(config.init_fraction_r * n))
    n_online = int(round((n - n_reg) * p.tau_a / (p.tau_a + p.tau_f)))
    mode[:n_reg] = Mode.REGISTERING
    mode[n_reg : n_reg + n_online] = Mode.ONLINE
    mode[n_reg + n_online :] = Mode.OFF
    init_draw = sample(rng[_Stream.INIT], n)
    online = mode == Mode.ONLINE
    off = mode == Mode.OFF
    next_t[online] = p.tau_a * init_draw[online]
    next_t[off] = p.tau_f * init_draw[off]

    per_window = np.zeros(config.n_cycles, dtype=WINDOW_DTYPE)
    delay_chunks = []

    for w in range(config.n_cycles):
        t = w * T
        # flip every clock that expired before this window, possibly several times
        while True:
            due = np.flatnonzero(next_t <= t)
            if due.size == 0:
                break
            due_mode = mode[due]
            to_off = due[due_mode == Mode.ONLINE]
            to_reg = due[due_mode == Mode.OFF]
            if to_off.size:
                hold = sample(rng[_Stream.OFF_HOLD], n)
                mode[to_off] = Mode.OFF
                next_t[to_off] += p.tau_f * hold[to_off]
            if to_reg.size:
                mode[to_reg] = Mode.REGISTERING
                turn_on[to_reg] = next_t[to_reg]
                first_attempt[to_reg] = t
                attempts[to_reg] = 0
                next_t[to_reg] = np.inf

        counts = np.bincount(mode, minlength=3)
        reg = np.flatnonzero(mode == Mode.REGISTERING)
        offsets = rng[_Stream.OFFSET].random(n)[reg] * omega
        won = reg[resolve_window(offsets, L)]
        attempts[reg] += 1

        row = per_window[w]
        row["window_index"] = w
        row["time"] = t
        row["count_a"] = counts[Mode.ONLINE]
        row["count_f"] = counts[Mode.OFF]
        row["count_r"] = counts[Mode.REGISTERING]
        row["n_attempts"] = reg.size
        row["n_successes"] = won.size

        if won.size:
            chunk = np.empty(won.size, dtype=DELAY_DTYPE)
            chunk["onu_id"] = won
            chunk["turn_on_time"] = turn_on[won]
            chunk["success_time"] = t
            chunk["delay"] = (t - turn_on[won]) + M
            chunk["attempts"] = attempts[won]
            chunk["residual"] = first_attempt[won] - turn_on[won]
            delay_chunks.append(chunk)
            hold = sample(rng[_Stream.ONLINE_HOLD], n)
            mode[won] = Mode.ONLINE
            next_t[won] = t + p.tau_a * hold[won]

    if not np.all(per_window["count_a"] + per_window["count_f"] + per_window["count_r"] == n):
        raise AssertionError("ONU count not conserved")
    delays = np.concatenate(delay_chunks) if delay_chunks else np.zeros(0, dtype=DELAY_DTYPE)
    trace = SimTrace(config, replication, per_window, delays)
    try:
        trace.steady_state = estimate_steady_state(trace, config.burn_in_cycles)
    except InsufficientDataError:
        trace.steady_state = None
    return trace


def _run_one(args) -> SimTrace:
    config, replication = args
    return run(config, replication)


def run_replications(config: SimConfig, workers: int = 1) -> list[SimTrace]:
    """All replications of ``config``, ordered by replication index."""
    jobs = [(config, r) for r in range(config.replications)]
    if workers <= 1 or len(jobs) == 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs))


def batch_means(values: np.ndarray, n_batches: int = 30) -> tuple[float, float]:
    """Mean and batch-means standard error of a correlated series."""
    values = np.asarray(values, dtype=float)
    size = values.size // n_batches
    if size < 1:
        raise InsufficientDataError(f"need at least {n_batches} observations, got {values.size}")
    batches = values[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(values.mean()), float(batches.std(ddof=1) / math.sqrt(n_batches))


def estimate_steady_state(trace: SimTrace, burn_in: int, n_batches: int = 30) -> SteadyState:
    p = trace.config.params
    windows = trace.per_window[burn_in:]
    if windows.size == 0 or windows.size < n_batches:
        raise InsufficientDataError(
            f"{trace.per_window.size} windows leave {windows.size} after burn-in {burn_in}"
        )
    pi_hat, pi_se = batch_means(windows["count_r"] / p.n_onus, n_batches)
    lam = float(windows["n_successes"].mean())
    samples = trace.delay_samples
    samples = samples[samples["turn_on_time"] >= burn_in * p.cycle]
    if samples.size:
        mean_delay = float(samples["delay"].mean())
        mean_residual = float(samples["residual"].mean())
    else:
        mean_delay = mean_residual = math.nan
    return SteadyState(
        pi_r_hat=pi_hat,
        pi_r_se=pi_se,
        lambda_out_hat=lam,
        mean_delay_hat=mean_delay,
        mean_residual_hat=mean_residual,
        efficiency_hat=lam / p.window,
        n_windows=int(windows.size),
        n_delay_samples=int(samples.size),
    )

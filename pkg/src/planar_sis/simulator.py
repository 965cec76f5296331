"""Exact event-driven simulation of SIS dynamics with far-random-waypoint motion.

Events are recoveries (rate ``beta`` per infected), uniform-on-torus jumps
(rate ``gamma`` per particle) and infections (rate ``alpha`` times the number
of infected points within the closed ball of radius ``a``, per susceptible).
Waiting times are exponential at the aggregate rate; category and target are
selected proportionally, so trajectories are exact CTMC paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from planar_sis import _engine
from planar_sis.geometry import ModelParams, TorusDomain, sample_poisson

STATE_S = _engine.STATE_S
STATE_I = _engine.STATE_I

ALL_INFECTED = "all_infected"
SINGLE_INFECTED = "single_infected"

DEFAULT_EXTINCTION_CAP = 1.0e5
_SOJOURN_CAP = 1_000_000


def _default_warmup(beta: float) -> float:
    # recovery timescale sets mixing
    return 20.0 / beta if beta > 0 else 0.0


def _default_snapshot_interval(beta: float) -> float:
    return 1.0 / beta if beta > 0 else 1.0


@dataclass
class SimConfig:
    """Configuration for one simulation run.

    ``initial_condition`` is ``"all_infected"``, ``"single_infected"``, or a
    float in [0, 1] interpreted as an independent initial infection
    probability per point.
    """

    params: ModelParams
    dom: TorusDomain
    seed: int
    t_max: float
    initial_condition: object = ALL_INFECTED
    snapshot_interval: Optional[float] = None
    warmup: Optional[float] = None
    collect_snapshots: bool = True
    collect_sojourns: bool = False
    n_batches: int = 10

    def __post_init__(self):
        self.dom.validate_radius(self.params.a)
        if self.warmup is None:
            self.warmup = min(_default_warmup(self.params.beta), 0.5 * self.t_max)
        if self.snapshot_interval is None:
            self.snapshot_interval = _default_snapshot_interval(self.params.beta)
        if not self.t_max > self.warmup >= 0:
            raise ValueError(f"need t_max > warmup >= 0, got {self.t_max}, {self.warmup}")


class SimState:
    """Mutable simulation state: particle arrays plus incremental rate bookkeeping."""

    def __init__(self, config: SimConfig, positions: np.ndarray = None,
                 states: np.ndarray = None):
        self.config = config
        p = config.params
        L = config.dom.side
        ss = np.random.SeedSequence(entropy=config.seed)
        init_seed, engine_seed = ss.spawn(2)
        if positions is None:
            positions = sample_poisson(p.lam, config.dom, init_seed)
        positions = config.dom.wrap(np.asarray(positions, dtype=np.float64))
        n = len(positions)
        if states is None:
            states = self._initial_states(n, config.initial_condition, init_seed)
        # an empty configuration is a legitimate Poisson sample; it is simply
        # absorbed from the start
        self.n = n
        self.pos = np.ascontiguousarray(positions)
        self.state = np.asarray(states, dtype=np.uint8).copy()
        self.cnt = np.zeros(n, dtype=np.int64)
        n_side = max(1, int(L / p.a))
        while n_side > 1 and L / n_side < p.a:
            n_side -= 1
        self.n_side = n_side
        self.cell_edge = L / n_side
        self.head = np.full(n_side * n_side, -1, dtype=np.int64)
        self.nxt = np.full(n, -1, dtype=np.int64)
        self.prv = np.full(n, -1, dtype=np.int64)
        self.cell_id = np.full(n, -1, dtype=np.int64)
        self.inf_list = np.zeros(n, dtype=np.int64)
        self.inf_idx = np.full(n, -1, dtype=np.int64)
        self.sus_list = np.zeros(n, dtype=np.int64)
        self.sus_idx = np.full(n, -1, dtype=np.int64)
        self.ibox = np.zeros(8, dtype=np.int64)
        self.fbox = np.zeros(2, dtype=np.float64)
        self.s_entry = np.full(n, -np.inf, dtype=np.float64)
        cap = _SOJOURN_CAP if config.collect_sojourns else 1
        self.soj_buf = np.zeros(cap, dtype=np.float64)

        _engine.seed_engine(int(engine_seed.generate_state(1, np.uint32)[0]))
        _engine.init_structures(
            self.pos, self.state, self.cnt, self.head, self.nxt, self.prv,
            self.cell_id, self.inf_list, self.inf_idx, self.sus_list,
            self.sus_idx, self.ibox, self.cell_edge, self.n_side, L, p.a)

    @staticmethod
    def _initial_states(n, initial_condition, seed_seq) -> np.ndarray:
        states = np.zeros(n, dtype=np.uint8)
        if initial_condition == ALL_INFECTED:
            states[:] = STATE_I
        elif initial_condition == SINGLE_INFECTED:
            if n:
                states[0] = STATE_I
        else:
            frac = float(initial_condition)
            if not 0.0 <= frac <= 1.0:
                raise ValueError(f"initial fraction must be in [0,1], got {frac}")
            rng = np.random.default_rng(np.random.SeedSequence(
                entropy=seed_seq.entropy, spawn_key=seed_seq.spawn_key + (999,)))
            states[rng.random(n) < frac] = STATE_I
        return states

    # -- rate bookkeeping -------------------------------------------------
    @property
    def t(self) -> float:
        return float(self.fbox[_engine.FB_T])

    @property
    def n_infected(self) -> int:
        return int(self.ibox[_engine.IB_NINF])

    @property
    def total_recovery_rate(self) -> float:
        return self.config.params.beta * self.n_infected

    @property
    def total_jump_rate(self) -> float:
        return self.config.params.gamma * self.n

    @property
    def total_infection_rate(self) -> float:
        return self.config.params.alpha * int(self.ibox[_engine.IB_SW])

    @property
    def event_counts(self) -> dict:
        return {"recovery": int(self.ibox[_engine.IB_REC]),
                "jump": int(self.ibox[_engine.IB_JMP]),
                "infection": int(self.ibox[_engine.IB_INF])}

    def infected_fraction(self) -> float:
        return self.n_infected / self.n if self.n else 0.0

    def audit(self) -> tuple:
        """Exact recount of neighbor bookkeeping; all zeros when consistent."""
        return _engine.audit(self.pos, self.state, self.cnt, self.head, self.nxt,
                             self.ibox, self.cell_edge, self.n_side,
                             self.config.dom.side, self.config.params.a)

    def advance(self, t_end: float, max_events: int = -1) -> int:
        p = self.config.params
        soj_min = self.config.warmup if self.config.collect_sojourns else np.inf
        status = _engine.advance(
            self.pos, self.state, self.cnt, self.head, self.nxt, self.prv,
            self.cell_id, self.inf_list, self.inf_idx, self.sus_list,
            self.sus_idx, self.ibox, self.fbox, self.s_entry, self.soj_buf,
            soj_min, self.config.collect_sojourns,
            p.alpha, p.beta, p.gamma, self.config.dom.side, p.a,
            self.cell_edge, self.n_side, t_end, max_events)
        if status == _engine.STATUS_BROKEN:
            raise RuntimeError("rate bookkeeping inconsistency: total rate 0 "
                               "with infected present")
        return status

    def step(self) -> Optional[str]:
        """Execute a single event; returns its type, or None when no event is
        possible (absorbed or frozen state)."""
        if self.n == 0:
            raise ValueError("step needs at least one particle")
        before = self.event_counts
        self.advance(np.inf, max_events=1)
        after = self.event_counts
        for kind in ("recovery", "jump", "infection"):
            if after[kind] > before[kind]:
                return kind
        return None

    def sojourns(self) -> np.ndarray:
        return self.soj_buf[: int(self.ibox[_engine.IB_SOJ])].copy()


@dataclass
class RunResult:
    """Outcome of :func:`run`: time series, snapshots and summary statistics."""

    times: np.ndarray
    infected_fraction: np.ndarray
    snapshots: list
    p_mean: float
    p_stderr: float
    t_absorb: Optional[float]
    censored: bool
    event_counts: dict
    seed: int
    params: ModelParams
    n_particles: int
    sojourn_times: Optional[np.ndarray] = None
    absorbed: bool = False

    def summary(self) -> dict:
        return {
            "p_mean": self.p_mean,
            "p_stderr": self.p_stderr,
            "t_absorb": self.t_absorb,
            "censored": self.censored,
            "event_counts": self.event_counts,
            "seed": self.seed,
            "params": self.params.as_dict(),
            "n_particles": self.n_particles,
            "absorbed": self.absorbed,
        }


def run(config: SimConfig) -> RunResult:
    """Run to ``t_max`` or absorption; time-average the infected fraction after
    warmup with time-weighted integration of the piecewise-constant path."""
    st = SimState(config)
    n = st.n
    boundaries = [config.warmup] if config.warmup > 0 else []
    n_batches = max(1, config.n_batches)
    batch_len = (config.t_max - config.warmup) / n_batches
    for k in range(1, n_batches):
        boundaries.append(config.warmup + k * batch_len)
    if config.collect_snapshots:
        t = config.warmup
        while t < config.t_max:
            boundaries.append(t)
            t += config.snapshot_interval
    boundaries = sorted(set(b for b in boundaries if 0 < b < config.t_max))
    boundaries.append(config.t_max)

    times = [0.0]
    fracs = [st.infected_fraction()]
    snapshots = []
    marks = []  # (t, accumulated integral of n_inf dt) at segment boundaries
    absorbed = False
    t_absorb = None
    snap_due = config.warmup if config.collect_snapshots else np.inf

    for b in boundaries:
        status = st.advance(b)
        times.append(st.t)
        fracs.append(st.infected_fraction())
        marks.append((st.t, float(st.fbox[_engine.FB_ACC])))
        if status == _engine.STATUS_ABSORBED:
            absorbed = True
            t_absorb = st.t
            break
        if config.collect_snapshots and st.t >= snap_due - 1e-12:
            snapshots.append((st.t, st.pos.copy(), st.state.copy()))
            snap_due = st.t + config.snapshot_interval

    # accumulator value at the warmup boundary (first mark at/after warmup;
    # zero when there is no warmup period at all)
    acc_at_warmup = 0.0
    if config.warmup > 0:
        for t, acc in marks:
            if t >= config.warmup - 1e-12:
                acc_at_warmup = acc
                break
    t_end = t_absorb if absorbed else config.t_max
    span = max(t_end - config.warmup, 0.0)
    acc_total = float(st.fbox[_engine.FB_ACC])
    if n == 0:
        p_mean = 0.0
    else:
        p_mean = (acc_total - acc_at_warmup) / (n * span) if span > 0 \
            else float("nan")

    # batch-means standard error over the post-warmup interval
    post = [(t, acc) for t, acc in marks if t >= config.warmup - 1e-12]
    p_stderr = float("nan")
    if len(post) >= 3 and span > 0:
        ts = np.array([config.warmup] + [t for t, _ in post])
        accs = np.array([acc_at_warmup] + [a for _, a in post])
        dts = np.diff(ts)
        keep = dts > 1e-12
        means = np.diff(accs)[keep] / (n * dts[keep])
        if len(means) >= 2:
            p_stderr = float(np.std(means, ddof=1) / math.sqrt(len(means)))

    return RunResult(
        times=np.asarray(times), infected_fraction=np.asarray(fracs),
        snapshots=snapshots, p_mean=p_mean, p_stderr=p_stderr,
        t_absorb=t_absorb, censored=False, event_counts=st.event_counts,
        seed=config.seed, params=config.params, n_particles=n,
        sojourn_times=st.sojourns() if config.collect_sojourns else None,
        absorbed=absorbed)


@dataclass
class ExtinctionResult:
    t_absorb: float
    censored: bool
    n_particles: int
    event_counts: dict


def run_until_extinction(config: SimConfig,
                         cap: float = DEFAULT_EXTINCTION_CAP) -> ExtinctionResult:
    """First time with zero infected, or a censored result at the time cap."""
    if config.params.beta <= 0:
        raise ValueError("run_until_extinction requires beta > 0")
    st = SimState(config)
    if st.n_infected == 0:
        return ExtinctionResult(0.0, False, st.n, st.event_counts)
    status = st.advance(cap)
    if status == _engine.STATUS_ABSORBED:
        return ExtinctionResult(st.t, False, st.n, st.event_counts)
    return ExtinctionResult(cap, True, st.n, st.event_counts)


def replication_seed(root_seed: int, index: int) -> np.random.SeedSequence:
    """Counter-based seed splitting: replication ``index`` is independent of the
    total replication count."""
    return np.random.SeedSequence(entropy=root_seed, spawn_key=(index,))


def replication_seeds(root_seed: int, n: int) -> list:
    return [int(replication_seed(root_seed, i).generate_state(1, np.uint64)[0])
            for i in range(n)]

import numpy as np
import pytest

from planar_sis.geometry import ModelParams, TorusDomain, torus_distance
from planar_sis.simulator import (SimConfig, SimState, run,
                                  run_until_extinction, replication_seeds,
                                  ALL_INFECTED)
from planar_sis.statistics import dispersion_index

DOM = TorusDomain(20.0)


def two_particle_state(alpha=1.0, beta=1.0, gamma=0.0, states=(0, 1), seed=0):
    p = ModelParams(alpha=alpha, beta=beta, gamma=gamma, lam=1, a=1)
    cfg = SimConfig(params=p, dom=DOM, seed=seed, t_max=1.0,
                    collect_snapshots=False)
    return SimState(cfg, positions=np.array([[5.0, 5.0], [5.5, 5.0]]),
                    states=np.array(states, dtype=np.uint8))


class TestStep:
    def test_single_infected_only_recovery(self):
        p = ModelParams(alpha=1, beta=1, gamma=0, lam=1, a=1)
        cfg = SimConfig(params=p, dom=DOM, seed=1, t_max=1.0,
                        collect_snapshots=False)
        st = SimState(cfg, positions=np.array([[3.0, 3.0]]),
                      states=np.array([1], dtype=np.uint8))
        assert st.step() == "recovery"
        assert st.n_infected == 0

    def test_si_pair_next_event_is_infection(self):
        st = two_particle_state(alpha=1.0, beta=0.0, gamma=0.0, states=(0, 1))
        assert st.step() == "infection"
        assert st.n_infected == 2

    def test_rates_match_definition(self):
        st = two_particle_state(alpha=2.0, beta=3.0, gamma=0.5, states=(0, 1))
        assert st.total_recovery_rate == pytest.approx(3.0)
        assert st.total_jump_rate == pytest.approx(1.0)
        # one susceptible with one infected neighbor
        assert st.total_infection_rate == pytest.approx(2.0)

    def test_audit_exact_after_many_events(self):
        p = ModelParams(alpha=1, beta=2, gamma=1, lam=1, a=1)
        cfg = SimConfig(params=p, dom=TorusDomain(25.0), seed=11, t_max=1e9,
                        collect_snapshots=False)
        st = SimState(cfg)
        st.advance(1e9, max_events=200_000)
        assert sum(st.event_counts.values()) == 200_000
        assert st.audit() == (0, 0, 0)

    def test_population_conserved(self):
        st = two_particle_state(alpha=1.0, beta=1.0, gamma=2.0)
        for _ in range(50):
            if st.step() is None:
                break
        assert int((st.state == 0).sum() + (st.state == 1).sum()) == st.n


class TestRun:
    def test_no_recovery_no_motion_stays_fully_infected(self):
        p = ModelParams(alpha=1, beta=0, gamma=0, lam=0.5, a=1)
        cfg = SimConfig(params=p, dom=DOM, seed=5, t_max=10.0,
                        initial_condition=ALL_INFECTED, warmup=1.0)
        res = run(cfg)
        assert res.p_mean == pytest.approx(1.0)
        assert np.all(res.infected_fraction == 1.0)

    def test_deterministic_given_seed(self):
        p = ModelParams(alpha=1, beta=1, gamma=1, lam=1, a=1)
        cfg = lambda s: SimConfig(params=p, dom=DOM, seed=s, t_max=5.0,
                                  warmup=0.5)
        r1, r2, r3 = run(cfg(9)), run(cfg(9)), run(cfg(10))
        assert r1.p_mean == r2.p_mean
        assert np.array_equal(r1.times, r2.times)
        assert np.array_equal(r1.snapshots[-1][1], r2.snapshots[-1][1])
        assert r1.p_mean != r3.p_mean

    def test_snapshots_spacing_and_shape(self):
        p = ModelParams(alpha=1, beta=1, gamma=0.5, lam=1, a=1)
        cfg = SimConfig(params=p, dom=DOM, seed=2, t_max=6.0, warmup=2.0,
                        snapshot_interval=1.0)
        res = run(cfg)
        ts = [t for t, _, _ in res.snapshots]
        assert ts[0] == pytest.approx(2.0)
        assert len(ts) >= 4
        _, pos, states = res.snapshots[0]
        assert pos.shape[1] == 2 and len(states) == len(pos)

    def test_jumps_only_preserve_poisson(self):
        # alpha = beta = 0: the point process stays statistically Poisson
        p = ModelParams(alpha=1e-300, beta=0, gamma=2.0, lam=1, a=1)
        ratios = []
        for s in range(30):
            cfg = SimConfig(params=p, dom=TorusDomain(12.0), seed=100 + s,
                            t_max=5.0, warmup=0.0, collect_snapshots=False,
                            initial_condition=0.0)
            st = SimState(cfg)
            st.advance(5.0)
            ratio, k = dispersion_index(st.pos, TorusDomain(12.0), 4)
            ratios.append(ratio)
        mean_ratio = np.mean(ratios)
        se = np.sqrt(2.0 / (16 - 1) / len(ratios))
        assert abs(mean_ratio - 1.0) < 3 * se


class TestPublishedDensities:
    def test_medium_recovery_rate_point(self):
        # beta=2, a=1, lambda=1, gamma=1, L=40: published time-averaged
        # infected fraction 0.22; long warmup because the spatial profile
        # relaxes on the motion timescale
        p = ModelParams(alpha=1, beta=2, gamma=1, lam=1, a=1)
        ps = []
        for s in replication_seeds(77, 3):
            cfg = SimConfig(params=p, dom=TorusDomain(40.0), seed=s,
                            t_max=300.0, warmup=100.0,
                            collect_snapshots=False)
            ps.append(run(cfg).p_mean)
        assert abs(float(np.mean(ps)) - 0.22) <= 0.03


class TestExtinction:
    def test_single_particle_exponential_clock(self):
        p = ModelParams(alpha=1, beta=2.0, gamma=0.7, lam=1, a=1)
        times = []
        for s in range(3000):
            cfg = SimConfig(params=p, dom=DOM, seed=s, t_max=1.0,
                            collect_snapshots=False)
            st = SimState(cfg, positions=np.array([[1.0, 1.0]]),
                          states=np.array([1], dtype=np.uint8))
            st.advance(1e12)
            times.append(st.t)
        m = np.mean(times)
        se = np.std(times) / np.sqrt(len(times))
        assert abs(m - 0.5) < 3 * se

    def test_two_particle_first_step_analysis(self):
        # both infected within a, alpha=beta=1, gamma=0: mean = (3b+a)/(2b^2) = 2
        times = []
        for s in range(3000):
            st = two_particle_state(alpha=1.0, beta=1.0, gamma=0.0,
                                    states=(1, 1), seed=s)
            st.advance(1e12)
            times.append(st.t)
        m = np.mean(times)
        se = np.std(times) / np.sqrt(len(times))
        assert abs(m - 2.0) < 3 * se

    def test_zero_infected_absorbs_immediately(self):
        p = ModelParams(alpha=1, beta=1, gamma=0, lam=0.5, a=1)
        cfg = SimConfig(params=p, dom=DOM, seed=3, t_max=10.0,
                        initial_condition=0.0, collect_snapshots=False)
        res = run_until_extinction(cfg)
        assert res.t_absorb == 0.0 and not res.censored

    def test_cap_yields_censored_flag(self):
        p = ModelParams(alpha=5, beta=0.01, gamma=0, lam=2, a=2)
        cfg = SimConfig(params=p, dom=TorusDomain(10.0), seed=4, t_max=10.0,
                        collect_snapshots=False)
        res = run_until_extinction(cfg, cap=2.0)
        assert res.censored and res.t_absorb == 2.0

    def test_requires_positive_beta(self):
        p = ModelParams(alpha=1, beta=0, gamma=0, lam=1, a=1)
        cfg = SimConfig(params=p, dom=DOM, seed=0, t_max=1.0)
        with pytest.raises(ValueError):
            run_until_extinction(cfg)


class TestReplicationSeeds:
    def test_independent_of_count(self):
        assert replication_seeds(7, 3) == replication_seeds(7, 8)[:3]
        assert replication_seeds(7, 4) != replication_seeds(8, 4)


# -- graphical-representation coupling oracle ---------------------------------

def coupled_runs(pos, L, a, alpha, beta, gamma, t_max, initial_sets,
                 sample_times, seed):
    """Shared-event-stream evolution of several initial infected sets.

    Builds per-point recovery and jump streams and per-ordered-pair potential
    infection streams once, then replays them against each initial set, so
    monotonicity holds pathwise.
    """
    rng = np.random.default_rng(seed)
    n = len(pos)
    dom = TorusDomain(L)
    events = []

    def times_of(rate):
        ts = []
        if rate <= 0:
            return ts
        t = rng.exponential(1 / rate)
        while t < t_max:
            ts.append(t)
            t += rng.exponential(1 / rate)
        return ts

    for i in range(n):
        for t in times_of(beta):
            events.append((t, 0, i, None))
        for t in times_of(gamma):
            events.append((t, 1, i, rng.random(2) * L))
        for j in range(n):
            if i != j:
                for t in times_of(alpha):
                    events.append((t, 2, i, j))
    events.sort(key=lambda e: e[0])

    out = {}
    for key, init in initial_sets.items():
        cur = pos.copy()
        infected = set(init)
        samples = []
        k = 0
        for t_s in sample_times:
            while k < len(events) and events[k][0] <= t_s:
                t, kind, i, aux = events[k]
                k += 1
                if kind == 0:
                    infected.discard(i)
                elif kind == 1:
                    cur[i] = aux
                else:
                    j = aux
                    if i in infected and j not in infected \
                            and torus_distance(cur[i], cur[j], dom) <= a:
                        infected.add(j)
            samples.append(frozenset(infected))
        out[key] = samples
    return out


@pytest.mark.parametrize("gamma", [0.0, 0.8])
def test_monotone_coupling_smoke(gamma):
    rng = np.random.default_rng(17)
    pos = rng.random((22, 2)) * 8.0
    A = {0, 1, 2}
    B = A | {3, 4, 5, 6}
    sample_times = [0.5, 1.0, 2.0, 3.5, 5.0]
    for seed in range(6):
        res = coupled_runs(pos, 8.0, 1.0, alpha=1.0, beta=1.0,
                           gamma=gamma, t_max=5.0,
                           initial_sets={"A": A, "B": B},
                           sample_times=sample_times, seed=seed)
        for sa, sb in zip(res["A"], res["B"]):
            assert sa <= sb

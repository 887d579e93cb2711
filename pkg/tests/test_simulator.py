import math
from dataclasses import replace

import numpy as np
import pytest

from mimo_ra.metrics import MetricsTable
from mimo_ra.simulator import (
    SimParams,
    SweepAxis,
    UeEpisode,
    build_context,
    derive_seed,
    resolve_pilot,
    run,
    run_sharded,
    sweep,
)

# Small, fast settings. Physics quality is irrelevant for the bookkeeping
# tests, so m is tiny there; decision-sensitive tests use the default m.
FAST = SimParams(protocol="acbpc", k0=2000, m=16, n_blocks=300, interference=False)


def make_episode(d=100.0, beta=1e-6, power=1.0, rho_norm=1.0, sum_beta_adj=0.0):
    return UeEpisode(
        d=d, beta=beta, beta_known=beta, power=power, rho_norm=rho_norm,
        sum_beta_adj=sum_beta_adj, measured=True,
    )


def test_params_validation():
    with pytest.raises(ValueError):
        SimParams(protocol="aloha")
    with pytest.raises(ValueError):
        SimParams(mode="static")
    with pytest.raises(ValueError):
        SimParams(mode="conditioned")
    with pytest.raises(ValueError):
        SimParams(p_a=0.0)
    with pytest.raises(ValueError):
        SimParams(k0=0)
    with pytest.raises(ValueError):
        SimParams(warmup_frac=1.0)


def test_build_context_defaults():
    ctx = build_context(SimParams(protocol="sucre", interference=False), np.random.default_rng(0))
    # q defaults to the fixed access power, epsilon to -omega_bar/2, and
    # without adjacent cells omega_bar is exactly zero.
    assert ctx.q == ctx.rho_sucre
    assert ctx.omega_bar == 0.0
    assert ctx.epsilon == 0.0

    ctx = build_context(
        SimParams(protocol="sucre", q=2.5, epsilon=-7.0), np.random.default_rng(0)
    )
    assert ctx.q == 2.5
    assert ctx.epsilon == -7.0
    assert ctx.omega_bar > 0.0

    ctx = build_context(SimParams(protocol="sucre"), np.random.default_rng(0))
    assert ctx.epsilon == -ctx.omega_bar / 2


def test_baseline_resolution_is_pure_contention():
    ctx = build_context(replace(FAST, protocol="baseline"), np.random.default_rng(0))
    rng = np.random.default_rng(1)
    none = np.empty(0)
    winner, repeats = resolve_pilot([make_episode()], none, none, ctx, rng)
    assert winner == 0 and repeats == [True]
    winner, repeats = resolve_pilot([make_episode()] * 3, none, none, ctx, rng)
    assert winner is None and repeats == [True, True, True]


def test_sucre_dominant_ue_wins_collision():
    # One UE 100x stronger than the other: its own share exceeds half of
    # alpha, the weak one's does not, so only the strong UE retransmits.
    params = SimParams(protocol="sucre", interference=False)
    ctx = build_context(params, np.random.default_rng(0))
    rng = np.random.default_rng(2)
    strong = make_episode(beta=1e-6, power=ctx.rho_sucre)
    weak = make_episode(beta=1e-8, power=ctx.rho_sucre)
    winner, repeats = resolve_pilot([weak, strong], np.empty(0), np.empty(0), ctx, rng)
    assert winner == 1
    assert repeats == [False, True]


def test_single_ue_always_granted():
    # k0 = 1, p_a = 1: the lone UE contends alone every block and must be
    # admitted on the first attempt, for every protocol.
    for protocol in ("baseline", "sucre", "acbpc"):
        params = SimParams(
            protocol=protocol, k0=1, p_a=1.0, m=64, n_blocks=400, interference=False
        )
        table = run(params, seed=3)
        assert table.failures == 0
        assert table.episodes > 0
        # The baseline involves no estimation at all, so exactly one attempt.
        if protocol == "baseline":
            assert table.avg_attempts_all == 1.0
        else:
            assert table.avg_attempts_all < 1.05


def test_baseline_never_resolves_collisions():
    params = replace(FAST, protocol="baseline", mode="conditioned", n_contenders=2, n_blocks=200)
    table = run(params, seed=4)
    assert table.p_res(2) == 0.0
    assert table.st_total[2] == 200
    one = run(replace(params, n_contenders=1), seed=5)
    assert one.p_res(1) == 1.0


def test_arrival_process_mean_load():
    # With max_attempts = 1 every UE leaves the system after one block, so
    # the offered load is exactly Binomial(k0, p_a) per block and the mean
    # per-pilot contender count is k0 * p_a / tau_p = 1.5.
    params = SimParams(
        protocol="baseline", k0=15000, p_a=1e-3, max_attempts=1,
        n_blocks=3000, interference=False,
    )
    table = run(params, seed=6)
    assert table.avg_contenders == pytest.approx(1.5, abs=0.03)
    # Every episode ends at its first attempt.
    assert set(table.attempts_hist) == {1}


def test_attempt_accounting_invariants():
    table = run(replace(FAST, k0=3000, n_blocks=400), seed=7)
    assert table.episodes == table.successes + table.failures
    assert table.attempts_total == table.attempts_success_total + table.attempts_failed_total
    assert table.attempts_failed_total == table.failures * FAST.max_attempts
    assert sum(table.attempts_hist.values()) == table.episodes
    assert sum(k * v for k, v in table.attempts_hist.items()) == table.attempts_total
    assert all(1 <= k <= FAST.max_attempts for k in table.attempts_hist)
    assert table.bin_episodes.sum() == table.episodes
    assert table.bin_attempts.sum() == table.attempts_total
    assert table.measured_blocks == 400 - round(400 * FAST.warmup_frac)
    assert table.pilot_slots == table.measured_blocks * FAST.tau_p


def test_energy_accounting():
    # Fixed-power protocols: rho_norm = 1, so the energy per episode is
    # attempts * tx_power_watts * tau_p and the power-weighted attempt
    # count equals the attempt count.
    sucre = run(replace(FAST, protocol="sucre", k0=1000, n_blocks=200), seed=8)
    np.testing.assert_allclose(sucre.bin_power_attempts, sucre.bin_attempts)
    np.testing.assert_allclose(
        sucre.bin_energy, sucre.bin_attempts * FAST.tx_power_watts * FAST.tau_p
    )
    # Power control never exceeds the cap, so acbpc spends at most that.
    acbpc = run(replace(FAST, k0=1000, n_blocks=200), seed=8)
    assert np.all(acbpc.bin_power_attempts <= acbpc.bin_attempts + 1e-9)
    assert np.all(
        acbpc.bin_energy <= acbpc.bin_attempts * FAST.tx_power_watts * FAST.tau_p + 1e-9
    )
    assert acbpc.bin_power_attempts.sum() < 0.9 * acbpc.bin_attempts.sum()


def test_determinism_and_seed_sensitivity():
    a = run(FAST, seed=9)
    b = run(FAST, seed=9)
    assert a.episodes == b.episodes
    assert a.attempts_hist == b.attempts_hist
    assert a.st_total == b.st_total and a.st_resolved == b.st_resolved
    np.testing.assert_array_equal(a.bin_energy, b.bin_energy)
    c = run(FAST, seed=10)
    assert a.attempts_hist != c.attempts_hist


def test_merge_adds_counters():
    a = run(replace(FAST, n_blocks=150), seed=11)
    b = run(replace(FAST, n_blocks=150), seed=12)
    m = a.merge(b)
    assert m.episodes == a.episodes + b.episodes
    assert m.attempts_total == a.attempts_total + b.attempts_total
    assert m.measured_blocks == a.measured_blocks + b.measured_blocks
    for k in set(a.st_total) | set(b.st_total):
        assert m.st_total[k] == a.st_total.get(k, 0) + b.st_total.get(k, 0)
    np.testing.assert_array_equal(m.bin_attempts, a.bin_attempts + b.bin_attempts)
    with pytest.raises(ValueError):
        a.merge(MetricsTable(d_min=0.0, d_max=100.0))


def test_run_sharded_splits_measured_blocks():
    params = replace(FAST, n_blocks=100, warmup_frac=0.2)
    whole = run_sharded(params, seed=13, shards=3)
    assert whole.measured_blocks == 80
    assert whole.episodes > 0
    with pytest.raises(ValueError):
        run_sharded(params, shards=0)
    # One shard falls through to a plain run.
    single = run_sharded(params, seed=13, shards=1)
    direct = run(params, seed=13)
    assert single.attempts_hist == direct.attempts_hist


def test_sweep_labels_and_seed_derivation():
    base = replace(FAST, n_blocks=80)
    out = sweep(base, SweepAxis("k0", (500, 1000)), seed=14)
    assert [label for label, _, _ in out] == ["k0=500", "k0=1000"]
    assert [p.k0 for _, p, _ in out] == [500, 1000]
    out = sweep(base, SweepAxis("st", (2,)), seed=14)
    assert out[0][0] == "st=2"
    assert out[0][1].mode == "conditioned" and out[0][1].n_contenders == 2
    direct = run(
        replace(base, mode="conditioned", n_contenders=2), seed=derive_seed(14, 0)
    )
    assert out[0][2].st_total == direct.st_total
    assert out[0][2].st_resolved == direct.st_resolved
    out = sweep(base, SweepAxis("distance"), seed=14)
    assert out[0][0] == "distance"
    with pytest.raises(ValueError):
        sweep(base, SweepAxis("snr", (1,)), seed=14)


def test_conditioned_mode_matches_bound_shape():
    # acbpc without interference stays near (1 - 1/n)^(n - 1); coarse check
    # that the conditioned estimator lands in the right neighbourhood.
    params = SimParams(
        protocol="acbpc", mode="conditioned", n_contenders=3,
        n_blocks=800, interference=False,
    )
    table = run(params, seed=15)
    bound = (1 - 1 / 3) ** 2
    assert table.p_res(3) == pytest.approx(bound, abs=0.08)
    assert table.st_total[3] == 800
    assert table.measured_blocks == 800


def test_conditioned_interference_hurts():
    params = SimParams(
        protocol="acbpc", mode="conditioned", n_contenders=8, n_blocks=2000
    )
    with_intf = run(params, seed=16).p_res(8)
    without = run(replace(params, interference=False), seed=16).p_res(8)
    assert with_intf < without - 0.02


def test_dynamic_attempts_grow_with_load():
    light = run(replace(FAST, protocol="sucre", k0=500, n_blocks=250, m=64), seed=17)
    heavy = run(replace(FAST, protocol="sucre", k0=12000, n_blocks=250, m=64), seed=17)
    assert light.avg_attempts_all < heavy.avg_attempts_all
    assert light.fail_prob < heavy.fail_prob

"""Block-level Monte Carlo of the four-step random access handshake.

Two modes share the per-pilot physics (resolve_pilot):

* dynamic: a K0-strong population wakes with probability P_a per block,
  contends, backs off uniformly on collision and gives up after max_attempts.
  This is the closed loop that produces attempts/failure/energy statistics.
* conditioned: exactly n fresh contenders are placed on one pilot per round,
  which measures P(resolution | |S_t| = n) without the feedback of the loop.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .geometry import (
    DBAR,
    KAPPA,
    SHADOW_SIGMA_DB,
    CellLayout,
    draw_channels,
    perturb_betas,
    place_ues,
    shadowed_gains,
    spawn_interferers,
)
from .metrics import MetricsTable
from .protocols import (
    PROTOCOLS,
    PowerPolicy,
    acbpc_decide,
    cell_edge_tx_power,
    sucre_bias,
    sucre_decide,
)
from .signal_model import (
    DecisionInput,
    downlink_observation,
    estimate_alpha,
    estimate_omega_bar,
    uplink_observation,
)

__all__ = [
    "SimParams",
    "RunContext",
    "UeEpisode",
    "SweepAxis",
    "build_context",
    "derive_seed",
    "resolve_pilot",
    "run",
    "run_sharded",
    "sweep",
]


@dataclass(frozen=True)
class SimParams:
    """Complete description of one simulation configuration."""

    protocol: str = "acbpc"
    k0: int = 15000
    tau_p: int = 10
    m: int = 128
    p_a: float = 1e-3
    sigma2: float = 1.0
    rho_bar: float = 1.0
    q: float | None = None          # None: same as the fixed access power
    epsilon: float | None = None    # None: -omega_bar/2
    sigma_beta: float = 0.0
    interference: bool = True
    max_attempts: int = 10
    backoff_window: int = 10
    n_blocks: int = 5000
    warmup_frac: float = 0.2
    mode: str = "dynamic"
    n_contenders: int | None = None  # conditioned mode only
    d_max: float = 250.0
    d_min: float = 25.0
    shadow_sigma_db: float = SHADOW_SIGMA_DB
    tx_power_watts: float = 0.1      # what the cap rho_max means in watts
    omega_bar_samples: int = 20000

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.mode not in ("dynamic", "conditioned"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "conditioned" and (self.n_contenders is None or self.n_contenders < 1):
            raise ValueError("conditioned mode needs n_contenders >= 1")
        if self.k0 < 1 or self.tau_p < 1 or self.m < 1 or self.n_blocks < 1:
            raise ValueError("k0, tau_p, m and n_blocks must be at least 1")
        if not 0.0 < self.p_a <= 1.0:
            raise ValueError("p_a must be in (0, 1]")
        if self.max_attempts < 1 or self.backoff_window < 1:
            raise ValueError("max_attempts and backoff_window must be at least 1")
        if not 0.0 <= self.warmup_frac < 1.0:
            raise ValueError("warmup_frac must be in [0, 1)")
        if self.sigma2 <= 0 or self.rho_bar <= 0 or self.tx_power_watts <= 0:
            raise ValueError("sigma2, rho_bar and tx_power_watts must be positive")
        if self.sigma_beta < 0:
            raise ValueError("sigma_beta must be nonnegative")


@dataclass(frozen=True)
class RunContext:
    """Per-run derived quantities shared by every block."""

    params: SimParams
    layout: CellLayout
    policy: PowerPolicy
    q: float
    epsilon: float
    omega_bar: float
    rho_sucre: float


class UeEpisode:
    """One UE's access episode: position, gains and power are frozen at
    arrival, only the attempt counter and the backoff wait evolve."""

    __slots__ = ("d", "beta", "beta_known", "power", "rho_norm", "sum_beta_adj",
                 "attempts", "wait", "measured")

    def __init__(self, d, beta, beta_known, power, rho_norm, sum_beta_adj, measured):
        self.d = d
        self.beta = beta
        self.beta_known = beta_known
        self.power = power
        self.rho_norm = rho_norm
        self.sum_beta_adj = sum_beta_adj
        self.attempts = 0
        self.wait = 0
        self.measured = measured


def derive_seed(base_seed: int, index: int) -> int:
    """Stable independent child seed for point index of a sweep."""
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def build_context(params: SimParams, rng) -> RunContext:
    """Fix the power policy, the interference mean and the decision bias."""
    rho_sucre = cell_edge_tx_power(params.sigma2, DBAR, params.d_max, KAPPA)
    policy = PowerPolicy(
        kind=params.protocol, rho_sucre=rho_sucre, rho_bar=params.rho_bar, rho_max=rho_sucre
    )
    layout = CellLayout(d_max=params.d_max, d_min=params.d_min)
    if params.interference:
        omega_bar = estimate_omega_bar(
            layout, params.tau_p, policy, params.omega_bar_samples, rng, params.shadow_sigma_db
        )
    else:
        omega_bar = 0.0
    q = params.q if params.q is not None else rho_sucre
    return RunContext(
        params=params,
        layout=layout,
        policy=policy,
        q=q,
        epsilon=sucre_bias(omega_bar, params.epsilon),
        omega_bar=omega_bar,
        rho_sucre=rho_sucre,
    )


def _spawn_episodes(n: int, ctx: RunContext, rng, measured: bool) -> list[UeEpisode]:
    """n fresh arrivals: position, shadowing, known gain and power, drawn in
    one batch. The adjacent-BS gain sum feeds the downlink interference term."""
    params = ctx.params
    _, _, d, d_adj = place_ues(ctx.layout, n, rng)
    beta, _ = shadowed_gains(d, rng, params.shadow_sigma_db)
    beta_known = perturb_betas(beta, params.sigma_beta, rng)
    power = np.atleast_1d(ctx.policy.power_for(beta_known))
    if params.interference:
        beta_adj, _ = shadowed_gains(d_adj.ravel(), rng, params.shadow_sigma_db)
        sum_adj = beta_adj.reshape(n, -1).sum(axis=1)
    else:
        sum_adj = np.zeros(n)
    return [
        UeEpisode(
            d=float(d[i]),
            beta=float(beta[i]),
            beta_known=float(beta_known[i]),
            power=float(power[i]),
            rho_norm=float(power[i] / ctx.rho_sucre),
            sum_beta_adj=float(sum_adj[i]),
            measured=measured,
        )
        for i in range(n)
    ]


def resolve_pilot(contenders, intf_beta, intf_power, ctx: RunContext, rng):
    """Steps 1-3 on one pilot. Returns (winner, repeats): winner is the index
    of the lone repeater into contenders, or None when zero or several repeat.

    The baseline never runs the physics: everyone always retransmits, so the
    pilot resolves exactly when it was uncontested.
    """
    n = len(contenders)
    params = ctx.params
    if params.protocol == "baseline":
        return (0 if n == 1 else None), [True] * n

    chans = draw_channels(np.array([e.beta for e in contenders]), params.m, rng)
    if len(intf_beta):
        intf = list(zip(draw_channels(intf_beta, params.m, rng), intf_power))
    else:
        intf = []
    obs = uplink_observation(
        list(zip(chans, (e.power for e in contenders))),
        intf,
        tau_p=params.tau_p,
        sigma2=params.sigma2,
        rng=rng,
        m=params.m,
    )
    repeats = []
    for k, e in enumerate(contenders):
        dl_var = ctx.q * params.tau_p * e.sum_beta_adj
        z = downlink_observation(obs, chans[k], ctx.q, params.sigma2, dl_var, rng)
        inp = DecisionInput(
            z=z, rho=e.power, beta=e.beta_known, tau_p=params.tau_p, q=ctx.q,
            sigma2=params.sigma2, omega_bar=ctx.omega_bar, rho_bar=params.rho_bar,
            epsilon=ctx.epsilon,
        )
        est = estimate_alpha(inp, params.m)
        if params.protocol == "sucre":
            dec = sucre_decide(inp, est)
        else:
            dec = acbpc_decide(inp, est, rng)
        repeats.append(dec.repeat)
    wins = [i for i, r in enumerate(repeats) if r]
    return (wins[0] if len(wins) == 1 else None), repeats


def _finish(table: MetricsTable, e: UeEpisode, succeeded: bool, params: SimParams):
    if not e.measured:
        return
    energy = e.attempts * e.rho_norm * params.tx_power_watts * params.tau_p
    table.record_episode(e.d, e.attempts, succeeded, e.rho_norm, energy)


def _run_dynamic(params: SimParams, ctx: RunContext, rng) -> MetricsTable:
    table = MetricsTable(d_min=params.d_min, d_max=params.d_max)
    warmup = int(round(params.n_blocks * params.warmup_frac))
    idle = params.k0
    waiting: list[UeEpisode] = []
    for block in range(params.n_blocks):
        measured = block >= warmup
        n_new = int(rng.binomial(idle, params.p_a))
        idle -= n_new
        contenders = _spawn_episodes(n_new, ctx, rng, measured) if n_new else []
        still = []
        for e in waiting:
            e.wait -= 1
            (contenders if e.wait == 0 else still).append(e)
        waiting = still

        interf = None
        if params.interference:
            interf = spawn_interferers(ctx.layout, params.tau_p, ctx.policy, rng, params.shadow_sigma_db)
        if measured:
            table.record_block(len(contenders), params.tau_p)
        if contenders:
            picks = rng.integers(0, params.tau_p, size=len(contenders))
            by_pilot: dict[int, list[UeEpisode]] = {}
            for e, t in zip(contenders, picks):
                by_pilot.setdefault(int(t), []).append(e)
            for t in sorted(by_pilot):
                group = by_pilot[t]
                if interf is not None:
                    ib, ip = interf.on_pilot(t)
                else:
                    ib, ip = np.empty(0), np.empty(0)
                winner, _ = resolve_pilot(group, ib, ip, ctx, rng)
                if measured:
                    table.record_slot(len(group), winner is not None)
                for k, e in enumerate(group):
                    e.attempts += 1
                    if k == winner:
                        _finish(table, e, True, params)
                        idle += 1
                    elif e.attempts >= params.max_attempts:
                        _finish(table, e, False, params)
                        idle += 1
                    else:
                        e.wait = int(rng.integers(1, params.backoff_window + 1))
                        waiting.append(e)
        assert idle + len(waiting) == params.k0
    return table


def _run_conditioned(params: SimParams, ctx: RunContext, rng) -> MetricsTable:
    """P(resolved | n contenders): fresh UEs and interferers every round."""
    table = MetricsTable(d_min=params.d_min, d_max=params.d_max)
    n = params.n_contenders
    for _ in range(params.n_blocks):
        group = _spawn_episodes(n, ctx, rng, True)
        if params.interference:
            # The six interferers colliding with one home pilot are one
            # uniform UE per adjacent cell, so a tau_p = 1 draw suffices.
            ib, ip = spawn_interferers(
                ctx.layout, 1, ctx.policy, rng, params.shadow_sigma_db
            ).on_pilot(0)
        else:
            ib, ip = np.empty(0), np.empty(0)
        winner, _ = resolve_pilot(group, ib, ip, ctx, rng)
        table.record_slot(n, winner is not None)
        table.record_block(n, 1)
    return table


def run(params: SimParams, seed: int = 0) -> MetricsTable:
    """One full simulation with its own reproducible random stream."""
    ss = np.random.SeedSequence(seed)
    rng_omega, rng_sim = (np.random.default_rng(c) for c in ss.spawn(2))
    ctx = build_context(params, rng_omega)
    if params.mode == "conditioned":
        return _run_conditioned(params, ctx, rng_sim)
    return _run_dynamic(params, ctx, rng_sim)


def _shard_job(args):
    params, seed = args
    return run(params, seed)


def run_sharded(params: SimParams, seed: int = 0, shards: int = 1, workers: int = 1) -> MetricsTable:
    """Split the measured blocks over shards (each with its own warmup and
    stream) and merge. workers > 1 runs shards in separate processes."""
    if shards < 1 or workers < 1:
        raise ValueError("shards and workers must be at least 1")
    if shards == 1:
        return run(params, seed)
    warmup = int(round(params.n_blocks * params.warmup_frac))
    measured = params.n_blocks - warmup
    per = [measured // shards + (1 if i < measured % shards else 0) for i in range(shards)]
    jobs = []
    for i, m_i in enumerate(per):
        if m_i == 0:
            continue
        n_i = warmup + m_i
        p_i = replace(params, n_blocks=n_i, warmup_frac=warmup / n_i)
        jobs.append((p_i, derive_seed(seed, i)))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tables = list(pool.map(_shard_job, jobs))
    else:
        tables = [_shard_job(j) for j in jobs]
    out = tables[0]
    for t in tables[1:]:
        out = out.merge(t)
    return out


@dataclass(frozen=True)
class SweepAxis:
    """What to vary: kind is 'k0' (population sizes), 'st' (conditioned
    contender counts) or 'distance' (one run, binned by the metrics)."""

    kind: str
    values: tuple = ()


def sweep(base: SimParams, axis: SweepAxis, seed: int = 0, workers: int = 1):
    """Run one simulation per axis point. Returns [(label, SimParams,
    MetricsTable)]; an error at any point is re-raised with the point's
    label attached."""
    if axis.kind == "k0":
        points = [
            (f"k0={int(v)}", replace(base, k0=int(v), mode="dynamic", n_contenders=None))
            for v in axis.values
        ]
    elif axis.kind == "st":
        points = [
            (f"st={int(v)}", replace(base, mode="conditioned", n_contenders=int(v)))
            for v in axis.values
        ]
    elif axis.kind == "distance":
        points = [("distance", replace(base, mode="dynamic", n_contenders=None))]
    else:
        raise ValueError(f"unknown sweep axis {axis.kind!r}")
    out = []
    for i, (label, p) in enumerate(points):
        try:
            out.append((label, p, run_sharded(p, seed=derive_seed(seed, i), shards=workers, workers=workers)))
        except Exception as err:
            raise RuntimeError(f"sweep point {label} failed") from err
    return out

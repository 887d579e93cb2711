"""Cell geometry, large-scale fading and small-scale channel generation.

One hexagonal home cell of circumradius d_max with an exclusion disc of
radius d_min around the BS, ringed by the 6 neighbor cells of a hexagonal
tiling (inter-site distance sqrt(3)*d_max). Distances in meters, gains
linear. Path loss model: beta = dbar * d^(-kappa) * chi with log-normal
shadowing chi.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "DBAR",
    "KAPPA",
    "SHADOW_SIGMA_DB",
    "CellLayout",
    "UePosition",
    "LargeScaleGain",
    "ChannelVector",
    "InterfererSet",
    "place_ue",
    "place_ues",
    "large_scale_gain",
    "shadowed_gains",
    "perturb_beta",
    "perturb_betas",
    "draw_channel",
    "draw_channels",
    "spawn_interferers",
    "adjacent_link_gains",
]

DBAR = 10.0 ** (-3.53)
KAPPA = 3.8
SHADOW_SIGMA_DB = 8.0

# Rejection sampling gives up after this many discarded candidates.
_REJECTION_CAP = 1_000_000


@dataclass(frozen=True)
class CellLayout:
    """Home hexagon plus the centers of the 6 adjacent cells."""

    d_max: float = 250.0
    d_min: float = 25.0
    adjacent_offsets: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not self.d_min < self.d_max:
            raise ValueError("d_min must be smaller than d_max")
        if self.adjacent_offsets is None:
            # Vertices of the home hexagon sit at angles 0, 60, ... degrees,
            # so neighbor centers sit on the edge normals at 30, 90, ...
            ang = np.deg2rad(30.0 + 60.0 * np.arange(6))
            off = np.sqrt(3.0) * self.d_max * np.stack([np.cos(ang), np.sin(ang)], axis=1)
            object.__setattr__(self, "adjacent_offsets", off)


@dataclass(frozen=True)
class UePosition:
    """Planar coordinates relative to the home BS, with cached distances."""

    x: float
    y: float
    d: float
    d_adjacent: np.ndarray


@dataclass(frozen=True)
class LargeScaleGain:
    """beta = dbar * d^(-kappa) * chi; beta_known is the UE's own (possibly
    erroneous) copy, None meaning perfect knowledge."""

    beta: float
    chi: float
    beta_known: float | None = None

    @property
    def known(self) -> float:
        return self.beta if self.beta_known is None else self.beta_known


@dataclass(frozen=True)
class ChannelVector:
    """Small-scale CN(0, I_M) vector scaled by sqrt(beta); E||h||^2 = M*beta."""

    h: np.ndarray
    beta: float

    @property
    def m(self) -> int:
        return self.h.shape[-1]


def _in_hexagon(x, y, r):
    # Regular hexagon with a vertex on the +x axis: three edge-normal tests.
    s3 = np.sqrt(3.0)
    return (np.abs(y) <= s3 / 2.0 * r) & (np.abs(s3 * x + y) <= s3 * r) & (np.abs(s3 * x - y) <= s3 * r)


def _sample_hexagon(layout: CellLayout, n: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """n points uniform over the hexagon minus the exclusion disc."""
    r = layout.d_max
    xs = np.empty(n)
    ys = np.empty(n)
    got = 0
    rejected = 0
    while got < n:
        k = max(2 * (n - got), 8)
        cx = rng.uniform(-r, r, size=k)
        cy = rng.uniform(-np.sqrt(3.0) / 2.0 * r, np.sqrt(3.0) / 2.0 * r, size=k)
        ok = _in_hexagon(cx, cy, r) & (cx * cx + cy * cy >= layout.d_min**2)
        nok = int(ok.sum())
        take = min(nok, n - got)
        xs[got : got + take] = cx[ok][:take]
        ys[got : got + take] = cy[ok][:take]
        got += take
        rejected += k - nok
        if rejected > _REJECTION_CAP:
            raise RuntimeError("hexagon rejection sampling exceeded its cap")
    return xs, ys


def place_ue(layout: CellLayout, rng) -> UePosition:
    """Uniform placement in the home cell, at least d_min from the BS."""
    x, y = _sample_hexagon(layout, 1, rng)
    d_adj = np.hypot(x[0] - layout.adjacent_offsets[:, 0], y[0] - layout.adjacent_offsets[:, 1])
    return UePosition(x=float(x[0]), y=float(y[0]), d=float(np.hypot(x[0], y[0])), d_adjacent=d_adj)


def place_ues(layout: CellLayout, n: int, rng):
    """Batch variant of place_ue: arrays x, y, d plus (n, 6) adjacent distances."""
    x, y = _sample_hexagon(layout, n, rng)
    d = np.hypot(x, y)
    off = layout.adjacent_offsets
    d_adj = np.hypot(x[:, None] - off[None, :, 0], y[:, None] - off[None, :, 1])
    return x, y, d, d_adj


def shadowed_gains(d, rng, shadow_sigma_db=SHADOW_SIGMA_DB, *, dbar=DBAR, kappa=KAPPA):
    """Vector core of the path-loss model: returns (beta, chi) for distances d."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distances must be positive")
    # 10*log10(chi) ~ N(0, shadow_sigma_db^2); sigma 0 gives chi exactly 1.
    chi = 10.0 ** (shadow_sigma_db * rng.standard_normal(d.shape) / 10.0)
    return dbar * d ** (-kappa) * chi, chi


def large_scale_gain(d: float, rng, shadow_sigma_db=SHADOW_SIGMA_DB, *, dbar=DBAR, kappa=KAPPA) -> LargeScaleGain:
    """One draw of beta = dbar * d^(-kappa) * chi."""
    beta, chi = shadowed_gains(np.asarray([d]), rng, shadow_sigma_db, dbar=dbar, kappa=kappa)
    return LargeScaleGain(beta=float(beta[0]), chi=float(chi[0]))


def perturb_betas(betas: np.ndarray, sigma_beta: float, rng) -> np.ndarray:
    """beta' = phi*beta with phi ~ N(1, sigma_beta^2), resampled while phi <= 0."""
    if sigma_beta < 0:
        raise ValueError("sigma_beta must be nonnegative")
    phi = 1.0 + sigma_beta * rng.standard_normal(np.shape(betas))
    while True:
        bad = phi <= 0
        if not bad.any():
            break
        phi[bad] = 1.0 + sigma_beta * rng.standard_normal(int(bad.sum()))
    return phi * betas


def perturb_beta(g: LargeScaleGain, sigma_beta: float, rng) -> LargeScaleGain:
    """Attach an imperfect copy beta' to g, leaving beta itself untouched."""
    known = perturb_betas(np.asarray([g.beta]), sigma_beta, rng)
    return replace(g, beta_known=float(known[0]))


def draw_channels(betas, m: int, rng) -> list[ChannelVector]:
    """One CN(0, beta*I_M) vector per entry of betas, from a single draw."""
    betas = np.asarray(betas, dtype=float)
    n = betas.shape[0]
    raw = rng.standard_normal((2, n, m))
    h = np.sqrt(betas / 2.0)[:, None] * (raw[0] + 1j * raw[1])
    return [ChannelVector(h=h[i], beta=float(betas[i])) for i in range(n)]


def draw_channel(beta: float, m: int, rng) -> ChannelVector:
    return draw_channels([beta], m, rng)[0]


def adjacent_link_gains(
    layout: CellLayout,
    n_draws: int,
    rng,
    shadow_sigma_db=SHADOW_SIGMA_DB,
    *,
    dbar=DBAR,
    kappa=KAPPA,
):
    """n_draws independent placements of one UE per adjacent cell.

    Returns (n_draws, 6) arrays: x, y (home-cell coordinates), d_own, d_home,
    beta_own, beta_home. Each UE draws a single shadowing coefficient shared
    by both links, so beta_home/beta_own is the pure pathloss ratio
    (d_home/d_own)^-kappa. Power control in the neighbour cell inverts
    beta_own; a shared coefficient keeps the controlled leakage
    rho*beta_home = rho_bar*(d_home/d_own)^-kappa free of the lognormal
    mean inflation E[chi] that independent per-link draws would add.
    """
    ncells = layout.adjacent_offsets.shape[0]
    lx, ly = _sample_hexagon(layout, n_draws * ncells, rng)
    lx = lx.reshape(n_draws, ncells)
    ly = ly.reshape(n_draws, ncells)
    x = lx + layout.adjacent_offsets[None, :, 0]
    y = ly + layout.adjacent_offsets[None, :, 1]
    d_own = np.hypot(lx, ly)
    d_home = np.hypot(x, y)
    chi = 10.0 ** (shadow_sigma_db * rng.standard_normal(d_own.shape) / 10.0)
    beta_own = dbar * d_own ** (-kappa) * chi
    beta_home = dbar * d_home ** (-kappa) * chi
    return x, y, d_own, d_home, beta_own, beta_home


@dataclass(frozen=True)
class InterfererSet:
    """6*tau_p adjacent-cell UEs, one per (cell, pilot) pair.

    Rows are sorted by pilot, so the 6 UEs colliding with home pilot t are the
    contiguous block [6t, 6t+6).
    """

    tau_p: int
    cell: np.ndarray
    pilot: np.ndarray
    x: np.ndarray
    y: np.ndarray
    d_own: np.ndarray
    d_home: np.ndarray
    beta_own: np.ndarray
    beta_home: np.ndarray
    power: np.ndarray

    @property
    def n_cells(self) -> int:
        return self.cell.shape[0] // self.tau_p

    def on_pilot(self, t: int) -> tuple[np.ndarray, np.ndarray]:
        """(beta_home, power) of the interferers sharing pilot t."""
        k = self.n_cells
        sl = slice(k * t, k * (t + 1))
        return self.beta_home[sl], self.power[sl]


def spawn_interferers(
    layout: CellLayout,
    tau_p: int,
    policy,
    rng,
    shadow_sigma_db=SHADOW_SIGMA_DB,
    *,
    dbar=DBAR,
    kappa=KAPPA,
) -> InterfererSet:
    """tau_p UEs per adjacent cell, each on a distinct pilot of its cell.

    Power is set by the protocol's policy relative to the UE's own BS.
    """
    if tau_p < 1:
        raise ValueError("tau_p must be at least 1")
    ncells = layout.adjacent_offsets.shape[0]
    x, y, d_own, d_home, beta_own, beta_home = adjacent_link_gains(
        layout, tau_p, rng, shadow_sigma_db, dbar=dbar, kappa=kappa
    )
    power = policy.power_for(beta_own)
    # Row r of cell c gets pilot perm[r, c]; argsort of uniforms is a uniform
    # permutation per column.
    perm = np.argsort(rng.random((tau_p, ncells)), axis=0)
    cell = np.broadcast_to(np.arange(ncells), (tau_p, ncells))
    order = np.argsort(perm.ravel(), kind="stable")

    def flat(a):
        return np.ascontiguousarray(a.ravel()[order])

    return InterfererSet(
        tau_p=tau_p,
        cell=flat(cell),
        pilot=flat(perm),
        x=flat(x),
        y=flat(y),
        d_own=flat(d_own),
        d_home=flat(d_home),
        beta_own=flat(beta_own),
        beta_home=flat(beta_home),
        power=flat(power),
    )

"""Post-correlation physical layer of the two access handshake steps.

Pilots are orthonormal, so everything is simulated after correlation:
Step 1 at the BS reduces to y = sum_i sqrt(rho_i*tau_p)*h_i + n per pilot,
and Step 2 at UE k to the scalar z_k = sqrt(q*tau_p)*h_k^T y*/||y|| + nu + eta.
Channel hardening (||y||^2/M -> alpha + sigma2) is what makes the
decentralized estimators below work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import CellLayout, ChannelVector, adjacent_link_gains

__all__ = [
    "PilotObservation",
    "DecisionInput",
    "AlphaEstimate",
    "uplink_observation",
    "downlink_observation",
    "gamma_ratio_sq",
    "estimate_alpha",
    "estimate_contenders",
    "estimate_omega_bar",
]

# Re(z)^2 below this is treated as the degenerate (measure-zero) case.
_RE_Z_SQ_FLOOR = 1e-30


@dataclass(frozen=True)
class PilotObservation:
    """What the BS holds for one pilot after Step-1 correlation.

    alpha is the exact sum of rho*beta*tau_p over contenders, omega the same
    sum over the interferers on this pilot; y = signal + interference + noise.
    """

    t: int
    y: np.ndarray
    signal: np.ndarray
    interference: np.ndarray
    noise: np.ndarray
    alpha: float
    omega: float
    tau_p: int
    contenders: tuple[int, ...]

    @property
    def n_contenders(self) -> int:
        return len(self.contenders)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.y))


@dataclass(slots=True)
class DecisionInput:
    """What one UE knows in Step 2: its scalar observation plus its own
    transmit parameters (beta is the UE's known copy, possibly erroneous)."""

    z: complex
    rho: float
    beta: float
    tau_p: int
    q: float
    sigma2: float
    omega_bar: float
    rho_bar: float
    epsilon: float


@dataclass(frozen=True, slots=True)
class AlphaEstimate:
    alpha_hat: float
    gamma_sq: float
    floor: float
    degenerate: bool = False


def uplink_observation(
    contenders,
    interferers_on_pilot,
    tau_p: int,
    sigma2: float,
    rng,
    *,
    m: int | None = None,
    pilot: int = 0,
) -> PilotObservation:
    """Superpose contender and interferer pilots and add receiver noise.

    contenders / interferers_on_pilot: sequences of (ChannelVector, power).
    """
    chans = list(contenders)
    intf = list(interferers_on_pilot)
    for cv, p in chans + intf:
        if p <= 0:
            raise ValueError("transmit powers must be positive")
        if m is None:
            m = cv.m
        elif cv.m != m:
            raise ValueError("channel vectors disagree on M")
    if m is None:
        raise ValueError("m is required when no channels are given")

    def superpose(pairs):
        out = np.zeros(m, dtype=complex)
        for cv, p in pairs:
            out += math.sqrt(p * tau_p) * cv.h
        return out

    signal = superpose(chans)
    interference = superpose(intf)
    raw = rng.standard_normal((2, m))
    noise = math.sqrt(sigma2 / 2.0) * (raw[0] + 1j * raw[1])
    alpha = float(sum(p * cv.beta * tau_p for cv, p in chans))
    omega = float(sum(p * cv.beta * tau_p for cv, p in intf))
    return PilotObservation(
        t=pilot,
        y=signal + interference + noise,
        signal=signal,
        interference=interference,
        noise=noise,
        alpha=alpha,
        omega=omega,
        tau_p=tau_p,
        contenders=tuple(range(len(chans))),
    )


def downlink_observation(
    obs: PilotObservation,
    ue_channel: ChannelVector,
    q: float,
    sigma2: float,
    dl_interference_var: float,
    rng,
) -> complex:
    """z = sqrt(q*tau_p) * h^T y* / ||y|| + nu + eta for one UE.

    nu is the Gaussian surrogate for the adjacent BSs' precoded downlink
    (variance dl_interference_var), eta the receiver noise (variance sigma2).
    """
    nrm = obs.norm
    if nrm <= 0.0:
        raise ValueError("downlink needs a nonzero uplink observation")
    proj = ue_channel.h @ np.conj(obs.y)
    raw = rng.standard_normal(4)
    nu = math.sqrt(dl_interference_var / 2.0) * (raw[0] + 1j * raw[1])
    eta = math.sqrt(sigma2 / 2.0) * (raw[2] + 1j * raw[3])
    return complex(math.sqrt(q * obs.tau_p) * proj / nrm + nu + eta)


def gamma_ratio_sq(m) -> float:
    """[Gamma(M + 1/2) / Gamma(M)]^2, in log domain; lies in (M - 1/2, M)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return math.exp(2.0 * (math.lgamma(m + 0.5) - math.lgamma(m)))


def estimate_alpha(inp: DecisionInput, m: int) -> AlphaEstimate:
    """The UE's hardening-based estimate of the total received pilot power.

    alpha_hat = max(gamma_ratio_sq(M)*q*rho*beta^2*tau_p^2 / Re(z)^2 - sigma2,
                    rho*beta*tau_p), using the UE's known beta.
    """
    g2 = gamma_ratio_sq(m)
    floor = inp.rho * inp.beta * inp.tau_p
    re_sq = inp.z.real * inp.z.real
    if re_sq < _RE_Z_SQ_FLOOR:
        return AlphaEstimate(alpha_hat=floor, gamma_sq=g2, floor=floor, degenerate=True)
    raw = g2 * inp.q * inp.rho * inp.beta**2 * inp.tau_p**2 / re_sq - inp.sigma2
    return AlphaEstimate(alpha_hat=max(raw, floor), gamma_sq=g2, floor=floor)


def estimate_contenders(est: AlphaEstimate, omega_bar: float, rho_bar: float, tau_p: int) -> float:
    """Contender-count estimate (alpha_hat - omega_bar)/(rho_bar*tau_p),
    clamped below at 1. Fractional values are kept as-is."""
    if rho_bar <= 0:
        raise ValueError("rho_bar must be positive")
    if tau_p < 1:
        raise ValueError("tau_p must be at least 1")
    if omega_bar < 0:
        raise ValueError("omega_bar must be nonnegative")
    return max((est.alpha_hat - omega_bar) / (rho_bar * tau_p), 1.0)


def estimate_omega_bar(
    layout: CellLayout,
    tau_p: int,
    policy,
    n_samples: int,
    rng,
    shadow_sigma_db=None,
    *,
    dbar=None,
    kappa=None,
) -> float:
    """Monte Carlo mean of the per-pilot interference power omega_t.

    One sample is one independent placement of a single UE per adjacent cell,
    so n_samples=1 reproduces a single-draw omega_t.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if layout.adjacent_offsets.shape[0] == 0:
        return 0.0
    kwargs = {}
    if shadow_sigma_db is not None:
        kwargs["shadow_sigma_db"] = shadow_sigma_db
    if dbar is not None:
        kwargs["dbar"] = dbar
    if kappa is not None:
        kwargs["kappa"] = kappa
    _, _, _, _, beta_own, beta_home = adjacent_link_gains(layout, n_samples, rng, **kwargs)
    power = policy.power_for(beta_own)
    omega = tau_p * np.sum(power * beta_home, axis=1)
    return float(omega.mean())

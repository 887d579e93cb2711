"""Step-3 decision rules, transmit-power policies and the resolution bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signal_model import AlphaEstimate, DecisionInput, estimate_contenders

__all__ = [
    "PROTOCOLS",
    "PowerPolicy",
    "Decision",
    "cell_edge_tx_power",
    "tx_power",
    "sucre_bias",
    "sucre_decide",
    "acbpc_decide",
    "baseline_decide",
    "p_res_bound",
]

PROTOCOLS = ("sucre", "acbpc", "baseline")


def cell_edge_tx_power(sigma2: float, dbar: float, d_max: float, kappa: float) -> float:
    """Fixed access power sigma2/(dbar*d_max^(-kappa)): a cell-edge UE without
    shadowing is received at exactly the noise level."""
    return sigma2 / (dbar * d_max ** (-kappa))


@dataclass(frozen=True)
class PowerPolicy:
    """Step-1 transmit-power rule.

    'sucre' and 'baseline' UEs always transmit at rho_sucre; 'acbpc' UEs
    invert their known gain, capped at rho_max.
    """

    kind: str
    rho_sucre: float
    rho_bar: float
    rho_max: float

    def __post_init__(self):
        if self.kind not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.kind!r}")
        if self.rho_bar <= 0 or self.rho_max <= 0 or self.rho_sucre <= 0:
            raise ValueError("policy powers must be positive")

    def power_for(self, beta_known):
        """Vector-friendly form of tx_power."""
        beta = np.asarray(beta_known, dtype=float)
        if np.any(beta <= 0):
            raise ValueError("beta must be positive")
        if self.kind == "acbpc":
            out = np.minimum(self.rho_bar / beta, self.rho_max)
        else:
            out = np.broadcast_to(self.rho_sucre, beta.shape).copy()
        return out if out.ndim else float(out)


def tx_power(policy: PowerPolicy, beta_known: float) -> float:
    """Transmit power for a UE whose known large-scale gain is beta_known."""
    return policy.power_for(beta_known)


@dataclass(frozen=True, slots=True)
class Decision:
    """Step-3 outcome plus diagnostics (alpha_hat always; s_hat/zeta for the
    barring rule, margin for the strongest-user rule)."""

    repeat: bool
    alpha_hat: float = math.nan
    s_hat: float = math.nan
    zeta: float = math.nan
    margin: float = math.nan


def sucre_bias(omega_bar: float, override: float | None = None) -> float:
    """Decision bias epsilon. Default -omega_bar/2 centers the rule: the
    power estimate systematically contains omega_bar/2 of interference."""
    if override is not None:
        return override
    if omega_bar < 0:
        raise ValueError("omega_bar must be nonnegative")
    return -omega_bar / 2.0


def sucre_decide(inp: DecisionInput, est: AlphaEstimate) -> Decision:
    """Repeat iff the UE's own received power exceeds half the estimated
    total plus the bias (strict inequality)."""
    own = inp.rho * inp.beta * inp.tau_p
    margin = own - (est.alpha_hat / 2.0 + inp.epsilon)
    return Decision(repeat=margin > 0.0, alpha_hat=est.alpha_hat, margin=margin)


def acbpc_decide(inp: DecisionInput, est: AlphaEstimate, rng) -> Decision:
    """Retransmit with probability 1/s_hat (the barring factor)."""
    s_hat = estimate_contenders(est, inp.omega_bar, inp.rho_bar, inp.tau_p)
    zeta = min(1.0 / s_hat, 1.0)
    return Decision(repeat=rng.random() < zeta, alpha_hat=est.alpha_hat, s_hat=s_hat, zeta=zeta)


def baseline_decide() -> Decision:
    """No Step-3 logic: always retransmit, collisions never resolve."""
    return Decision(repeat=True)


def p_res_bound(n_contenders: int) -> float:
    """(1 - 1/n)^(n-1): resolution probability under a perfect contender-count
    estimate. n=1 returns 1 (0^0 convention); decreases toward 1/e."""
    if n_contenders < 1:
        raise ValueError("n_contenders must be at least 1")
    n = n_contenders
    if n == 1:
        return 1.0
    return math.exp((n - 1) * math.log1p(-1.0 / n))

"""Mergeable counters for the Monte Carlo runs.

A MetricsTable is a plain bag of sums, so shards produced with different seeds
can be merged exactly: merge(a, b) commutes and never loses information.
Derived quantities (averages, probabilities) are computed on read.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["MetricsTable", "N_DISTANCE_BINS"]

N_DISTANCE_BINS = 9


def _zeros():
    return np.zeros(N_DISTANCE_BINS)


@dataclass
class MetricsTable:
    """Counters accumulated over measured blocks and finished episodes.

    Episode counters are updated once, when an episode terminates; per-slot
    counters (contender load, |S_t| resolution table) once per measured block.
    Failed episodes count max_attempts attempts in attempts_total, so
    avg_attempts_all is the budget including failures.
    """

    d_min: float = 25.0
    d_max: float = 250.0

    episodes: int = 0
    successes: int = 0
    failures: int = 0
    attempts_total: int = 0
    attempts_success_total: int = 0
    attempts_failed_total: int = 0
    attempts_hist: dict[int, int] = field(default_factory=dict)

    st_total: dict[int, int] = field(default_factory=dict)
    st_resolved: dict[int, int] = field(default_factory=dict)

    contender_sum: int = 0
    pilot_slots: int = 0
    measured_blocks: int = 0

    bin_episodes: np.ndarray = field(default_factory=_zeros)
    bin_successes: np.ndarray = field(default_factory=_zeros)
    bin_failures: np.ndarray = field(default_factory=_zeros)
    bin_attempts: np.ndarray = field(default_factory=_zeros)
    bin_power_attempts: np.ndarray = field(default_factory=_zeros)
    bin_energy: np.ndarray = field(default_factory=_zeros)

    def distance_bin(self, d: float) -> int:
        width = (self.d_max - self.d_min) / N_DISTANCE_BINS
        b = int((d - self.d_min) / width)
        return min(max(b, 0), N_DISTANCE_BINS - 1)

    def record_episode(self, d: float, attempts: int, succeeded: bool, rho_norm: float, energy: float):
        b = self.distance_bin(d)
        self.episodes += 1
        self.attempts_total += attempts
        self.attempts_hist[attempts] = self.attempts_hist.get(attempts, 0) + 1
        if succeeded:
            self.successes += 1
            self.attempts_success_total += attempts
            self.bin_successes[b] += 1
        else:
            self.failures += 1
            self.attempts_failed_total += attempts
            self.bin_failures[b] += 1
        self.bin_episodes[b] += 1
        self.bin_attempts[b] += attempts
        self.bin_power_attempts[b] += rho_norm * attempts
        self.bin_energy[b] += energy

    def record_slot(self, n_contenders: int, resolved: bool):
        """One pilot of one measured block with n_contenders >= 1 on it."""
        self.st_total[n_contenders] = self.st_total.get(n_contenders, 0) + 1
        if resolved:
            self.st_resolved[n_contenders] = self.st_resolved.get(n_contenders, 0) + 1

    def record_block(self, n_contenders: int, tau_p: int):
        self.measured_blocks += 1
        self.pilot_slots += tau_p
        self.contender_sum += n_contenders

    # Derived quantities.

    @property
    def avg_attempts_all(self) -> float:
        return self.attempts_total / self.episodes if self.episodes else math.nan

    @property
    def avg_attempts_success(self) -> float:
        return self.attempts_success_total / self.successes if self.successes else math.nan

    @property
    def fail_prob(self) -> float:
        return self.failures / self.episodes if self.episodes else math.nan

    @property
    def avg_contenders(self) -> float:
        """Mean contender count per pilot slot, empty slots included."""
        return self.contender_sum / self.pilot_slots if self.pilot_slots else math.nan

    def p_res(self, n_contenders: int) -> float:
        tot = self.st_total.get(n_contenders, 0)
        if not tot:
            return math.nan
        return self.st_resolved.get(n_contenders, 0) / tot

    def st_rows(self):
        """(n, p_res, n_samples) for every observed contender count, ascending."""
        return [(n, self.p_res(n), self.st_total[n]) for n in sorted(self.st_total)]

    def bin_rows(self):
        """Per distance bin: (lo, hi, avg_attempts, fail_prob, p_res,
        avg_power_norm, avg_energy) with nan where the bin is empty."""
        width = (self.d_max - self.d_min) / N_DISTANCE_BINS
        rows = []
        for b in range(N_DISTANCE_BINS):
            eps = self.bin_episodes[b]
            att = self.bin_attempts[b]
            rows.append((
                self.d_min + b * width,
                self.d_min + (b + 1) * width,
                self.bin_attempts[b] / eps if eps else math.nan,
                self.bin_failures[b] / eps if eps else math.nan,
                self.bin_successes[b] / att if att else math.nan,
                self.bin_power_attempts[b] / att if att else math.nan,
                self.bin_energy[b] / eps if eps else math.nan,
            ))
        return rows

    def merge(self, other: "MetricsTable") -> "MetricsTable":
        if (self.d_min, self.d_max) != (other.d_min, other.d_max):
            raise ValueError("cannot merge tables with different distance bins")
        out = MetricsTable(d_min=self.d_min, d_max=self.d_max)
        for name in (
            "episodes", "successes", "failures", "attempts_total",
            "attempts_success_total", "attempts_failed_total",
            "contender_sum", "pilot_slots", "measured_blocks",
        ):
            setattr(out, name, getattr(self, name) + getattr(other, name))
        for name in ("attempts_hist", "st_total", "st_resolved"):
            merged = dict(getattr(self, name))
            for k, v in getattr(other, name).items():
                merged[k] = merged.get(k, 0) + v
            setattr(out, name, merged)
        for name in (
            "bin_episodes", "bin_successes", "bin_failures", "bin_attempts",
            "bin_power_attempts", "bin_energy",
        ):
            setattr(out, name, getattr(self, name) + getattr(other, name))
        return out

"""Independent Monte Carlo oracle: simulates exponential Brownian motion
with exact lognormal increments and estimates every analytic quantity with
standard errors.

Reproducibility contract: the normal draws for path i come from a
counter-based Philox stream keyed by (seed, i), and per-block partial sums
are combined in block-index order, so estimates are bit-identical for any
thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numpy.random import Generator, Philox

from .moments import GbmParams
from .pricing import normal_inv_cdf

__all__ = [
    "McConfig",
    "McEstimate",
    "FloatingStrikeAsianCall",
    "FixedStrikeAsianCall",
    "simulate_terminal_and_average",
    "iter_terminal_and_average",
    "estimate_moment_A",
    "estimate_correlation",
    "estimate_payoff",
    "estimate_suite",
]

BLOCK_PATHS = 4096   # fixed block size: the reduction tree must not depend on scheduling
CORR_BATCHES = 32    # batch-means batches for nonlinear statistics

_AVERAGING = ("trapezoid", "left-riemann")
_U_LO = 2.0 ** -55
_U_HI = 1.0 - 2.0 ** -53


@dataclass(frozen=True)
class McConfig:
    """Simulation controls: path count, time steps, 64-bit seed, and the
    path-averaging rule (trapezoid has O(1/steps^2) bias, left-riemann
    O(1/steps))."""

    paths: int
    steps: int
    seed: int
    averaging: str = "trapezoid"

    def __post_init__(self):
        if self.paths < 2:
            raise ValueError("need at least 2 paths")
        if self.steps < 1:
            raise ValueError("need at least 1 step")
        if self.averaging not in _AVERAGING:
            raise ValueError(f"averaging must be one of {_AVERAGING}")
        object.__setattr__(self, "seed", int(self.seed) & (2 ** 64 - 1))


@dataclass(frozen=True)
class McEstimate:
    value: float
    stderr: float
    paths_used: int

    def to_dict(self, cfg: McConfig) -> dict:
        return {"value": self.value, "stderr": self.stderr,
                "paths": self.paths_used, "steps": cfg.steps, "seed": cfg.seed}


@dataclass(frozen=True)
class FloatingStrikeAsianCall:
    """Payoff (S(T) - A(T))^+."""


@dataclass(frozen=True)
class FixedStrikeAsianCall:
    """Payoff (A(T) - K)^+."""

    strike: float

    def __post_init__(self):
        if not (math.isfinite(self.strike) and self.strike >= 0):
            raise ValueError("strike must be finite and nonnegative")


def _block_ranges(paths: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + BLOCK_PATHS, paths)) for lo in range(0, paths, BLOCK_PATHS)]


def _simulate_block(p: GbmParams, cfg: McConfig, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact-increment simulation of paths [lo, hi): returns (S(T), A_hat)."""
    n = hi - lo
    steps = cfg.steps
    u = np.empty((n, steps))
    for row, path in enumerate(range(lo, hi)):
        key = np.array([cfg.seed, path], dtype=np.uint64)
        u[row] = Generator(Philox(key=key)).random(steps)
    z = normal_inv_cdf(np.clip(u, _U_LO, _U_HI))
    dt = p.T / steps
    log_inc = (p.r - 0.5 * p.sigma ** 2) * dt + p.sigma * math.sqrt(dt) * z
    log_s = np.cumsum(log_inc, axis=1)
    s_T = np.exp(log_s[:, -1])
    # grid values S(0)=1, S(t_1), ..., S(T)
    s_grid = np.exp(log_s)
    if cfg.averaging == "trapezoid":
        a_hat = (0.5 + s_grid[:, :-1].sum(axis=1) + 0.5 * s_grid[:, -1]) / steps
    else:
        a_hat = (1.0 + s_grid[:, :-1].sum(axis=1)) / steps
    return s_T, a_hat


def iter_terminal_and_average(p: GbmParams, cfg: McConfig,
                              threads: int = 1) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Stream of per-block (S(T), A_hat) arrays in block order; block
    contents do not depend on the thread count."""
    ranges = _block_ranges(cfg.paths)
    if threads <= 1:
        for lo, hi in ranges:
            yield _simulate_block(p, cfg, lo, hi)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(lambda r: _simulate_block(p, cfg, *r), ranges)


def simulate_terminal_and_average(p: GbmParams, cfg: McConfig,
                                  threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """All (S(T), A_hat) pairs as two arrays of length cfg.paths."""
    s_parts, a_parts = [], []
    for s_T, a_hat in iter_terminal_and_average(p, cfg, threads=threads):
        s_parts.append(s_T)
        a_parts.append(a_hat)
    return np.concatenate(s_parts), np.concatenate(a_parts)


def _mean_stderr(block_stats: list[tuple[float, float, int]]) -> McEstimate:
    """Combine per-block (sum x, sum x^2, count) in block order."""
    sx = math.fsum(s for s, _, _ in block_stats)
    sxx = math.fsum(q for _, q, _ in block_stats)
    n = sum(c for _, _, c in block_stats)
    mean = sx / n
    var = max(sxx - n * mean * mean, 0.0) / (n - 1)
    return McEstimate(value=mean, stderr=math.sqrt(var / n), paths_used=n)


def estimate_moment_A(p: GbmParams, cfg: McConfig, m: int, threads: int = 1) -> McEstimate:
    """Sample mean of A_hat^m with standard error.  Carries the quadrature
    discretization bias of the averaging rule, O(1/steps^2) for trapezoid."""
    if m < 0:
        raise ValueError("moment order must be nonnegative")
    stats = []
    for _, a_hat in iter_terminal_and_average(p, cfg, threads=threads):
        x = a_hat ** m
        stats.append((float(x.sum()), float((x * x).sum()), len(x)))
    return _mean_stderr(stats)


def estimate_payoff(p: GbmParams, cfg: McConfig, payoff, threads: int = 1) -> McEstimate:
    """Discounted sample mean of the Asian payoff with standard error."""
    disc = math.exp(-p.r * p.T)
    stats = []
    for s_T, a_hat in iter_terminal_and_average(p, cfg, threads=threads):
        if isinstance(payoff, FloatingStrikeAsianCall):
            x = disc * np.maximum(s_T - a_hat, 0.0)
        elif isinstance(payoff, FixedStrikeAsianCall):
            x = disc * np.maximum(a_hat - payoff.strike, 0.0)
        else:
            raise ValueError(f"unknown payoff: {payoff!r}")
        stats.append((float(x.sum()), float((x * x).sum()), len(x)))
    return _mean_stderr(stats)


def _batch_moment_matrix(p: GbmParams, cfg: McConfig, threads: int) -> np.ndarray:
    """Per-batch accumulators [n, sum S, sum A, sum S^2, sum A^2, sum SA],
    batches assigned by path index, combined in block order."""
    acc = np.zeros((CORR_BATCHES, 6))
    lo = 0
    for s_T, a_hat in iter_terminal_and_average(p, cfg, threads=threads):
        n = len(s_T)
        batch = (np.arange(lo, lo + n) * CORR_BATCHES) // cfg.paths
        cols = np.stack([np.ones(n), s_T, a_hat, s_T * s_T, a_hat * a_hat, s_T * a_hat], axis=1)
        np.add.at(acc, batch, cols)
        lo += n
    return acc


def _pearson(row: np.ndarray) -> float:
    n, ss, sa, sss, saa, ssa = row
    cov = ssa / n - (ss / n) * (sa / n)
    vs = sss / n - (ss / n) ** 2
    va = saa / n - (sa / n) ** 2
    return cov / math.sqrt(vs * va)


def estimate_correlation(p: GbmParams, cfg: McConfig, threads: int = 1) -> McEstimate:
    """Sample Pearson correlation of (S(T), A_hat); the standard error comes
    from batch means over CORR_BATCHES path batches."""
    if p.sigma == 0:
        raise ValueError("correlation undefined for deterministic paths")
    if cfg.paths < 2 * CORR_BATCHES:
        raise ValueError(f"need at least {2 * CORR_BATCHES} paths for batch means")
    acc = _batch_moment_matrix(p, cfg, threads)
    pooled = _pearson(acc.sum(axis=0))
    batch_r = np.array([_pearson(row) for row in acc])
    stderr = float(batch_r.std(ddof=1)) / math.sqrt(CORR_BATCHES)
    return McEstimate(value=pooled, stderr=stderr, paths_used=cfg.paths)


def estimate_suite(p: GbmParams, cfg: McConfig, threads: int = 1) -> dict[str, McEstimate]:
    """One simulation pass estimating mean S(T), mean A, E A^2, E S A and
    (for sigma > 0) the correlation; used by the CLI cross-check."""
    acc = np.zeros((CORR_BATCHES, 6))
    extra = []  # per block: sums for A^2 variance and SA variance
    lo = 0
    for s_T, a_hat in iter_terminal_and_average(p, cfg, threads=threads):
        n = len(s_T)
        batch = (np.arange(lo, lo + n) * CORR_BATCHES) // cfg.paths
        cols = np.stack([np.ones(n), s_T, a_hat, s_T * s_T, a_hat * a_hat, s_T * a_hat], axis=1)
        np.add.at(acc, batch, cols)
        a2 = a_hat * a_hat
        sa = s_T * a_hat
        extra.append((float((a2 * a2).sum()), float((sa * sa).sum())))
        lo += n
    total = acc.sum(axis=0)
    n = int(total[0])

    def basic(sx: float, sxx: float) -> McEstimate:
        mean = sx / n
        var = max(sxx - n * mean * mean, 0.0) / (n - 1)
        return McEstimate(mean, math.sqrt(var / n), n)

    s_a2x2 = math.fsum(e[0] for e in extra)
    s_sax2 = math.fsum(e[1] for e in extra)
    out = {
        "mean_S": basic(total[1], total[3]),
        "mean_A": basic(total[2], total[4]),
        "second_moment_A": basic(total[4], s_a2x2),
        "cross_moment_SA": basic(total[5], s_sax2),
    }
    if p.sigma > 0:
        pooled = _pearson(total)
        batch_r = np.array([_pearson(row) for row in acc])
        out["correlation"] = McEstimate(pooled, float(batch_r.std(ddof=1)) / math.sqrt(CORR_BATCHES), n)
    return out

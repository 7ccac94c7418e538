"""Empirical checks of the large-deviation block limit: the ratio
P(||X_[1,n]||_p > x) / (n P(|X_0| > x)) estimated by Monte Carlo, and the
centered threshold levels z_n that remove the small-value bias for p <= alpha.

Both tails are estimated empirically (no analytic tail constants); the
denominator uses a matched count of independent stationary marginal draws.
Replications are split into fixed-size chunks, each with its own derived
substream, so results are byte-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .models import Model, SeedSpec, _as_seed, simulate_batch
from .seqcore import PExponent, as_p, row_p_moduli

__all__ = [
    "RatioEstimate",
    "ld_ratio_mc",
    "ld_ratio_centered_mc",
    "centered_level",
    "pilot_level",
]

# rows per simulation chunk are capped by element count to bound memory
_CHUNK_ELEMENTS = 12_000_000


def _sim_columns(model: Model, n: int) -> int:
    burn = getattr(model, "burn_in", 0)
    extra = len(getattr(model, "coeffs", ())) or 1
    return n + max(burn, extra - 1)


def _chunk_sizes(reps: int, cols: int) -> list[int]:
    rows = max(1, _CHUNK_ELEMENTS // max(cols, 1))
    full, rem = divmod(reps, rows)
    return [rows] * full + ([rem] if rem else [])


def _hit_chunk(args) -> int:
    model, n, pe, level, count, seed, subkey = args
    sims = simulate_batch(model, n, count, seed.generator(*subkey))
    return int(np.sum(row_p_moduli(sims, pe) > level))


def _run_chunks(tasks, threads: int):
    if threads <= 1 or len(tasks) <= 1:
        return [_hit_chunk(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_hit_chunk, tasks))


@dataclass(frozen=True)
class RatioEstimate:
    """Monte Carlo large-deviation ratio with delta-method standard error."""

    numerator_hits: int
    denominator_hits: int
    ratio: float
    std_error: float
    n: int
    x: float
    p: PExponent
    reps: int
    degenerate: bool = False
    z: Optional[float] = None


def _ratio_from_hits(num_hits, den_hits, n, x, pe, reps, z=None) -> RatioEstimate:
    if den_hits == 0:
        return RatioEstimate(num_hits, 0, 0.0, 0.0, n, x, pe, reps,
                             degenerate=True, z=z)
    pn = num_hits / reps
    pd = den_hits / reps
    ratio = pn / (n * pd)
    if num_hits == 0:
        return RatioEstimate(0, den_hits, 0.0, 0.0, n, x, pe, reps, z=z)
    se = ratio * math.sqrt((1 - pn) / (reps * pn) + (1 - pd) / (reps * pd))
    return RatioEstimate(num_hits, den_hits, ratio, se, n, x, pe, reps, z=z)


def _tail_hits(model, n, pe, level, reps, seed, stream, threads) -> int:
    cols = _sim_columns(model, n)
    tasks = []
    for i, count in enumerate(_chunk_sizes(reps, cols)):
        tasks.append((model, n, pe, level, count, seed, (stream, i)))
    return sum(_run_chunks(tasks, threads))


def ld_ratio_mc(model: Model, n: int, p, x: float, reps: int, seed,
                threads: int = 1) -> RatioEstimate:
    """Estimate P(||X_[1,n]||_p > x) / (n P(|X_0| > x)) by simulation.

    The numerator simulates `reps` length-n samples; the denominator uses
    `reps` independent stationary marginal draws against the same level x.
    The limit of this ratio along far-tail levels is c(p).
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    if not x > 0:
        raise ValueError("x must be positive")
    seed = _as_seed(seed)
    pe = as_p(p)
    num = _tail_hits(model, n, pe, x, reps, seed, 0, threads)
    den = _tail_hits(model, 1, pe, x, reps, seed, 1, threads)
    return _ratio_from_hits(num, den, n, x, pe, reps)


def centered_level(p, alpha: float, x: float, n: int, moment_p: Optional[float] = None) -> float:
    """Auxiliary level z_n matching the centered large-deviation statement.

    p < alpha: z = x (n x^-p E|X|^p + 1)^(1/p) with moment_p = E|X|^p;
    p = alpha: same formula with the truncated moment E[|X|^a 1(|X| <= x)];
    p > alpha: z = x and no moment may be supplied.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not x > 0 or n < 1:
        raise ValueError("need x > 0 and n >= 1")
    pe = as_p(p)
    if pe.is_inf or pe.value > alpha:
        if moment_p is not None:
            raise ValueError("p > alpha takes no moment; z equals x")
        return x
    if moment_p is None or not moment_p > 0:
        raise ValueError("p <= alpha requires a positive moment_p")
    pv = pe.value
    return x * (n * moment_p / x ** pv + 1.0) ** (1.0 / pv)


def _moment_chunk(args) -> float:
    model, pv, cap, count, seed, subkey = args
    draws = np.abs(simulate_batch(model, 1, count, seed.generator(*subkey))[:, 0])
    if cap is not None:
        draws = np.where(draws <= cap, draws, 0.0)
    return float(np.sum(draws ** pv))


def ld_ratio_centered_mc(model: Model, n: int, p, alpha: float, x: float,
                         reps: int, seed, pilot_reps: int = 1_000_000,
                         threads: int = 1) -> RatioEstimate:
    """Centered variant of ld_ratio_mc.

    The numerator level is z_n from centered_level, with the required moment
    estimated from a pilot sample of stationary marginal draws; the
    denominator stays at x. For p > alpha this coincides with ld_ratio_mc.
    """
    if reps < 1 or pilot_reps < 1:
        raise ValueError("reps and pilot_reps must be at least 1")
    if not x > 0:
        raise ValueError("x must be positive")
    seed = _as_seed(seed)
    pe = as_p(p)
    if pe.is_inf or pe.value > alpha:
        moment = None
    else:
        cap = x if pe.value == alpha else None
        cols = _sim_columns(model, 1)
        total = 0.0
        for i, count in enumerate(_chunk_sizes(pilot_reps, cols)):
            total += _moment_chunk((model, pe.value, cap, count, seed, (2, i)))
        moment = total / pilot_reps
        if not moment > 0:
            raise ValueError("pilot moment estimate is zero; increase pilot_reps")
    z = centered_level(pe, alpha, x, n, moment)
    num = _tail_hits(model, n, pe, z, reps, seed, 0, threads)
    den = _tail_hits(model, 1, pe, x, reps, seed, 1, threads)
    return _ratio_from_hits(num, den, n, x, pe, reps, z=z)


def pilot_level(model: Model, n: int, p, q: float, reps: int = 20_000, seed=0) -> float:
    """q-quantile of ||X_[1,n]||_p over a pilot sample; far-tail levels for
    the ratio checks are usually placed at q in [0.99, 0.9999]."""
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    if reps < 1:
        raise ValueError("reps must be at least 1")
    seed = _as_seed(seed)
    pe = as_p(p)
    cols = _sim_columns(model, n)
    norms = []
    for i, count in enumerate(_chunk_sizes(reps, cols)):
        sims = simulate_batch(model, n, count, seed.generator(3, i))
        norms.append(row_p_moduli(sims, pe))
    return float(np.quantile(np.concatenate(norms), q))
